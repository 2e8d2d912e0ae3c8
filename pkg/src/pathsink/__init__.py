"""Exact minsum k-sink evacuation solver for path networks."""

from .rational import INFINITE, Rat, format_rational, parse_rational
from .model import (
    InstanceError,
    PathInstance,
    PrefixTables,
    build_prefix_tables,
    instance_digest,
    parse_instance,
    serialize_instance,
)
from .flow import (
    FROM_LEFT,
    FROM_RIGHT,
    Section,
    SectionSequence,
    ceil_sequence,
    extra_costs,
    inject_source,
    section_cost,
    sequence_cost,
    shift,
    sweep_costs,
    sweep_sequences,
)

__all__ = [
    "INFINITE", "Rat", "format_rational", "parse_rational",
    "InstanceError", "PathInstance", "PrefixTables", "build_prefix_tables",
    "instance_digest", "parse_instance", "serialize_instance",
    "FROM_LEFT", "FROM_RIGHT", "Section", "SectionSequence",
    "ceil_sequence", "extra_costs", "inject_source", "section_cost",
    "sequence_cost", "shift", "sweep_costs", "sweep_sequences",
]

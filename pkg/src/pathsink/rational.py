"""Exact rational arithmetic layer.

Every time, weight, capacity, and cost in this package is an exact rational;
no floating point enters any computation.  gmpy2's mpq is used when available
(it is several times faster than fractions.Fraction), with Fraction as a
drop-in fallback.
"""

from __future__ import annotations

from fractions import Fraction

try:
    from gmpy2 import mpq as _mpq

    def Rat(*args):
        return _mpq(*args)

    _RAT_TYPES = (type(_mpq(0)), Fraction, int)
    HAVE_GMPY2 = True
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    def Rat(*args):
        return Fraction(*args)

    _RAT_TYPES = (Fraction, int)
    HAVE_GMPY2 = False

RZERO = Rat(0)
RONE = Rat(1)


class Infinite:
    """Sentinel ordered strictly above every rational.

    Used for empty capacity ranges and for switching points that do not
    exist.  Arithmetic with it is deliberately unsupported.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __repr__(self):
        return "INFINITE"

    def __reduce__(self):
        return (Infinite, ())


INFINITE = Infinite()


def is_rational(x) -> bool:
    return isinstance(x, _RAT_TYPES) and not isinstance(x, bool)


def parse_rational(text) -> "Rat":
    """Convert a decimal string ("1.5"), fraction string ("3/2"), or int
    to an exact rational.  Binary floats are rejected by callers before
    reaching here."""
    if isinstance(text, bool):
        raise ValueError("booleans are not numbers")
    if isinstance(text, int):
        return Rat(text)
    if not isinstance(text, str):
        raise ValueError(f"expected a number string, got {type(text).__name__}")
    frac = Fraction(text.strip())  # exact for both "p/q" and decimal forms
    return Rat(frac.numerator, frac.denominator)


def format_rational(q) -> str:
    """Canonical string form: "p" for integers, "p/q" otherwise."""
    num, den = q.numerator, q.denominator
    if den == 1:
        return str(num)
    return f"{num}/{den}"


def rational_to_decimal_string(q, digits: int = 30) -> str:
    """Decimal rendering with the given number of significant digits,
    round-half-even.  Presentation only; never parsed back."""
    from decimal import Decimal, localcontext, ROUND_HALF_EVEN

    with localcontext() as ctx:
        ctx.prec = digits
        ctx.rounding = ROUND_HALF_EVEN
        value = Decimal(int(q.numerator)) / Decimal(int(q.denominator))
    return str(value)

"""Extended-precision reals at the package boundary.

Internal arithmetic uses ``mpmath.mpf`` inside ``mp.workprec`` blocks;
``ExtReal`` is what results, records and the cache carry around: the
value together with the number of mantissa bits it was computed at.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from mpmath import libmp, mp, mpf

from app.core.config import get_settings
from app.core.errors import DomainError

MIN_PRECISION_BITS = 64


def resolve_precision(precision: int | None) -> int:
    """Return *precision* or the configured default, validated."""
    bits = get_settings().HANKEL_PRECISION_BITS if precision is None else int(precision)
    if bits < MIN_PRECISION_BITS:
        raise DomainError(f"precision must be at least {MIN_PRECISION_BITS} bits, got {bits}")
    return bits


def decimal_digits(bits: int) -> int:
    """Decimal digits carried by a *bits*-bit mantissa."""
    return libmp.prec_to_dps(bits)


def to_decimal(value: Any, bits: int) -> str:
    """Format *value* as a decimal string with the digits *bits* support."""
    return mp.nstr(mpf(value) if not isinstance(value, mpf) else value, decimal_digits(bits))


@dataclass(frozen=True, slots=True)
class ExtReal:
    """A real number with an explicit working precision."""

    value: mpf
    precision_bits: int

    def __post_init__(self) -> None:
        if self.precision_bits < MIN_PRECISION_BITS:
            raise DomainError(
                f"precision_bits must be at least {MIN_PRECISION_BITS}, got {self.precision_bits}"
            )

    @classmethod
    def of(cls, value: Any, precision_bits: int | None = None) -> ExtReal:
        """Wrap *value*, rounding it to *precision_bits* (default: current mp.prec)."""
        bits = mp.prec if precision_bits is None else precision_bits
        with mp.workprec(bits):
            return cls(value=+mpf(value), precision_bits=bits)

    def to_decimal(self) -> str:
        return to_decimal(self.value, self.precision_bits)

    def to_exact(self) -> dict[str, Any]:
        """Lossless JSON form: sign, hex mantissa, exponent."""
        sign, man, exp, _ = self.value._mpf_
        return {
            "sign": sign,
            "mantissa": hex(man),
            "exponent": exp,
            "precision_bits": self.precision_bits,
        }

    @classmethod
    def from_exact(cls, data: dict[str, Any]) -> ExtReal:
        man = int(data["mantissa"], 16)
        raw = libmp.from_man_exp(-man if data["sign"] else man, int(data["exponent"]))
        return cls(value=mp.make_mpf(raw), precision_bits=int(data["precision_bits"]))

    def __float__(self) -> float:
        return float(self.value)

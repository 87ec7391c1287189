"""JSON records printed by the CLI.

Extended-precision numbers travel as decimal strings tagged with the
precision they were computed at; binary floats never appear in text.
"""

from __future__ import annotations

from typing import Any, Literal

from pydantic import BaseModel, Field

from app.numerics.precision import ExtReal, to_decimal


class DecimalValue(BaseModel):
    """A real number as a decimal string plus its mantissa precision."""

    value: str
    precision_bits: int = Field(ge=64)

    @classmethod
    def of(cls, value: Any, precision_bits: int) -> DecimalValue:
        if isinstance(value, ExtReal):
            return cls(value=value.to_decimal(), precision_bits=value.precision_bits)
        return cls(value=to_decimal(value, precision_bits), precision_bits=precision_bits)


class OutputEntry(BaseModel):
    name: str
    value: DecimalValue | None = None
    path: str | None = None


class RunManifest(BaseModel):
    """Everything needed to replay a command."""

    command: str
    parameters: dict[str, Any]
    seed: int | None = None
    precision_bits: int = Field(ge=64)
    versions: dict[str, str]
    wall_time_ms: float = Field(ge=0)
    outputs: list[OutputEntry] = Field(default_factory=list)


class MomentRecord(BaseModel):
    group: Literal["usp", "so"]
    n: int = Field(ge=1)
    h: list[str]
    method: Literal["exact", "mc"]
    value: DecimalValue
    stderr: DecimalValue | None = None
    samples: int | None = None
    acceptance_rate: float | None = None
    mixing_ok: bool | None = None
    manifest: RunManifest


class VerifyPoint(BaseModel):
    parameters: dict[str, str]
    residual: DecimalValue
    tolerance: float
    passed: bool


class VerifyReport(BaseModel):
    suite: str
    points: list[VerifyPoint]
    passed: bool
    manifest: RunManifest


class LimitsRecord(BaseModel):
    target: str
    values: dict[str, DecimalValue | None]
    flags: dict[str, bool] = Field(default_factory=dict)
    manifest: RunManifest


SCHEMA_MODELS: dict[str, type[BaseModel]] = {
    "moment": MomentRecord,
    "verify": VerifyReport,
    "limits": LimitsRecord,
    "manifest": RunManifest,
}

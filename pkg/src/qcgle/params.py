"""Equation coefficients and the derived bilinear constants D1..D5."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields

from .errors import ValidationError

PARAM_KEYS = ("epsilon", "h1", "h3", "h5", "c1", "c3", "c5")


@dataclass(frozen=True)
class QcgleParams:
    """Real coefficients of

        i psi_t + (c3 + i h3)|psi|^2 psi + (c5 + i h5)|psi|^4 psi
            + (c1 - i h1) psi_xx - i epsilon psi = 0
    """

    epsilon: float
    h1: float
    h3: float
    h5: float
    c1: float
    c3: float
    c5: float

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            try:
                value = float(value)
            except (TypeError, ValueError):
                raise ValidationError(f"{f.name}: expected a real number, got {value!r}")
            if not math.isfinite(value):
                raise ValidationError(f"{f.name}: must be finite, got {value!r}")
            object.__setattr__(self, f.name, value)

    @classmethod
    def from_dict(cls, data: dict) -> "QcgleParams":
        unknown = set(data) - set(PARAM_KEYS)
        if unknown:
            raise ValidationError(f"unknown parameter keys: {sorted(unknown)}")
        missing = [k for k in PARAM_KEYS if k not in data]
        if missing:
            raise ValidationError(f"missing parameter keys: {missing}")
        return cls(**{k: data[k] for k in PARAM_KEYS})

    def to_dict(self) -> dict:
        return asdict(self)

    def replace(self, **changes) -> "QcgleParams":
        return QcgleParams(**{**self.to_dict(), **changes})


@dataclass(frozen=True)
class AuxD:
    d1: float
    d2: float
    d3: float
    d4: float
    d5: float


def derive_aux(p: QcgleParams) -> AuxD:
    """D1 = c1^2 + h1^2, D2 = c3 h1 + c1 h3, D3 = c1 c3 - h1 h3,
    D4 = c5 h1 + c1 h5, D5 = c1 c5 - h1 h5.

    Both ansatz branches divide by h1 and c1, so zeros are rejected here.
    """
    if not isinstance(p, QcgleParams):
        raise ValidationError(f"expected QcgleParams, got {type(p).__name__}")
    if p.h1 == 0.0:
        raise ValidationError("h1: must be nonzero")
    if p.c1 == 0.0:
        raise ValidationError("c1: must be nonzero")
    d1 = p.c1 * p.c1 + p.h1 * p.h1
    assert d1 > 0.0
    return AuxD(
        d1=d1,
        d2=p.c3 * p.h1 + p.c1 * p.h3,
        d3=p.c1 * p.c3 - p.h1 * p.h3,
        d4=p.c5 * p.h1 + p.c1 * p.h5,
        d5=p.c1 * p.c5 - p.h1 * p.h5,
    )

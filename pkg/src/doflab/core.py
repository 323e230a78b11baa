"""Shared domain types for the 2-user MIMO interference channel.

Indices follow the usual convention: ``H_ji`` is the channel from
transmitter ``i`` to receiver ``j``, so ``beta12`` is the CSIT quality of
the interfering link Tx2 -> Rx1.
"""

from __future__ import annotations

import enum
import math
import numbers
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

# DoF loads are reals; sums are compared at this tolerance.
DOF_TOL = 1e-12


class ValidationError(ValueError):
    """Raised for malformed antenna counts or CSIT exponents."""


class RelabelRequired(ValueError):
    """Raised when an operation needs n1 <= n2 and the caller must swap users."""


@dataclass(frozen=True)
class AntennaConfig:
    m1: int
    m2: int
    n1: int
    n2: int

    def __post_init__(self):
        for name in ("m1", "m2", "n1", "n2"):
            value = getattr(self, name)
            integral = isinstance(value, numbers.Integral) or (
                isinstance(value, float) and value.is_integer())
            if isinstance(value, bool) or not integral:
                raise ValidationError(f"{name} must be an integer, got {value!r}")
            if value < 1:
                raise ValidationError(f"{name} must be ≥ 1")
            object.__setattr__(self, name, int(value))

    def swapped(self) -> "AntennaConfig":
        return AntennaConfig(self.m2, self.m1, self.n2, self.n1)

    def tx(self, i: int) -> int:
        return self.m1 if i == 1 else self.m2

    def rx(self, j: int) -> int:
        return self.n1 if j == 1 else self.n2

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.m1, self.m2, self.n1, self.n2)


@dataclass(frozen=True)
class CsitProfile:
    beta12: float = 0.0
    beta21: float = 0.0
    beta11: float = 0.0
    beta22: float = 0.0

    def beta(self, j: int, i: int) -> float:
        return getattr(self, f"beta{j}{i}")

    def clamped(self) -> "CsitProfile":
        values = {}
        for name in ("beta12", "beta21", "beta11", "beta22"):
            b = float(getattr(self, name))
            if not math.isfinite(b):
                raise ValidationError(f"{name} must be finite")
            if b < 0:
                raise ValidationError(f"{name} must be ≥ 0")
            values[name] = min(b, 1.0)
        return CsitProfile(**values)

    def swapped(self) -> "CsitProfile":
        return CsitProfile(beta12=self.beta21, beta21=self.beta12,
                           beta11=self.beta22, beta22=self.beta11)


@dataclass(frozen=True)
class DofPoint:
    d1: float
    d2: float

    def __post_init__(self):
        if self.d1 < -DOF_TOL or self.d2 < -DOF_TOL:
            raise ValidationError("DoF values must be nonnegative")

    def check_bounds(self, config: AntennaConfig) -> None:
        if self.d1 > min(config.m1, config.n1) + DOF_TOL:
            raise ValidationError("d1 exceeds min(m1, n1)")
        if self.d2 > min(config.m2, config.n2) + DOF_TOL:
            raise ValidationError("d2 exceeds min(m2, n2)")

    def user(self, k: int) -> float:
        return self.d1 if k == 1 else self.d2


class CaseLabel(str, enum.Enum):
    CASE1_TRIVIAL = "Case1Trivial"
    CASE1 = "Case1"
    CASE2 = "Case2"
    CASE3 = "Case3"
    CASE4 = "Case4"

    def __str__(self):
        return self.value


GENERIC = "generic"
# null_ji: precoder lies in the kernel of the estimated cross channel Ĥ_ji.
NULL_12 = "null_12"
NULL_21 = "null_21"
COMMON = "common"
PRIVATE = "private"


def null_precoder_for(owner: int) -> str:
    return NULL_12 if owner == 2 else NULL_21


def avoided_receiver(precoder: str) -> int | None:
    """Receiver whose estimated channel annihilates this precoder, if any."""
    if precoder == NULL_12:
        return 1
    if precoder == NULL_21:
        return 2
    return None


@dataclass(frozen=True)
class StreamSpec:
    owner: int
    msg_class: str
    precoder: str
    power_exp: float
    dof_load: float
    # Power class within the owner's transmit signal; sets the scaling constant.
    group: str = ""

    def __post_init__(self):
        if self.owner not in (1, 2):
            raise ValidationError("owner must be 1 or 2")
        if self.msg_class not in (COMMON, PRIVATE):
            raise ValidationError(f"unknown msg_class {self.msg_class!r}")
        if self.precoder not in (GENERIC, NULL_12, NULL_21):
            raise ValidationError(f"unknown precoder {self.precoder!r}")
        if self.msg_class == PRIVATE and self.precoder != null_precoder_for(self.owner):
            raise ValidationError("private streams must use the null space of the owner's cross link")
        if self.precoder != GENERIC and self.precoder != null_precoder_for(self.owner):
            raise ValidationError("null-space precoder must refer to the owner's cross link")
        if not (-DOF_TOL <= self.dof_load <= 1 + DOF_TOL):
            raise ValidationError("dof_load must lie in [0, 1]")
        if self.power_exp < 0:
            raise ValidationError("power_exp must be ≥ 0")

    def received_exponent(self, receiver: int, csit: CsitProfile) -> float:
        """Exponent of the received power of this stream at ``receiver``.

        Null-space streams reach their avoided receiver only through the
        estimation error, i.e. at ``P^(power_exp - beta)``, floored at 0.
        """
        if avoided_receiver(self.precoder) == receiver:
            return max(self.power_exp - csit.beta(receiver, self.owner), 0.0)
        return self.power_exp

    def to_dict(self) -> dict:
        return {
            "owner": self.owner,
            "msg_class": self.msg_class,
            "precoder": self.precoder,
            "power_exp": self.power_exp,
            "dof_load": self.dof_load,
            "group": self.group,
        }


@dataclass(frozen=True)
class DecodeStage:
    zero_force: tuple[int, ...]
    decode_jointly: tuple[int, ...]
    treat_as_noise: tuple[int, ...]

    def to_dict(self) -> dict:
        return {
            "zero_force": list(self.zero_force),
            "decode_jointly": list(self.decode_jointly),
            "treat_as_noise": list(self.treat_as_noise),
        }


@dataclass(frozen=True)
class DecodePlan:
    receiver: int
    stages: tuple[DecodeStage, ...]

    @classmethod
    def build(cls, receiver: int, n_streams: int,
              steps: Sequence[tuple[Iterable[int], Iterable[int]]]) -> "DecodePlan":
        """Assemble a plan from ``(zero_force, decode_jointly)`` pairs.

        Every stream still undecoded and not zero-forced is treated as noise.
        Stages with nothing to decode are dropped.
        """
        done: set[int] = set()
        stages = []
        for zf, dec in steps:
            zf, dec = tuple(sorted(zf)), tuple(sorted(dec))
            if not dec:
                continue
            noise = tuple(s for s in range(n_streams)
                          if s not in done and s not in zf and s not in dec)
            stages.append(DecodeStage(zf, dec, noise))
            done.update(dec)
        return cls(receiver, tuple(stages))

    def decoded(self) -> list[int]:
        return [s for st in self.stages for s in st.decode_jointly]

    def check(self, n_streams: int) -> None:
        done: set[int] = set()
        for st in self.stages:
            parts = [set(st.zero_force), set(st.decode_jointly), set(st.treat_as_noise)]
            union = parts[0] | parts[1] | parts[2]
            if sum(len(p) for p in parts) != len(union):
                raise ValidationError("stage sets overlap")
            remaining = set(range(n_streams)) - done
            if union != remaining:
                raise ValidationError("stage must partition all undecoded streams")
            done |= parts[1]

    def to_dict(self) -> dict:
        return {"receiver": self.receiver, "stages": [st.to_dict() for st in self.stages]}


@dataclass(frozen=True)
class BetaBar:
    beta_bar12: float | None
    beta_bar21: float | None
    formula: str = ""

    def to_dict(self) -> dict:
        return {"beta_bar12": self.beta_bar12, "beta_bar21": self.beta_bar21,
                "formula": self.formula}


@dataclass(frozen=True)
class SchemeSpec:
    config: AntennaConfig
    csit: CsitProfile
    case: CaseLabel
    streams: tuple[StreamSpec, ...]
    plans: tuple[DecodePlan, DecodePlan]
    predicted: DofPoint
    beta_bar: BetaBar = field(default_factory=lambda: BetaBar(None, None))

    def owned_by(self, k: int) -> list[int]:
        return [i for i, s in enumerate(self.streams) if s.owner == k]

    def dof_sum(self, k: int) -> float:
        return sum(self.streams[i].dof_load for i in self.owned_by(k))

    def plan(self, receiver: int) -> DecodePlan:
        return self.plans[receiver - 1]

    def check(self) -> None:
        """Verify the structural invariants; raises ValidationError."""
        self.predicted.check_bounds(self.config)
        for k in (1, 2):
            if abs(self.dof_sum(k) - self.predicted.user(k)) > DOF_TOL * 10:
                raise ValidationError(f"user {k} stream DoF do not sum to the predicted value")
        kernel = {NULL_12: max(self.config.m2 - self.config.n1, 0),
                  NULL_21: max(self.config.m1 - self.config.n2, 0)}
        for kind, dim in kernel.items():
            if sum(s.precoder == kind for s in self.streams) > dim:
                raise ValidationError(f"too many {kind} streams for the kernel dimension {dim}")
        for p in self.plans:
            p.check(len(self.streams))
            decoded = p.decoded()
            if len(decoded) != len(set(decoded)):
                raise ValidationError("a stream is decoded twice at one receiver")

    def with_streams(self, streams: Sequence[StreamSpec]) -> "SchemeSpec":
        return replace(self, streams=tuple(streams))

    def to_dict(self) -> dict:
        return {
            "config": dict(zip(("m1", "m2", "n1", "n2"), self.config.as_tuple())),
            "csit": {"beta12": self.csit.beta12, "beta21": self.csit.beta21,
                     "beta11": self.csit.beta11, "beta22": self.csit.beta22},
            "case": self.case.value,
            "streams": [s.to_dict() for s in self.streams],
            "plans": [p.to_dict() for p in self.plans],
            "predicted": {"d1": self.predicted.d1, "d2": self.predicted.d2},
            "beta_bar": self.beta_bar.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "SchemeSpec":
        plans = tuple(
            DecodePlan(p["receiver"], tuple(
                DecodeStage(tuple(st["zero_force"]), tuple(st["decode_jointly"]),
                            tuple(st["treat_as_noise"])) for st in p["stages"]))
            for p in data["plans"])
        bb = data.get("beta_bar") or {}
        return cls(
            config=AntennaConfig(**data["config"]),
            csit=CsitProfile(**data["csit"]),
            case=CaseLabel(data["case"]),
            streams=tuple(StreamSpec(**s) for s in data["streams"]),
            plans=plans,
            predicted=DofPoint(**data["predicted"]),
            beta_bar=BetaBar(bb.get("beta_bar12"), bb.get("beta_bar21"), bb.get("formula", "")),
        )


def _as_config(config) -> AntennaConfig:
    if isinstance(config, AntennaConfig):
        return config
    if isinstance(config, Mapping):
        return AntennaConfig(**config)
    return AntennaConfig(*config)


def _as_csit(csit) -> CsitProfile:
    if csit is None:
        return CsitProfile()
    if isinstance(csit, CsitProfile):
        return csit
    return CsitProfile(**csit)


def validate(config, csit=None) -> tuple[AntennaConfig, CsitProfile]:
    """Normalize raw user input.

    ``config`` may be an AntennaConfig, a 4-sequence ``(m1, m2, n1, n2)`` or a
    mapping; ``csit`` a CsitProfile or mapping of beta values. Exponents above
    1 are clamped to 1 (DoF-equivalent to perfect CSIT).
    """
    return _as_config(config), _as_csit(csit).clamped()

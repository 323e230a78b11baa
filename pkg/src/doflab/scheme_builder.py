"""Compile (config, csit) into an explicit transmission and decoding plan.

Streams are listed transmitter 1 first. Each stream carries a power exponent
(transmit power ~ P^gamma) and a DoF load; decode plans list, per receiver,
which streams are zero-forced, jointly decoded, or left as noise at each stage.
Stages are arranged so that all streams decoded together arrive at the same
power exponent, which lets every stage be checked against the elevated-floor
MAC region.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .core import (
    COMMON, GENERIC, PRIVATE, BetaBar, CaseLabel, DecodePlan,
    DofPoint, SchemeSpec, StreamSpec, ValidationError, null_precoder_for, validate,
)
from .dof_formula import classify_case, closed_form_d2, pos, term_a
from .mac_region import MacCheck, mac_region_contains, scaled_instance


def beta_bars(case: CaseLabel, config, csit=None) -> BetaBar:
    cfg, csit = validate(config, csit)
    case = CaseLabel(case)
    if classify_case(cfg) != case:
        raise ValidationError(f"config {cfg.as_tuple()} does not belong to {case}")
    m1, m2, n1, n2 = cfg.as_tuple()
    b12, b21 = csit.beta12, csit.beta21
    if case == CaseLabel.CASE1_TRIVIAL:
        return BetaBar(None, None, "no null-space streams")
    if case == CaseLabel.CASE1:
        return BetaBar(b12, None, "beta12 (no clamp)")
    if case == CaseLabel.CASE2:
        den = min(m2 - n1, n2 - m1)
        return BetaBar(min(b12, (n2 - n1) / den), None,
                       "min(beta12, (N2-N1)/min(M2-N1, N2-M1))")
    if case == CaseLabel.CASE3:
        den = m1 - n2 + min(m2 - n1, n2)
        if den <= 0:
            return BetaBar(None, None, "second private group is empty")
        return BetaBar(min(b12, (m1 - n1) / den), None,
                       "min(beta12, (M1-N1)/(M1-N2+min(M2-N1, N2)))")
    p1 = min(m1 - n2, n1)
    den = min(m2 - n1, n2)
    return BetaBar(min(b12, (n2 - n1 + b21 * p1) / den), b21,
                   "min(beta12, (N2-N1+beta21*min(M1-N2, N1))/min(M2-N1, N2))")


class _Streams:
    def __init__(self):
        self.items: list[StreamSpec] = []

    def add(self, count: int, owner: int, msg_class: str, power_exp: float,
            dof_load: float, group: str) -> list[int]:
        precoder = GENERIC if msg_class == COMMON else null_precoder_for(owner)
        start = len(self.items)
        for _ in range(max(int(count), 0)):
            self.items.append(StreamSpec(owner, msg_class, precoder, float(power_exp),
                                         float(dof_load), group))
        return list(range(start, len(self.items)))


def build_scheme(config, csit=None) -> SchemeSpec:
    """Scheme achieving ``(min(M1, N1), d2)``; requires ``n1 <= n2``."""
    cfg, csit = validate(config, csit)
    case = classify_case(cfg)
    m1, m2, n1, n2 = cfg.as_tuple()
    b12, b21 = csit.beta12, csit.beta21
    bb = beta_bars(case, cfg, csit)
    st = _Streams()

    if case == CaseLabel.CASE1_TRIVIAL:
        tx1 = st.add(min(m1, n1), 1, COMMON, 1.0, 1.0, "common")
        tx2 = st.add(int(round(min(m2, term_a(cfg)))), 2, COMMON, 1.0, 1.0, "common")
        rx1 = [((), tx1 + tx2)]
        rx2 = [((), tx1 + tx2)]

    elif case == CaseLabel.CASE1:
        tx1 = st.add(min(m1, n1), 1, COMMON, 1.0, 1.0, "common")
        tx2c = st.add(pos(n1 - m1), 2, COMMON, 1.0, 1.0, "common")
        tx2p = st.add(m2 - n1, 2, PRIVATE, b12, b12, "private")
        rx1 = [((), tx1 + tx2c)]
        rx2 = [((), tx1 + tx2c), ((), tx2p)]

    elif case == CaseLabel.CASE2:
        bbar = bb.beta_bar12
        tx1 = st.add(m1, 1, COMMON, 1.0, 1.0, "common")
        elev = st.add(m2, 2, COMMON, 1.0, (n1 - m1) / m2, "elevated")
        tx2p = st.add(min(m2 - n1, n2 - m1), 2, PRIVATE, bbar, bbar, "private")
        rx1 = [(tx1, elev), ((), tx1)]
        rx2 = [(tx1, elev), (tx1, tx2p)]

    elif case == CaseLabel.CASE3:
        elev = st.add(m1, 1, COMMON, 1.0, n1 / m1, "elevated")
        grp_a = st.add(n2 - m1, 2, PRIVATE, b12, b12, "private_a")
        grp_b = []
        if bb.beta_bar12 is not None:
            bbar = bb.beta_bar12
            grp_b = st.add(m1 - n2 + min(m2 - n1, n2), 2, PRIVATE, bbar, bbar, "private_b")
        rx1 = [((), elev)]
        rx2 = [(grp_a, elev), (grp_a, grp_b), ((), grp_a)]

    else:  # Case 4
        bbar = bb.beta_bar12
        p1 = min(m1 - n2, n1)
        elev = st.add(m1, 1, COMMON, 1.0, (n1 - b21 * p1) / m1, "elevated")
        tx1p = st.add(p1, 1, PRIVATE, b21, b21, "private")
        tx2p = st.add(min(m2 - n1, n2), 2, PRIVATE, bbar, bbar, "private")
        rx1 = [((), elev), ((), tx1p)]
        rx2 = [((), elev), ((), tx2p)]

    streams = tuple(st.items)
    n = len(streams)
    plans = (DecodePlan.build(1, n, rx1), DecodePlan.build(2, n, rx2))
    d2 = closed_form_d2(case, cfg, csit)
    scheme = SchemeSpec(cfg, csit, case, streams, plans, DofPoint(float(min(m1, n1)), d2), bb)
    scheme.check()
    return scheme


def build_corner_scheme(config, csit=None, corner: int = 1) -> SchemeSpec:
    """Scheme for the corner where user ``corner`` attains its maximum DoF.

    Corner 2 applies :func:`build_scheme` to the index-exchanged channel and
    maps owners and receivers back; it raises RelabelRequired unless the
    exchanged channel has ``n1 <= n2``.
    """
    cfg, csit = validate(config, csit)
    if corner == 1:
        return build_scheme(cfg, csit)
    if corner != 2:
        raise ValueError("corner must be 1 or 2")
    inner = build_scheme(cfg.swapped(), csit.swapped())
    streams = tuple(
        StreamSpec(3 - s.owner, s.msg_class,
                   GENERIC if s.msg_class == COMMON else null_precoder_for(3 - s.owner),
                   s.power_exp, s.dof_load, s.group)
        for s in inner.streams)
    plans = tuple(DecodePlan(3 - p.receiver, p.stages) for p in reversed(inner.plans))
    bb = BetaBar(inner.beta_bar.beta_bar21, inner.beta_bar.beta_bar12, inner.beta_bar.formula + " (users exchanged)")
    scheme = SchemeSpec(cfg, csit, inner.case, streams, plans,
                        DofPoint(inner.predicted.d2, inner.predicted.d1), bb)
    scheme.check()
    return scheme


@dataclass(frozen=True)
class StageMacView:
    receiver: int
    stage: int
    dimensions: int
    signal_exp: float
    loads: tuple[float, ...]
    floors: tuple[float, ...]

    def check(self) -> MacCheck:
        if not self.loads:
            return MacCheck(True, (), 0)
        if self.dimensions <= 0:
            return MacCheck(all(d <= 1e-12 for d in self.loads), (), 1)
        inst = scaled_instance(self.loads, self.floors, self.signal_exp)
        if inst is None:
            ok = all(d <= 1e-12 for d in self.loads)
            return MacCheck(ok, tuple(0.0 - d for d in self.loads), 1)
        return mac_region_contains(inst)


def stage_mac_views(scheme: SchemeSpec) -> list[StageMacView]:
    """Asymptotic MAC description of every decode stage.

    The effective dimension is ``N_r - |zero_force|``. Noise streams arriving
    above the floor each raise one dimension's floor to their received
    exponent (the largest ones win if they outnumber the dimensions).
    """
    views = []
    for plan in scheme.plans:
        r = plan.receiver
        for idx, stage in enumerate(plan.stages):
            dims = scheme.config.rx(r) - len(stage.zero_force)
            exps = {scheme.streams[s].received_exponent(r, scheme.csit) for s in stage.decode_jointly}
            if len(exps) > 1 and max(exps) - min(exps) > 1e-12:
                raise ValidationError(f"stage {idx} at receiver {r} mixes power levels {sorted(exps)}")
            gamma = exps.pop()
            floors = sorted((scheme.streams[s].received_exponent(r, scheme.csit)
                             for s in stage.treat_as_noise), reverse=True)
            floors = [f for f in floors if f > 0][:max(dims, 0)]
            floors += [0.0] * (max(dims, 0) - len(floors))
            loads = tuple(scheme.streams[s].dof_load for s in stage.decode_jointly)
            views.append(StageMacView(r, idx, dims, gamma, loads, tuple(floors)))
    return views


def scheme_to_json(scheme: SchemeSpec, **kwargs) -> str:
    return json.dumps(scheme.to_dict(), **kwargs)


def scheme_from_json(text: str) -> SchemeSpec:
    return SchemeSpec.from_dict(json.loads(text))

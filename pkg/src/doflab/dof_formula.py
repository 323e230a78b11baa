"""Closed-form achievable DoF at the corner points of the 2-user MIMO IC.

All functions are pure. The three-term expression is evaluated exactly as
stated for any antenna ordering; only :func:`classify_case` and the per-case
closed forms require ``n1 <= n2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .core import CaseLabel, CsitProfile, RelabelRequired, ValidationError, validate


def minplus(*values: float) -> float:
    """Minimum of the arguments, or 0 if that minimum is negative."""
    if not values:
        raise ValueError("minplus needs at least one argument")
    m = min(values)
    return m if m >= 0 else 0.0


def pos(x: float) -> float:
    return x if x > 0 else 0


@dataclass(frozen=True)
class TermBreakdown:
    a: float
    b: float
    c: float
    d2: float
    # True when evaluated for n1 > n2 without relabeling.
    formula_as_stated: bool = False

    @property
    def binding(self) -> tuple[str, ...]:
        """Names of the terms attaining the minimum (ties are not broken)."""
        m = min(self.a, self.b, self.c)
        return tuple(n for n, v in zip("abc", (self.a, self.b, self.c)) if abs(v - m) <= 1e-12)

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "c": self.c, "d2": self.d2,
                "binding": list(self.binding), "formula_as_stated": self.formula_as_stated}


def term_a(config) -> float:
    """User-2 DoF with perfect CSIT."""
    cfg, _ = validate(config)
    m1, m2, n1, n2 = cfg.as_tuple()
    return min(max(m1, n2), max(m2, n1), m1 + m2, n1 + n2) - min(m1, n1)


def term_b(config, beta12: float, beta21: float) -> float:
    """Decodability restriction at receiver 2."""
    cfg, csit = validate(config, {"beta12": beta12, "beta21": beta21})
    m1, m2, n1, n2 = cfg.as_tuple()
    return (minplus(n1 - m1, m2) + min(m1, n2) - min(m1, n1)
            + csit.beta12 * minplus(n2 - m1, m2)
            + csit.beta21 * minplus(m1 - n2, n1))


def term_c(config, beta12: float) -> float:
    """Most DoF transmitter 2 can send without hurting user 1."""
    cfg, csit = validate(config, {"beta12": beta12})
    m1, m2, n1, n2 = cfg.as_tuple()
    return minplus(n1 - m1, m2) + csit.beta12 * minplus(m2 - n1, n2)


def dof_user2_given_user1_max(config, csit=None) -> TermBreakdown:
    cfg, csit = validate(config, csit)
    a = term_a(cfg)
    b = term_b(cfg, csit.beta12, csit.beta21)
    c = term_c(cfg, csit.beta12)
    return TermBreakdown(a, b, c, minplus(a, b, c), formula_as_stated=cfg.n1 > cfg.n2)


def dof_user1_given_user2_max(config, csit=None) -> TermBreakdown:
    """Same expression with the user indices exchanged; ``d2`` holds d1."""
    cfg, csit = validate(config, csit)
    return dof_user2_given_user1_max(cfg.swapped(), csit.swapped())


def classify_case(config) -> CaseLabel:
    cfg, _ = validate(config)
    m1, m2, n1, n2 = cfg.as_tuple()
    if n1 > n2:
        raise RelabelRequired(f"n1={n1} > n2={n2}: relabel required (swap the users)")
    if m2 <= n1:
        return CaseLabel.CASE1_TRIVIAL
    if m2 <= n2:
        return CaseLabel.CASE1
    if m1 < n1:
        return CaseLabel.CASE2
    if m1 <= n2:
        return CaseLabel.CASE3
    return CaseLabel.CASE4


def closed_form_d2(case: CaseLabel, config, csit=None) -> float:
    cfg, csit = validate(config, csit)
    case = CaseLabel(case)
    actual = classify_case(cfg)
    if actual != case:
        raise ValidationError(f"config {cfg.as_tuple()} is {actual}, not {case}")
    m1, m2, n1, n2 = cfg.as_tuple()
    b12, b21 = csit.beta12, csit.beta21
    if case == CaseLabel.CASE1_TRIVIAL:
        return min(m2, term_a(cfg))
    if case == CaseLabel.CASE1:
        return pos(n1 - m1) + b12 * (m2 - n1)
    if case == CaseLabel.CASE2:
        return min(n2 - m1, n1 - m1 + b12 * min(m2 - n1, n2 - m1))
    if case == CaseLabel.CASE3:
        return min(b12 * min(m2 - n1, n2), m1 - n1 + b12 * (n2 - m1))
    # Case 4
    return min(b12 * min(m2 - n1, n2), n2 - n1 + b21 * min(m1 - n2, n1))


def sweep_beta(config, which_beta: int | str, grid: Iterable[float],
               csit=None) -> list[tuple[float, float]]:
    """Evaluate d2 at each beta in ``grid``, holding the other exponents fixed."""
    which = str(which_beta)
    if which not in ("12", "21"):
        raise ValueError("which_beta must be 12 or 21")
    cfg, base = validate(config, csit)
    out = []
    for beta in grid:
        if not 0 <= beta <= 1:
            raise ValidationError(f"grid value {beta} outside [0, 1]")
        trial = CsitProfile(**{**base.__dict__, f"beta{which}": beta})
        out.append((beta, dof_user2_given_user1_max(cfg, trial).d2))
    return out


def default_beta_grid(step: float = 0.01) -> list[float]:
    n = int(round(1 / step))
    return [k / n for k in range(n + 1)]

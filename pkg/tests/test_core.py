import math

import pytest
from hypothesis import given, strategies as st

from doflab import AntennaConfig, CsitProfile, DecodePlan, StreamSpec, ValidationError, validate
from doflab.core import COMMON, GENERIC, NULL_12, NULL_21, PRIVATE, avoided_receiver


def test_validate_accepts_tuple_mapping_and_dataclass():
    a, _ = validate((1, 4, 1, 3))
    b, _ = validate({"m1": 1, "m2": 4, "n1": 1, "n2": 3})
    c, _ = validate(AntennaConfig(1, 4, 1, 3))
    assert a == b == c


@pytest.mark.parametrize("bad", [(0, 1, 1, 1), (1, 1, -2, 1), (1.5, 1, 1, 1), (True, 1, 1, 1)])
def test_bad_antenna_counts(bad):
    with pytest.raises(ValidationError):
        validate(bad)


def test_beta_above_one_is_clamped():
    _, csit = validate((1, 4, 1, 3), CsitProfile(beta12=1.7, beta21=0.2))
    assert csit.beta12 == 1.0 and csit.beta21 == 0.2


@pytest.mark.parametrize("bad", [-0.1, math.nan, math.inf])
def test_bad_beta_raises(bad):
    with pytest.raises(ValidationError):
        validate((1, 4, 1, 3), CsitProfile(beta12=bad))


@given(st.floats(0, 5), st.floats(0, 5))
def test_clamp_is_idempotent(b12, b21):
    once = CsitProfile(b12, b21).clamped()
    assert once.clamped() == once
    assert 0 <= once.beta12 <= 1 and 0 <= once.beta21 <= 1


def test_swaps_are_involutions():
    cfg = AntennaConfig(1, 2, 3, 4)
    csit = CsitProfile(0.1, 0.2, 0.3, 0.4)
    assert cfg.swapped() == AntennaConfig(2, 1, 4, 3)
    assert cfg.swapped().swapped() == cfg
    assert csit.swapped().swapped() == csit
    assert csit.swapped().beta12 == 0.2


def test_private_stream_must_use_own_null_space():
    StreamSpec(2, PRIVATE, NULL_12, 0.5, 0.5)
    with pytest.raises(ValidationError):
        StreamSpec(2, PRIVATE, NULL_21, 0.5, 0.5)
    with pytest.raises(ValidationError):
        StreamSpec(1, PRIVATE, GENERIC, 0.5, 0.5)
    with pytest.raises(ValidationError):
        StreamSpec(1, COMMON, GENERIC, 1.0, 1.5)


def test_received_exponent_drops_by_beta_at_avoided_receiver():
    csit = CsitProfile(beta12=0.7)
    s = StreamSpec(2, PRIVATE, NULL_12, 0.7, 0.7)
    assert avoided_receiver(NULL_12) == 1
    assert s.received_exponent(1, csit) == 0.0
    assert s.received_exponent(2, csit) == 0.7
    # power above the CSIT level leaks through
    assert StreamSpec(2, PRIVATE, NULL_12, 1.0, 0.5).received_exponent(1, csit) == pytest.approx(0.3)


def test_plan_build_fills_noise_sets():
    plan = DecodePlan.build(2, 4, [((), (0, 1)), ((0,), ()), ((), (2,))])
    assert len(plan.stages) == 2
    assert plan.stages[0].treat_as_noise == (2, 3)
    assert plan.stages[1].treat_as_noise == (3,)
    plan.check(4)

from fractions import Fraction
from itertools import combinations

import pytest

from triquot.cyclotomic import CycloElem, as_rational_integer
from triquot.quotvi import (
    CalibrationError,
    DegreeMatchError,
    VIConvention,
    VIInstance,
    calibrate,
    default_search_space,
    run_battery,
    vi_sum,
)
from triquot.quotvi import engine

CONV = VIConvention(root_target=-1, phase=1, weight_exponent_tweak=0)


def naive_vi(inst, conv):
    """Direct transcription of the closed form, no tables, no halving."""
    n, r, g, N = inst.n, inst.r, inst.g, inst.N
    if conv.root_target == -1 and r % 2 == 0:
        m = 2 * n
        roots = [CycloElem.root(m, 2 * k + 1) for k in range(n)]
    else:
        m = n
        roots = [CycloElem.root(m, k) for k in range(n)]
    total = CycloElem.zero(m)
    for idx in combinations(range(n), r):
        lam = [roots[i] for i in idx]
        prod = CycloElem.one(m)
        for x in lam:
            prod = prod * x
        weight = prod.inv() * Fraction(n ** r)
        for a in range(r):
            for b in range(r):
                if a != b:
                    weight = weight * (lam[a] - lam[b]).inv()
        total = total + prod ** (N + conv.weight_exponent_tweak) * weight ** (g - 1)
    return as_rational_integer(total * conv.phase)


@pytest.mark.parametrize("inst", [
    VIInstance(n=4, r=2, g=0, d=0, N=2),   # inverted pair table, m = 2n
    VIInstance(n=4, r=2, g=1, d=1, N=2),   # no pair factor
    VIInstance(n=4, r=2, g=2, d=5, N=8),   # squared differences, m = 2n
    VIInstance(n=5, r=3, g=2, d=6, N=8),   # odd r, m = n
    VIInstance(n=3, r=1, g=3, d=4, N=8),   # rank one
])
def test_engine_matches_naive(inst):
    for conv in (CONV, VIConvention(1, 1, 0), VIConvention(-1, 1, 1)):
        assert vi_sum(inst, conv) == naive_vi(inst, conv), (inst, conv)


def test_spec_values():
    assert vi_sum(VIInstance(n=4, r=2, g=0, d=0, N=2), CONV) == 1
    assert vi_sum(VIInstance(n=3, r=1, g=2, d=4, N=10), CONV) == 9
    assert vi_sum(VIInstance(n=2, r=1, g=3, d=5, N=8), CONV) == 8


def test_degree_match_guard():
    with pytest.raises(DegreeMatchError, match="does not match virtual dimension"):
        VIInstance(n=4, r=2, g=2, d=3, N=5)


def test_grassmannian_battery_values():
    for r in range(1, 5):
        for ell in range(1, 5):
            inst = VIInstance(n=r + ell, r=r, g=0, d=0, N=ell)
            assert vi_sum(inst, CONV) == 1, (r, ell)


def test_rank_one_values():
    for g in (2, 3):
        for n in (2, 3, 4):
            for d in (10, 15):
                N = n * d - (n - 1) * (g - 1)
                assert vi_sum(VIInstance(n=n, r=1, g=g, d=d, N=N), CONV) == n ** g


def test_root_target_separates():
    inst = VIInstance(n=4, r=2, g=2, d=5, N=8)
    assert vi_sum(inst, CONV) == 24
    assert vi_sum(inst, VIConvention(1, 1, 0)) == -24


def test_higher_rank_values():
    assert vi_sum(VIInstance(n=3, r=2, g=2, d=6, N=8), CONV) == 9
    assert vi_sum(VIInstance(n=4, r=2, g=2, d=6, N=10), CONV) == 40
    assert vi_sum(VIInstance(n=4, r=3, g=2, d=9, N=11), CONV) == 16


def test_determinism_across_workers():
    inst = VIInstance(n=8, r=3, g=2, d=9, N=19)
    v1 = vi_sum(inst, CONV, workers=1)
    v2 = vi_sum(inst, CONV, workers=2)
    v3 = vi_sum(inst, CONV, workers=7)
    assert v1 == v2 == v3


def test_float_backend_agrees_numba_and_numpy(monkeypatch):
    cases = [
        VIInstance(n=4, r=2, g=0, d=0, N=2),
        VIInstance(n=4, r=2, g=2, d=5, N=8),
        VIInstance(n=5, r=3, g=2, d=6, N=8),
        VIInstance(n=3, r=1, g=2, d=4, N=10),
        VIInstance(n=4, r=2, g=1, d=1, N=2),
    ]
    exact = [vi_sum(c, CONV) for c in cases]
    monkeypatch.delenv("TRIQUOT_NO_NUMBA", raising=False)
    assert [vi_sum(c, CONV, backend="float") for c in cases] == exact
    monkeypatch.setenv("TRIQUOT_NO_NUMBA", "1")
    assert [vi_sum(c, CONV, backend="float") for c in cases] == exact


def test_unknown_backend():
    with pytest.raises(ValueError, match="unknown backend"):
        vi_sum(VIInstance(n=3, r=1, g=2, d=4, N=10), CONV, backend="symbolic")


def test_convention_validation_and_round_trip():
    with pytest.raises(ValueError):
        VIConvention(root_target=2)
    with pytest.raises(ValueError):
        VIConvention(phase=0)
    conv = VIConvention(-1, -1, 2)
    assert VIConvention.from_dict(conv.as_dict()) == conv


def test_calibrate_unique_survivor():
    conv = calibrate()
    assert conv == CONV
    assert len(default_search_space()) == 20


def test_calibrate_empty_space():
    with pytest.raises(CalibrationError, match="empty convention search space"):
        calibrate(search_space=())


def test_calibrate_no_survivor_reports_matrix():
    bad = (VIConvention(-1, -1, 0), VIConvention(1, -1, 0))
    with pytest.raises(CalibrationError) as exc:
        calibrate(search_space=bad)
    msg = str(exc.value)
    assert "got 0" in msg
    assert "first failure" in msg


def test_battery_is_conjunctive():
    # tau = 12 vanishes mod every rank-one conductor n in {2,3,4} but not on
    # the Grassmannian battery, so it passes (b) while failing (a)
    tweaked = VIConvention(-1, 1, 12)
    grassmannian = run_battery(tweaked, parts=("grassmannian",))
    rank_one = run_battery(tweaked, parts=("rank_one",))
    assert any(not case.ok for case in grassmannian)
    assert all(case.ok for case in rank_one)
    assert tweaked not in (c for c in default_search_space())


def test_certification_failure_branch(monkeypatch):
    inst = VIInstance(n=3, r=1, g=2, d=3, N=7)

    def irrational_total(job, total_ranks, workers):
        return [1, 1], 2  # (1 + zeta_3)/2, not rational

    monkeypatch.setattr(engine, "_exact_total", irrational_total)
    with pytest.raises(CalibrationError, match="calibration failure"):
        vi_sum(inst, CONV)

    def non_integral_total(job, total_ranks, workers):
        return [1, 0], 2  # rational 1/2, scaled by 3: not an integer

    monkeypatch.setattr(engine, "_exact_total", non_integral_total)
    with pytest.raises(CalibrationError, match="not integral"):
        vi_sum(inst, CONV)


def test_float_backend_residual_guard(monkeypatch):
    from triquot.quotvi import floatkern

    def drifting(*args, **kwargs):
        return complex(0.4, 0.2)

    monkeypatch.setattr(floatkern, "vi_sum_float", drifting)
    with pytest.raises(ArithmeticError, match="lost precision"):
        vi_sum(VIInstance(n=3, r=1, g=2, d=3, N=7), CONV, backend="float")


def test_instance_validation():
    with pytest.raises(ValueError, match="0 < r < n"):
        VIInstance(n=3, r=3, g=0, d=0, N=0)
    with pytest.raises(ValueError, match="nonnegative"):
        VIInstance(n=3, r=1, g=-1, d=0, N=0)

from fractions import Fraction

import pytest

import triquot.triangle as triangle
from triquot.triangle import (
    DNormalizationPolicy,
    ModuliInput,
    build_alpha,
    default_convention,
    derive_params,
    fit_level_polynomial,
    segre_number,
    verify_triangle,
    verlinde_number,
)


def test_input_validation():
    with pytest.raises(ValueError, match="genus"):
        ModuliInput(1, 2, 0, 1)
    with pytest.raises(ValueError, match="rank"):
        ModuliInput(2, 0, 0, 1)
    with pytest.raises(ValueError, match="level"):
        ModuliInput(2, 1, 0, 0)


def test_derive_params_examples():
    p = derive_params(ModuliInput(2, 2, 1, 1))
    assert (p.h, p.n, p.d_prime, p.N, p.vdim) == (1, 4, 5, 8, 16)
    p = derive_params(ModuliInput(2, 2, 0, 2))
    assert (p.h, p.r0, p.n, p.d_prime, p.N, p.vdim) == (2, 1, 4, 6, 10, 20)
    p = derive_params(ModuliInput(3, 1, 2, 2), DNormalizationPolicy(d_prime=7))
    assert (p.n, p.N, p.vdim) == (3, 17, 17)


def test_derive_params_invariants():
    from math import gcd
    for g in (2, 3):
        for r in (1, 2, 3, 4):
            for d in (-3, 0, 1, 5):
                for ell in (1, 2, 3):
                    p = derive_params(ModuliInput(g, r, d, ell))
                    assert gcd(r, p.d_prime) == p.h
                    assert r * p.N == p.vdim
                    assert p.N >= 1
                    assert p.d_prime > 2 * r * (g - 1)
                    assert (p.d_prime - d) % r == 0


def test_derive_params_policy_errors():
    with pytest.raises(ValueError, match="not congruent"):
        derive_params(ModuliInput(2, 2, 1, 1), DNormalizationPolicy(d_prime=6))
    with pytest.raises(ValueError, match="N="):
        derive_params(ModuliInput(3, 1, 2, 1), DNormalizationPolicy(d_prime=0))


def test_build_alpha_examples():
    mi = ModuliInput(2, 2, 1, 3)
    alpha = build_alpha(mi, derive_params(mi, DNormalizationPolicy(d_prime=11)))
    assert (alpha.rank, alpha.degree) == (8, -38)
    mi = ModuliInput(2, 1, 4, 1)
    alpha = build_alpha(mi, derive_params(mi, DNormalizationPolicy(d_prime=4)))
    assert (alpha.rank, alpha.degree) == (2, -7)


def test_verlinde_examples():
    conv = default_convention()
    assert verlinde_number(ModuliInput(2, 1, 0, 2), conv) == 9
    assert verlinde_number(ModuliInput(2, 2, 0, 1), conv) == 9
    assert verlinde_number(ModuliInput(3, 1, 0, 1), conv) == 8


def test_negative_degree_normalizes():
    conv = default_convention()
    assert verlinde_number(ModuliInput(2, 2, -3, 1), conv) == \
        verlinde_number(ModuliInput(2, 2, 1, 1), conv)


def test_segre_examples():
    conv = default_convention()
    assert segre_number(ModuliInput(2, 1, 3, 2), conv) == (9, True)
    assert segre_number(ModuliInput(3, 1, 5, 1), conv) == (8, True)
    value, independent = segre_number(ModuliInput(2, 2, 1, 1), conv)
    assert value == verlinde_number(ModuliInput(2, 2, 1, 1), conv)
    assert independent is False


def test_verify_triangle_rank_one():
    report = verify_triangle(ModuliInput(2, 1, 0, 3), default_convention())
    assert report.verlinde_value == report.quot_value == report.segre_value == 16
    assert report.segre_independent is True
    assert report.passed
    assert report.checks["integrality"] is True
    assert report.checks["d_shift"] is True
    assert report.checks["level_rank"] is True
    assert report.checks["rank_alpha_M"] is True


def test_verify_triangle_exponent_check():
    # h = r and ell | d' makes the exponent identity applicable
    report = verify_triangle(ModuliInput(2, 2, 0, 2), default_convention())
    assert report.checks["eq_exponent"] is True
    assert report.passed


def test_verify_triangle_sweep_mode():
    report = verify_triangle(ModuliInput(2, 2, 1, 1), default_convention(), full=False)
    assert report.passed
    assert report.checks["d_shift"] is None
    assert report.checks["integrality"] is True


def test_level_rank_pairs():
    conv = default_convention()
    for (r, ell) in ((1, 3), (2, 3), (2, 2)):
        a = verlinde_number(ModuliInput(2, r, 0, ell), conv)
        b = verlinde_number(ModuliInput(2, ell, 0, r), conv)
        assert a == b, (r, ell, a, b)


def test_report_dict_shape():
    report = verify_triangle(ModuliInput(2, 2, 1, 1), default_convention())
    data = report.as_dict()
    assert data["verlindeValue"] == data["quotValue"] == data["segreValue"] == 24
    assert data["input"] == {"g": 2, "r": 2, "d": 1, "ell": 1}
    assert data["params"]["dPrime"] == 5
    assert data["passed"] is True
    assert set(data["checks"]) == {
        "integrality", "d_shift", "eq_exponent", "level_rank", "rank_alpha_M"}


def test_fit_rank_one():
    conv = default_convention()
    fit = fit_level_polynomial(2, 1, 0, range(1, 6), conv)
    assert fit.degree == 2
    assert fit.coefficients == (Fraction(1), Fraction(2), Fraction(1))
    assert fit.volume_term == 1
    fit = fit_level_polynomial(3, 1, 0, range(1, 7), conv)
    assert fit.coefficients == (Fraction(1), Fraction(3), Fraction(3), Fraction(1))


def test_fit_rank_two():
    fit = fit_level_polynomial(2, 2, 1, range(1, 9), default_convention())
    assert fit.degree == 5
    assert fit.volume_term == Fraction(2, 3)
    assert fit.values == (24, 171, 704, 2125, 5256, 11319, 22016, 39609)


def test_fit_range_validation():
    conv = default_convention()
    with pytest.raises(ValueError, match="consecutive"):
        fit_level_polynomial(2, 1, 0, [1, 2, 4, 5], conv)
    with pytest.raises(ValueError, match="need at least"):
        fit_level_polynomial(2, 1, 0, [1, 2, 3], conv)


def test_fit_detects_polynomiality_violation(monkeypatch):
    conv = default_convention()
    real = triangle.verlinde_number

    def corrupted(mi, *args, **kwargs):
        value = real(mi, *args, **kwargs)
        return value + 1 if mi.ell == 5 else value

    monkeypatch.setattr(triangle, "verlinde_number", corrupted)
    with pytest.raises(ArithmeticError, match="polynomiality violated"):
        fit_level_polynomial(2, 1, 0, range(1, 6), conv)


def test_stabilization_gives_same_value_as_direct():
    # the witness evaluation at d'+r never changes the reported value
    conv = default_convention()
    mi = ModuliInput(2, 3, 2, 1)
    params = derive_params(mi)
    from triquot.quotvi import VIInstance, vi_sum
    inst = VIInstance(n=params.n, r=mi.r, g=mi.g, d=params.d_prime, N=params.N)
    assert verlinde_number(mi, conv) == vi_sum(inst, conv)

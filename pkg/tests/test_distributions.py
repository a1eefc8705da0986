import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from genbeta.distributions import (
    FAMILIES,
    DistSpec,
    ccdf,
    ccdf_near_beta1,
    cdf,
    from_mcdonald,
    generator_pdf,
    hierarchy_limit,
    pdf,
    pdf_alt,
    power_law_window,
    quantile,
    sample,
    seed_cdf,
    seed_pdf,
    tail_exponent,
    to_power_variable,
)
from genbeta.errors import DomainError
from genbeta.specfun import ln_beta, reg_inc_beta
from support import random_spec as _random_spec, total_mass as _total_mass

GB_ROW1 = DistSpec("GB", alpha=1.5457, beta1=398.8160, beta2=27.4217, p=0.6648, q=2.7871)
GB_ROW9 = DistSpec("GB", alpha=2.4734, beta1=169.5618, beta2=9.0164, p=2.5880, q=1.3855)
MGB_ROW1 = DistSpec("mGB", alpha=1.5500, beta1=399.9009, beta2=27.4233, p=0.6519, q=1.7828)
MGB_ROW5 = DistSpec("mGB", alpha=2.3708, beta1=200.5519, beta2=10.7210, p=1.7255, q=0.4456)
TILDE_ROW1 = DistSpec("tildeMGB", alpha=1.5500, beta1=399.9009, beta2=27.4233, p=0.6519, q=1.7828)

# mGB density written out term by term and evaluated in 40-digit mpmath
# at the row-1 mGB parameters.
MGB_ORACLE_X = [0.5, 2, 5, 10, 20, 40, 80, 150, 300, 390]
MGB_ORACLE_PDF = [
    0.073314238260955569, 0.070606442351096272, 0.059600270212730059,
    0.039546270245499431, 0.014737324700062137, 0.0022134744062878142,
    0.00013389051212309427, 5.9968165591335798e-6, 9.5912155403582741e-8,
    4.2216865213637472e-9,
]
# mpmath tanh-sinh quadrature of the same densities
MGB_CDF_AT_100 = 0.99886363650953579
TILDE_CDF_AT_100 = 0.99893838745283094
TILDE_CCDF_AT_395 = 1.2594787489377048e-9


class TestDistSpec:
    def test_json_round_trip(self):
        text = MGB_ROW1.to_json()
        assert set(json.loads(text)) == {"family", "alpha", "beta1", "beta2", "p", "q"}
        assert DistSpec.from_json(text) == MGB_ROW1

    def test_gamma_members_use_beta(self):
        spec = DistSpec("GGa", alpha=2.0, beta=3.0, p=1.5)
        assert json.loads(spec.to_json()) == {"family": "GGa", "alpha": 2.0, "beta": 3.0, "p": 1.5}

    @pytest.mark.parametrize("kwargs", [
        dict(family="XYZ"),
        dict(family="GB2", alpha=1.0, beta2=1.0, p=1.0),
        dict(family="GB2", alpha=1.0, beta2=1.0, p=1.0, q=1.0, beta1=3.0),
        dict(family="B2", beta2=-1.0, p=1.0, q=1.0),
        dict(family="B2", beta2=math.inf, p=1.0, q=1.0),
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(DomainError):
            DistSpec(**kwargs)

    def test_unknown_json_key(self):
        with pytest.raises(DomainError):
            DistSpec.from_json('{"family": "B2", "beta2": 1, "p": 1, "q": 1, "gamma": 2}')

    def test_tilde_normalizability_precondition(self):
        with pytest.raises(DomainError):
            DistSpec("tildeMGB", alpha=0.5, beta1=10, beta2=1, p=1, q=0.9)

    def test_mcdonald_conversion(self):
        spec = from_mcdonald(2.0, 4.0, 0.75, 1.0, 2.0)
        assert spec.beta1 == pytest.approx(4.0 / 0.5)
        assert spec.beta2 == pytest.approx(4.0 / math.sqrt(0.75))
        assert from_mcdonald(2.0, 4.0, 0.0, 1.0, 2.0).family == "GB1"
        assert from_mcdonald(2.0, 4.0, 1.0, 1.0, 2.0).family == "GB2"


class TestPdf:
    def test_vanishes_at_beta1(self):
        assert pdf(GB_ROW1, GB_ROW1.beta1) == 0.0

    def test_zero_outside_support(self):
        assert pdf(GB_ROW1, 400.0) == 0.0
        assert pdf(GB_ROW1, -1.0) == 0.0

    def test_endpoint_conventions(self):
        spiky = DistSpec("GB", alpha=1.2, beta1=10.0, beta2=1.0, p=0.5, q=0.6)
        assert pdf(spiky, 0.0) == math.inf
        assert pdf(spiky, 10.0) == math.inf
        # row 1 has alpha p slightly above 1, so its density starts at zero
        assert pdf(GB_ROW1, 0.0) == 0.0

    def test_b_unit_shapes(self):
        b1, b2 = 5.0, 2.0
        spec = DistSpec("B", beta1=b1, beta2=b2, p=1.0, q=1.0)
        x = np.linspace(0.1, 4.9, 7)
        assert pdf(spec, x) == pytest.approx((1 + b1 / b2) * (1 + x / b2) ** -2 / b1, rel=1e-13)

    def test_mgb_high_precision_oracle(self):
        assert pdf(MGB_ROW1, np.array(MGB_ORACLE_X)) == pytest.approx(MGB_ORACLE_PDF, rel=1e-11)

    def test_modified_b2_is_standard_with_shifted_q(self):
        x = np.geomspace(0.01, 100, 20)
        modified = DistSpec("mB2", beta2=2.0, p=1.5, q=0.7)
        standard = DistSpec("B2", beta2=2.0, p=1.5, q=1.7)
        assert pdf(modified, x) == pytest.approx(pdf(standard, x), rel=1e-13)

    def test_power_change_of_variable(self):
        x = np.geomspace(0.1, 399, 40)
        y_spec = to_power_variable(MGB_ROW1)
        a = MGB_ROW1.alpha
        lhs = pdf(MGB_ROW1, x)
        rhs = pdf(y_spec, x**a) * a * x ** (a - 1)
        assert lhs == pytest.approx(rhs, rel=1e-10)


class TestPdfAlt:
    def test_matches_pdf(self):
        x = np.geomspace(1e-3, GB_ROW1.beta1 * (1 - 1e-9), 400)
        assert np.max(np.abs(pdf_alt(GB_ROW1, x) / pdf(GB_ROW1, x) - 1)) <= 1e-10

    def test_endpoints(self):
        spec = DistSpec("GB", alpha=2.0, beta1=10.0, beta2=1.0, p=1.5, q=2.0)
        assert pdf_alt(spec, 0.0) == 0.0
        assert pdf_alt(spec, 10.0) == 0.0

    def test_only_gb(self):
        with pytest.raises(DomainError):
            pdf_alt(MGB_ROW1, 1.0)

    def test_composition_with_seed(self):
        x = np.linspace(1, 390, 25)
        a, b1, b2, p, q = 1.5457, 398.8160, 27.4217, 0.6648, 2.7871
        via_seed = generator_pdf(seed_cdf(a, b1, b2, x), seed_pdf(a, b1, b2, x), p, q)
        assert via_seed == pytest.approx(pdf_alt(GB_ROW1, x), rel=1e-12)


class TestSeedAndGenerator:
    def test_seed_endpoints(self):
        assert seed_cdf(1.7, 5.0, 2.0, 0.0) == 0.0
        assert seed_cdf(1.7, 5.0, 2.0, 5.0) == pytest.approx(1.0, abs=1e-15)

    def test_seed_value(self):
        assert seed_cdf(1.0, 2.0, 1.0, 1.0) == pytest.approx(0.75)

    def test_seed_domain(self):
        with pytest.raises(DomainError):
            seed_cdf(1.0, 2.0, 1.0, 2.5)

    def test_seed_pdf_is_derivative(self):
        h = 1e-6
        for x in (0.3, 1.0, 4.0):
            fd = (seed_cdf(1.7, 5.0, 2.0, x + h) - seed_cdf(1.7, 5.0, 2.0, x - h)) / (2 * h)
            assert seed_pdf(1.7, 5.0, 2.0, x) == pytest.approx(fd, rel=1e-8)

    def test_generator_identity(self):
        assert generator_pdf(0.3, 1.7, 1.0, 1.0) == pytest.approx(1.7, rel=1e-15)

    @pytest.mark.parametrize("F", [0.0, 1.0])
    def test_generator_endpoints(self, F):
        assert generator_pdf(F, 2.0, 2.5, 3.0) == 0.0


class TestCdf:
    @pytest.mark.parametrize("spec", [GB_ROW1, MGB_ROW1, TILDE_ROW1])
    def test_one_at_beta1(self, spec):
        assert cdf(spec, spec.beta1) == 1.0
        assert cdf(spec, 0.0) == 0.0

    def test_mgb_extra_term_vanishes_near_ends(self):
        from genbeta.distributions import _mgb_extra
        a, b1, b2, p, q = MGB_ROW1.alpha, MGB_ROW1.beta1, MGB_ROW1.beta2, MGB_ROW1.p, MGB_ROW1.q
        assert _mgb_extra(np.array([0.0, b1]), a, b1, b2, p, q) == pytest.approx([0.0, 0.0], abs=1e-300)

    def test_mgb_quadrature_oracle(self):
        assert cdf(MGB_ROW1, 100.0) == pytest.approx(MGB_CDF_AT_100, rel=1e-12)

    def test_tilde_quadrature_oracle(self):
        assert cdf(TILDE_ROW1, 100.0) == pytest.approx(TILDE_CDF_AT_100, rel=1e-11)
        assert ccdf(TILDE_ROW1, 395.0) == pytest.approx(TILDE_CCDF_AT_395, rel=1e-9)

    def test_gb_is_composition(self):
        x = np.linspace(0.5, 398, 30)
        a, b1, b2, p, q = 1.5457, 398.8160, 27.4217, 0.6648, 2.7871
        assert np.array_equal(cdf(GB_ROW1, x), reg_inc_beta(seed_cdf(a, b1, b2, x), p, q))

    @pytest.mark.parametrize("spec", [MGB_ROW5, GB_ROW9, TILDE_ROW1])
    def test_finite_difference_matches_pdf(self, spec):
        x = np.linspace(0.02, 0.98, 25) * spec.beta1
        h = 1e-4 * x
        # five-point stencil keeps truncation error well below the tolerance
        fd = (-cdf(spec, x + 2 * h) + 8 * cdf(spec, x + h) - 8 * cdf(spec, x - h) + cdf(spec, x - 2 * h)) / (12 * h)
        dens = pdf(spec, x)
        keep = dens > 1e-8
        assert np.max(np.abs(fd[keep] / dens[keep] - 1)) <= 1e-6

    @pytest.mark.parametrize("family", FAMILIES)
    def test_monotone(self, family):
        spec = _random_spec(family, np.random.default_rng(7))
        top = spec.upper if math.isfinite(spec.upper) else float(quantile(spec, 0.999))
        vals = cdf(spec, np.linspace(0, top, 1000))
        assert np.all(np.diff(vals) >= 0)

    def test_mgb_variants_close(self):
        x = np.linspace(0, MGB_ROW1.beta1, 2001)
        assert np.max(np.abs(cdf(MGB_ROW1, x) - cdf(TILDE_ROW1, x))) < 0.002


class TestCcdf:
    @pytest.mark.parametrize("family", FAMILIES)
    def test_complementarity(self, family):
        spec = _random_spec(family, np.random.default_rng(11))
        top = spec.upper if math.isfinite(spec.upper) else float(quantile(spec, 0.999))
        x = np.linspace(0, top, 60)
        assert np.max(np.abs(cdf(spec, x) + ccdf(spec, x) - 1)) <= 1e-9

    def test_at_origin(self):
        assert ccdf(GB_ROW1, 0.0) == 1.0

    def test_gb_direct_form(self):
        x = np.linspace(5, 200, 20)
        a, b1, b2, p, q = 1.5457, 398.8160, 27.4217, 0.6648, 2.7871
        direct = reg_inc_beta((1 - (x / b1) ** a) / (1 + (x / b2) ** a), q, p)
        assert ccdf(GB_ROW1, x) == pytest.approx(direct, rel=1e-12)
        assert ccdf(GB_ROW1, x) == pytest.approx(1 - cdf(GB_ROW1, x), rel=1e-10)

    def test_far_tail_matches_asymptote(self):
        b1, a = GB_ROW1.beta1, GB_ROW1.alpha
        x = b1 * (1 - 5e-4) ** (1 / a)
        assert ccdf(GB_ROW1, x) == pytest.approx(ccdf_near_beta1(GB_ROW1, x), rel=0.05)

    def test_far_tail_keeps_precision(self):
        # 1 - cdf would be pure rounding noise here
        x = GB_ROW1.beta1 * (1 - 1e-9)
        assert 0 < ccdf(GB_ROW1, x) < 1e-20


class TestQuantileAndSample:
    def test_endpoints(self):
        assert quantile(GB_ROW1, 0.0) == 0.0
        assert quantile(GB_ROW1, 1.0) == GB_ROW1.beta1

    @pytest.mark.parametrize("family", FAMILIES)
    def test_round_trip(self, family):
        spec = _random_spec(family, np.random.default_rng(3))
        u = np.linspace(0.001, 0.999, 41)
        assert np.max(np.abs(cdf(spec, quantile(spec, u)) - u)) <= 1e-10

    def test_domain(self):
        with pytest.raises(DomainError):
            quantile(GB_ROW1, 1.5)

    def test_deterministic(self):
        assert np.array_equal(sample(MGB_ROW1, 50, 9), sample(MGB_ROW1, 50, 9))

    def test_count_validation(self):
        with pytest.raises(DomainError):
            sample(GB_ROW1, 0, 1)

    @pytest.mark.parametrize("spec", [GB_ROW1, MGB_ROW1])
    def test_ks_self_test(self, spec):
        x = np.sort(sample(spec, 100_000, 2024))
        n = x.size
        F = cdf(spec, x)
        ks = max(np.max(np.arange(1, n + 1) / n - F), np.max(F - np.arange(n) / n))
        assert ks < 1.36 / math.sqrt(n)
        assert np.all((x >= 0) & (x <= spec.beta1))


class TestNormalization:
    @pytest.mark.parametrize("family", FAMILIES)
    def test_unit_mass(self, family):
        rng = np.random.default_rng(FAMILIES.index(family))
        for _ in range(20):
            spec = _random_spec(family, rng)
            assert _total_mass(spec) == pytest.approx(1.0, abs=1e-8), spec


class TestHierarchy:
    def test_gb_to_gb2_numerically(self):
        spec = DistSpec("GB", alpha=1.8, beta1=1e6 * 3.0, beta2=3.0, p=1.2, q=2.0)
        limit = hierarchy_limit(spec, "GB2")
        x = np.geomspace(0.3, 30, 15)
        assert pdf(spec, x) == pytest.approx(pdf(limit, x), rel=1e-4)

    def test_gb_unit_alpha_to_b(self):
        spec = DistSpec("GB", alpha=1.0, beta1=8.0, beta2=2.0, p=1.2, q=2.0)
        assert hierarchy_limit(spec, "B") == DistSpec("B", beta1=8.0, beta2=2.0, p=1.2, q=2.0)
        with pytest.raises(DomainError):
            hierarchy_limit(GB_ROW1, "B")

    def test_gb1_to_gga_convergence(self):
        target = DistSpec("GGa", alpha=1.5, beta=2.0, p=1.7)
        x = np.linspace(0.2, 8, 12)
        errs = []
        for q in (1e2, 1e3, 1e4):
            gb1 = DistSpec("GB1", alpha=1.5, beta1=2.0 * q ** (1 / 1.5), p=1.7, q=q)
            lim = hierarchy_limit(gb1, "GGa")
            assert lim.beta == pytest.approx(2.0) and lim.p == 1.7
            errs.append(np.max(np.abs(pdf(gb1, x) - pdf(target, x))))
        assert errs[0] > errs[1] > errs[2]
        assert errs[2] < 1e-3

    def test_gb2_to_giga_convergence(self):
        x = np.linspace(0.5, 10, 12)
        target = DistSpec("GIGa", alpha=1.3, beta=2.0, q=2.5)
        errs = []
        for p in (1e2, 1e3, 1e4):
            gb2 = DistSpec("GB2", alpha=1.3, beta2=2.0 / p ** (1 / 1.3), p=p, q=2.5)
            assert hierarchy_limit(gb2, "GIGa").beta == pytest.approx(2.0)
            errs.append(np.max(np.abs(pdf(gb2, x) - pdf(target, x))))
        assert errs[0] > errs[1] > errs[2]
        assert errs[2] < 1e-3

    def test_modified_second_kind_uses_q_plus_one(self):
        spec = DistSpec("mGB2", alpha=2.0, beta2=3.0, p=1.0, q=0.5)
        assert hierarchy_limit(spec, "GIGa").q == 1.5

    def test_tilde_reductions(self):
        assert hierarchy_limit(TILDE_ROW1, "mGB2").q == TILDE_ROW1.q
        gb1 = hierarchy_limit(TILDE_ROW1, "GB1")
        assert gb1.q == pytest.approx(TILDE_ROW1.q - 1 / TILDE_ROW1.alpha + 1)

    def test_unreachable(self):
        with pytest.raises(DomainError):
            hierarchy_limit(DistSpec("GGa", alpha=1, beta=1, p=1), "GB")
        with pytest.raises(DomainError):
            hierarchy_limit(GB_ROW1, "GIGa")


class TestTails:
    def test_row1_product(self):
        # 1.5457 * 2.7871 = 4.30802
        assert tail_exponent(GB_ROW1).ccdf == pytest.approx(-4.30802, abs=5e-6)
        assert tail_exponent(GB_ROW1).pdf == pytest.approx(-5.30802, abs=5e-6)

    def test_unit_case(self):
        spec = DistSpec("GB", alpha=1.0, beta1=1000.0, beta2=1.0, p=1.0, q=1.0)
        assert tail_exponent(spec).ccdf == -1.0

    def test_modified_members_gain_one(self):
        assert tail_exponent(MGB_ROW1).ccdf == pytest.approx(-1.55 * 2.7828)

    def test_regime_enforced(self):
        with pytest.raises(DomainError):
            tail_exponent(DistSpec("GB", alpha=1, beta1=5, beta2=1, p=1, q=1))

    @pytest.mark.parametrize("spec", [GB_ROW1, GB_ROW9])
    def test_regression_slope(self, spec):
        lo, hi = power_law_window(spec)
        x = np.geomspace(lo, hi, 60)
        slope = np.polyfit(np.log(x), np.log(ccdf(spec, x)), 1)[0]
        expected = tail_exponent(spec).ccdf
        assert abs(slope / expected - 1) < 0.05


class TestNearBeta1:
    def test_ratio(self):
        spec = DistSpec("GB", alpha=2.0, beta1=100.0, beta2=5.0, p=1.3, q=0.8)
        x = 99.9
        ratio = ccdf_near_beta1(spec, x, variant="mGB") / ccdf_near_beta1(spec, x, variant="GB")
        assert ratio == pytest.approx((1 + 1.3 / 0.8) * (5.0 / 100.0) ** 2, rel=1e-13)

    def test_exact_vs_asymptote_row9(self):
        b1, a = GB_ROW9.beta1, GB_ROW9.alpha
        x = b1 * (1 - 1e-4) ** (1 / a)
        assert ccdf_near_beta1(GB_ROW9, x) == pytest.approx(ccdf(GB_ROW9, x), rel=0.05)

    def test_mgb_asymptote(self):
        b1, a = MGB_ROW1.beta1, MGB_ROW1.alpha
        x = b1 * (1 - 1e-5) ** (1 / a)
        assert ccdf_near_beta1(MGB_ROW1, x) == pytest.approx(ccdf(MGB_ROW1, x), rel=0.05)

    def test_vanishes_at_beta1(self):
        for variant in ("GB", "mGB"):
            assert ccdf_near_beta1(GB_ROW1, GB_ROW1.beta1, variant=variant) == 0.0

    def test_window(self):
        with pytest.raises(DomainError):
            ccdf_near_beta1(GB_ROW1, 300.0)
        assert ccdf_near_beta1(GB_ROW1, 300.0, window=0.3) > 0


@settings(max_examples=40, deadline=None)
@given(st.floats(0.5, 3.0), st.floats(0.3, 4.0), st.floats(0.3, 4.0), st.floats(0.01, 0.99))
def test_gb_pdf_forms_agree(alpha, p, q, frac):
    spec = DistSpec("GB", alpha=alpha, beta1=50.0, beta2=4.0, p=p, q=q)
    x = frac * 50.0
    assert pdf_alt(spec, x) == pytest.approx(pdf(spec, x), rel=1e-10)


def test_ln_beta_consistency_for_unit_b():
    # B(1, 1) member with equal scales is the density 2 / (beta (1 + x/beta)^2) on [0, beta]
    spec = DistSpec("B", beta1=3.0, beta2=3.0, p=1.0, q=1.0)
    assert ln_beta(1.0, 1.0) == 0.0
    assert pdf(spec, 1.5) == pytest.approx(2 / 3 / 1.5**2)

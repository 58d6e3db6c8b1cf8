#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "stf/kernel.hpp"

using namespace stf;
using kernel::KernelKind;

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;

double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(1e-300, std::abs(want));
}

EquationParams heat() { return {2.0, 1.0, 0.0, 2.0, 1, std::nullopt}; }
}  // namespace

TEST_CASE("fourier kernel symbols") {
    // heat symbol e^{-t r^2} at t = r = 1
    CHECK(rel_err(kernel::fourier_kernel(KernelKind::Y, heat(), 1.0, 1.0), std::exp(-1.0)) < 1e-13);
    // r = 0 gives t^{beta+gamma-1}/Gamma(beta+gamma)
    EquationParams p{1.3, 0.7, 0.4, 1.5, 2, std::nullopt};
    CHECK(rel_err(kernel::fourier_kernel(KernelKind::Y, p, 2.0, 0.0),
                  std::pow(2.0, 0.1) / specfun::gamma(1.1)) < 1e-13);
    // wave Zstar at r = pi: E_{2,2}(-pi^2) = sin(pi)/pi = 0
    EquationParams w{2.0, 2.0, 0.0, 2.0, 1, std::nullopt};
    CHECK(std::abs(kernel::fourier_kernel(KernelKind::Zstar, w, 1.0, kPi)) < 1e-14);
    CHECK_THROWS_AS(kernel::fourier_kernel(KernelKind::Zstar, heat(), 1.0, 1.0), std::domain_error);
}

TEST_CASE("green function reproduces the Gaussian heat kernel") {
    for (double x : {0.0, 0.5, 1.0, 2.5}) {
        const double want = std::exp(-x * x / 4.0) / std::sqrt(4.0 * kPi);
        CHECK(rel_err(kernel::green_function(heat(), 1.0, x), want) < 1e-8);
    }
    // radial symmetry
    CHECK(kernel::green_function(heat(), 1.0, 1.25) ==
          doctest::Approx(kernel::green_function(heat(), 1.0, -1.25)).epsilon(1e-14));
}

TEST_CASE("green function scaling property") {
    // G(r s, r^{beta/alpha} y) = r^{beta+gamma-1-d beta/alpha} G(s, y)
    const std::vector<EquationParams> grid = {
        {2.0, 1.0, 0.0, 2.0, 1, std::nullopt},
        {1.0, 0.5, 0.5, 2.0, 1, std::nullopt},
        {3.0, 1.5, 0.0, 2.0, 1, std::nullopt},
    };
    for (const auto& p : grid) {
        for (double r : {2.0, 4.0}) {
            for (double y : {0.4, 1.1}) {
                const double s = 0.8;
                const double lhs =
                    kernel::green_function(p, r * s, std::pow(r, p.beta / p.alpha) * y, {0.0, 1e-8, 4000});
                const double rhs =
                    std::pow(r, p.beta + p.gamma - 1.0 - p.d * p.beta / p.alpha) *
                    kernel::green_function(p, s, y, {0.0, 1e-8, 4000});
                CHECK(rel_err(lhs, rhs) < 1e-6);
            }
        }
    }
}

TEST_CASE("green function for d=3 matches the 3-d Gaussian") {
    EquationParams p{2.0, 1.0, 0.0, 2.0, 3, std::nullopt};
    for (double x : {0.5, 1.5}) {
        const double want = std::exp(-x * x / 4.0) / std::pow(4.0 * kPi, 1.5);
        CHECK(rel_err(kernel::green_function(p, 1.0, x, {0.0, 1e-9, 4000}), want) < 1e-7);
    }
}

TEST_CASE("origin expansion generic regime") {
    // alpha = sqrt(2), beta = 1, gamma = 0: the whole second series vanishes
    EquationParams p{std::sqrt(2.0), 1.0, 0.0, 2.0, 1, std::nullopt};
    const auto e = kernel::origin_expansion(p, 10);
    CHECK(e.regime == kernel::OriginRegime::Generic);
    for (const auto& t : e.terms) {
        if (std::abs(t.exponent - std::round(t.exponent)) < 1e-9)  // second-series slots
            CHECK(t.coefficient == 0.0);
        CHECK(t.log_power == 0);
    }
    // gamma = 0, beta != 1: only h2_0 vanishes
    EquationParams p2{std::sqrt(2.0), 0.7, 0.0, 2.0, 1, std::nullopt};
    const auto e2 = kernel::origin_expansion(p2, 12);
    bool seen_h2_1 = false;
    for (const auto& t : e2.terms) {
        if (std::abs(t.exponent - 1.0) < 1e-9) CHECK(t.coefficient == 0.0);
        if (std::abs(t.exponent - 2.0) < 1e-9) {
            CHECK(t.coefficient != 0.0);
            seen_h2_1 = true;
        }
    }
    CHECK(seen_h2_1);
}

TEST_CASE("origin expansion arithmetic regime with log term") {
    // alpha = 1, d = 1, beta = 1/2, gamma = 1/2: (l1*, l2*) = (0,0),
    // log coefficient -1/(Gamma(3/2) Gamma(1/2)) = -2/pi
    EquationParams p{1.0, 0.5, 0.5, 2.0, 1, Rational{1, 1}};
    const auto e = kernel::origin_expansion(p, 8);
    CHECK(e.regime == kernel::OriginRegime::Arithmetic);
    CHECK(e.ell1_star == 0);
    CHECK(e.ell2_star == 0);
    CHECK_FALSE(e.detection_by_tolerance);
    bool found_log = false;
    for (const auto& t : e.terms) {
        if (t.log_power == 1) {
            found_log = true;
            CHECK(t.exponent == doctest::Approx(1.0));
            CHECK(rel_err(t.coefficient, -2.0 / kPi) < 1e-13);
        }
    }
    CHECK(found_log);
    // excluded indices: L1 = {(2l+1)r-... } for odd d only odd multiples
    // with l1*=0, d=1: L1 = {(r-1)/2 : r odd} = {0,1,2,...} every l with 2l+1 odd => all
    CHECK(!e.excluded_l1.empty());
    // same detection without the exact ratio, flagged as tolerance-based
    EquationParams pf = p;
    pf.alpha_ratio.reset();
    const auto ef = kernel::origin_expansion(pf, 8);
    CHECK(ef.regime == kernel::OriginRegime::Arithmetic);
    CHECK(ef.detection_by_tolerance);
}

TEST_CASE("origin expansion partial sums approach quadrature G") {
    // generic: error decreases with z and the log term improves the arithmetic fit
    EquationParams p{std::sqrt(2.0), 1.0, 0.0, 2.0, 1, std::nullopt};
    const auto e = kernel::origin_expansion(p, 12);
    double prev = 1e300;
    for (double x : {0.6, 0.3, 0.15}) {
        const double g = kernel::green_function(p, 1.0, x, {0.0, 1e-9, 4000});
        const double approx = kernel::green_origin_approx(p, e, x);
        const double err = std::abs(g - approx) / std::abs(g);
        CHECK(err < prev);
        prev = err;
    }
    CHECK(prev < 1e-6);
}

TEST_CASE("infinity asymptote classification and constants") {
    // Gaussian case: Theta_{2,2} = 1/4 exactly, prefactor (4 pi)^{-1/2}
    const auto a2 = kernel::infinity_asymptote(heat());
    CHECK(a2.form == kernel::AsymptoteForm::StretchedExp);
    CHECK(rel_err(a2.theta22, 0.25) < 1e-13);
    CHECK(rel_err(a2.theta21, 1.0 / std::sqrt(4.0 * kPi)) < 1e-13);
    CHECK(a2.rate_exponent == doctest::Approx(2.0));

    // power law alpha = 1, beta = 1/2, nu = 2: Theta_1 = 1/pi
    EquationParams p1{1.0, 0.5, 0.0, 2.0, 1, std::nullopt};
    const auto a1 = kernel::infinity_asymptote(p1);
    CHECK(a1.form == kernel::AsymptoteForm::PowerLaw);
    CHECK(rel_err(a1.theta1, 1.0 / kPi) < 1e-13);

    // oscillatory alpha = 4, beta = 1: theta_{4,1} = pi/6
    EquationParams p4{4.0, 1.0, 0.0, 2.0, 1, std::nullopt};
    const auto a4 = kernel::infinity_asymptote(p4);
    CHECK(a4.form == kernel::AsymptoteForm::OscillatoryExp);
    CHECK(rel_err(a4.theta_ab, kPi / 6.0) < 1e-13);
    CHECK(a4.theta33 * std::sin(a4.theta_ab) > 0.0);

    CHECK_THROWS_AS(kernel::infinity_asymptote({2.0, 2.0, 0.0, 2.0, 1, std::nullopt}),
                    std::domain_error);
}

TEST_CASE("power-law asymptote matches quadrature at large x") {
    EquationParams p{1.0, 0.5, 0.0, 2.0, 1, std::nullopt};
    const auto a = kernel::infinity_asymptote(p);
    double prev_drift = 1e300;
    for (double x : {20.0, 40.0}) {
        const double g = kernel::green_function(p, 1.0, x, {0.0, 1e-8, 4000});
        const double ratio = g / a.eval(x);
        const double drift = std::abs(ratio - 1.0);
        CHECK(drift < prev_drift);
        prev_drift = drift;
    }
    CHECK(prev_drift < 0.05);
}

TEST_CASE("oscillatory asymptote tracks quadrature for alpha = 4") {
    EquationParams p{4.0, 1.0, 0.0, 2.0, 1, std::nullopt};
    const auto a = kernel::infinity_asymptote(p);
    // compare at moderately large x where the quadrature stays cheap
    for (double x : {6.0, 8.0}) {
        const double g = kernel::green_function(p, 1.0, x, {0.0, 1e-8, 4000});
        const double approx = a.eval(x);
        CHECK(std::abs(g - approx) < 0.15 * std::abs(g) + 1e-12);
    }
}

TEST_CASE("fox H parameters") {
    // delta = (alpha/2)^alpha beta^{-beta}; delta(2,2) = 1/4 is cross-checked
    // by the convergence radius of the alpha = beta origin series.
    EquationParams p22{2.0, 2.0, 0.0, 2.0, 1, std::nullopt};
    const auto f = kernel::fox_h_parameters(p22);
    CHECK(f.delta == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(f.a_star == doctest::Approx(0.0));
    for (double beta : {0.5, 1.0, 1.7}) {
        EquationParams p{2.0, beta, 0.3, 1.0, 2, std::nullopt};
        CHECK(rel_err(kernel::fox_h_parameters(p).delta, std::pow(beta, -beta)) < 1e-13);
        CHECK(kernel::fox_h_parameters(p).a_star == doctest::Approx(2.0 - beta));
        CHECK(kernel::fox_h_parameters(p).a1_star == doctest::Approx(2.0 - beta));
        CHECK(kernel::fox_h_parameters(p).mu == doctest::Approx(1.5 - beta - 0.3));
    }
    // support probe: G stays nonzero far out for a small parameter grid
    for (const auto& p : {EquationParams{1.5, 0.8, 0.2, 2.0, 1, std::nullopt},
                          EquationParams{2.5, 1.2, 0.0, 1.0, 1, std::nullopt}}) {
        CHECK(std::abs(kernel::green_function(p, 1.0, 12.0, {0.0, 1e-7, 4000})) > 0.0);
    }
}

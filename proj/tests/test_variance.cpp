#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "stf/special_functions.hpp"
#include "stf/quadrature.hpp"
#include "stf/variance.hpp"

using namespace stf;
using namespace stf::variance;

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;

double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(1e-300, std::abs(want));
}

EquationParams eq(double a, double b, double g, double nu = 2.0, int d = 1) {
    return {a, b, g, nu, d, std::nullopt};
}
}  // namespace

TEST_CASE("K constant closed forms at the documented points") {
    // wave with ell = alpha/2: K = pi^2
    const auto k2 = k_constant(eq(2, 2, 0), {0.5, 1.0});
    CHECK(k2.case_tag == KCase::K2);
    CHECK(rel_err(k2.value, kPi * kPi) < 1e-13);
    // heat with white noise: K = 2^{3/2} pi^{3/2}
    const auto kp1 = k_constant(eq(2, 1, 0), {0.5, 1.0});
    CHECK(kp1.case_tag == KCase::KPlus1);
    CHECK(rel_err(kp1.value, 15.74960994572242) < 1e-13);
    CHECK_THROWS_AS(k_constant(eq(2, 2, 0), {0.5, 2.0}), RegimeError);
}

TEST_CASE("K constant closed forms match the quadrature oracle") {
    QuadratureSpec q;
    q.rel_tol = 3e-8;
    struct Probe {
        EquationParams p;
        NoiseParams n;
        KCase tag;
    };
    const std::vector<Probe> probes = {
        {eq(2, 1, 0, 2.0), {0.5, 1.0}, KCase::KPlus1},
        {eq(1.5, 1, 0, 3.0), {0.5, 0.8}, KCase::KPlus1},
        {eq(2, 1, 0, 1.0), {0.8, 1.5}, KCase::K0},
        {eq(1.2, 1, 0, 2.5), {0.66, 0.9}, KCase::K0},
        {eq(2, 2, 0, 2.0), {0.5, 0.8}, KCase::K1},
        {eq(2, 2, 0, 5.0), {0.5, 0.8}, KCase::K1},
        {eq(3, 2, 0, 1.0), {0.5, 1.2}, KCase::K1},
        {eq(2, 2, 0, 5.0), {0.5, 1.0}, KCase::K2},
        {eq(2, 2, 0, 2.0), {0.75, 0.8}, KCase::K3},
        {eq(2, 2, 0, 0.7), {0.65, 1.7}, KCase::K3},
        {eq(2, 2, 0, 3.0), {0.75, 1.0}, KCase::K4},
        {eq(2, 2, 0, 3.0), {0.75, 2.0}, KCase::K5},
        {eq(1.5, 2, 0, 2.0), {0.8, 1.5}, KCase::K5},
    };
    for (const auto& probe : probes) {
        const auto closed = k_constant(probe.p, probe.n, KMethod::ClosedForm, q);
        const auto oracle = k_constant(probe.p, probe.n, KMethod::Quadrature, q);
        CAPTURE(probe.p.alpha);
        CAPTURE(probe.p.beta);
        CAPTURE(probe.n.H);
        CAPTURE(probe.n.ell);
        CHECK(closed.case_tag == probe.tag);
        CHECK(closed.value > 0.0);
        CHECK(rel_err(oracle.value, closed.value) < 1e-6);
    }
    // no closed form away from beta in {1,2}: quadrature fallback with flag
    const auto kq = k_constant(eq(2, 0.8, 0.3), {0.6, 1.0}, KMethod::Auto, q);
    CHECK(kq.method == KMethod::Quadrature);
    CHECK(kq.closed_form_unavailable);
    CHECK(kq.value > 0.0);
    CHECK_THROWS_AS(k_constant(eq(2, 0.8, 0.3), {0.6, 1.0}, KMethod::ClosedForm, q),
                    UnsupportedError);
}

TEST_CASE("K constant limit relations") {
    QuadratureSpec q;
    const double eps = 1e-5;
    // H -> 1/2 limits
    for (auto [p, n_lo] : {std::pair{eq(2, 1, 0), NoiseParams{0.5, 1.0}},
                           {eq(2, 2, 0), {0.5, 0.8}},
                           {eq(2, 2, 0), {0.5, 1.0}}}) {
        NoiseParams n_eps{0.5 + eps, n_lo.ell};
        const double at_half = k_constant(p, n_lo, KMethod::ClosedForm, q).value;
        const double near_half = k_constant(p, n_eps, KMethod::ClosedForm, q).value;
        CHECK(rel_err(near_half, at_half) < 1e-4);
    }
    // ell -> alpha/2 limit of K-3 toward K-4
    EquationParams p = eq(2, 2, 0);
    NoiseParams n{0.75, 1.0};
    const double k4 = k_constant(p, n, KMethod::ClosedForm, q).value;
    const double k3 = k_constant(p, {0.75, 1.0 + 1e-6}, KMethod::ClosedForm, q).value;
    CHECK(rel_err(k3, k4) < 1e-4);
    // ell -> alpha limit of K-3 toward K-5
    const double k5 = k_constant(p, {0.75, 2.0}, KMethod::ClosedForm, q).value;
    const double k3b = k_constant(p, {0.75, 2.0 - 1e-6}, KMethod::ClosedForm, q).value;
    CHECK(rel_err(k3b, k5) < 1e-4);
}

TEST_CASE("trigonometric integral F_theta") {
    CHECK(rel_err(trig_integral_F(-2.0, 2.0, 2.0), kPi) < 1e-14);
    CHECK(rel_err(trig_integral_F(-1.0, 1.0, 2.0), 0.5 * std::log(3.0)) < 1e-14);
    CHECK(rel_err(trig_integral_F(-1.5, 1.0, 1.0), std::sqrt(kPi)) < 1e-13);
    // closed form against the oscillatory oracle on the spec grid
    QuadratureSpec q;
    q.rel_tol = 1e-9;
    for (double theta : {-2.5, -2.0, -1.5, -1.0, -0.5}) {
        for (auto [s1, s2] : {std::pair{0.5, 1.5}, {1.0, 1.0}, {2.0, 3.0}, {0.3, 4.0}}) {
            if (s1 == s2 && theta >= -1.0) continue;
            const double cf = trig_integral_F(theta, s1, s2);
            const double oq = trig_integral_F(theta, s1, s2, FMethod::Quadrature, q);
            CAPTURE(theta);
            CAPTURE(s1);
            CAPTURE(s2);
            CHECK(rel_err(oq, cf) < 1e-6);
            if (s1 != s2) CHECK(cf >= 0.0);
        }
    }
    // divergence at the boundaries
    CHECK_THROWS_AS(trig_integral_F(-3.0, 1.0, 2.0), std::domain_error);
    CHECK_THROWS_AS(trig_integral_F(0.0, 1.0, 2.0), std::domain_error);
    CHECK_THROWS_AS(trig_integral_F(-1.0, 1.0, 1.0), std::domain_error);
}

TEST_CASE("oscillatory tail bound stays within a modest constant") {
    // |int_t^inf x^theta cos(x+zeta) dx| <= C t^theta with small empirical C
    QuadratureSpec q;
    double worst = 0.0;
    for (double theta : {-2.5, -1.7, -0.9, -0.3, -0.1}) {
        for (double t : {0.1, 1.0, 10.0, 100.0}) {
            for (double zeta : {0.0, 0.7, 2.1}) {
                auto f = [&](double x) { return std::pow(x, theta) * std::cos(x + zeta); };
                const int k0 = static_cast<int>(std::ceil((t + zeta) / kPi - 0.5));
                auto node = [&](int k) { return (k0 + k + 0.5) * kPi - zeta; };
                const double v = stf::quad::oscillatory_tail(f, t, node, 1e-9, 1e-13, 4000, &q);
                worst = std::max(worst, std::abs(v) / std::pow(t, theta));
            }
        }
    }
    CHECK(worst < 5.0);
}

TEST_CASE("ML product integral") {
    QuadratureSpec q;
    q.rel_tol = 1e-7;
    CHECK(rel_err(ml_product_integral(1, 1, 0.0, 1.0, 1.0, q), 0.5) < 1e-8);
    CHECK(rel_err(ml_product_integral(1, 1, -0.5, 1.0, 1.0, q), std::sqrt(kPi / 2.0)) < 1e-8);
    // frozen oscillatory oracle value for a = 2, b = 2.5
    QuadratureSpec qp;
    qp.rel_tol = 1e-7;
    const double v = ml_product_integral(2.0, 2.5, 0.2, 0.1, 1.0, qp);
    CHECK(rel_err(v, 4.190580446) < 1e-5);
    // bound shape of the a = 2 estimate: b < 2 + theta branch here
    const double b = 2.5, theta = 0.2, s1 = 0.1, s2 = 1.0;
    const double bound = std::pow(s1, b / 2 - theta - 1.5) * std::pow(s2, -(b - 1) / 2) +
                         std::pow(s1, -(b - 1) / 2) * std::pow(s2, -(b - 1) / 2) *
                             std::pow(std::sqrt(s2) - std::sqrt(s1), 2 * b - 2 * theta - 4);
    CHECK(v < 10.0 * bound);
    // log-gap of the generic bound is uniformly bounded over an s-grid
    double worst = -1e300;
    for (double ss1 : {0.2, 0.6, 1.0}) {
        for (double ss2 : {1.0, 2.0, 6.0}) {
            if (ss1 > ss2) continue;
            const double th = 0.4;
            const double val = ml_product_integral(1.4, 1.6, th, ss1, ss2, q);
            const double bd = std::pow(ss1, -th) * std::pow(ss2, -1.0);  // theta in (0,1)
            worst = std::max(worst, std::log(std::abs(val)) - std::log(bd));
        }
    }
    CHECK(worst < 3.0);
    CHECK_THROWS_AS(ml_product_integral(1, 1, 1.2, 1.0, 2.0, q), std::domain_error);
}

TEST_CASE("ML power-time integral") {
    QuadratureSpec q;
    // beta = 1, theta_b = 1, H = 1/2: int_0^t e^{-2w} dw
    for (double t : {0.5, 2.0})
        CHECK(rel_err(ml_power_time_integral(1.0, 1.0, 0.5, 1.0, t, q),
                      0.5 * (1.0 - std::exp(-2.0 * t))) < 1e-8);
    // lambda = 0 closed form
    const double tb = 1.2, H = 0.6, t = 2.0;
    const double closed = std::pow(t, (tb + H - 1.0) / H) * (H / (tb + H - 1.0)) *
                          std::pow(specfun::gamma(tb), -1.0 / H);
    CHECK(rel_err(ml_power_time_integral(0.8, tb, H, 0.0, t, q), closed) < 1e-8);
    // frozen oracle value and the bound ratio of the estimate
    const double v = ml_power_time_integral(0.8, 1.2, 0.6, 10.0, 2.0, q);
    CHECK(rel_err(v, 0.03348176637) < 1e-6);
    const double rhs = std::pow(t, (tb + H - 1) / H) /
                       (1.0 + std::pow(t * std::pow(10.0, 1.0 / 0.8),
                                       std::min(0.8 / H, (tb + H - 1.0) / H)));
    CHECK(v / rhs < 10.0);
    CHECK_THROWS_AS(ml_power_time_integral(0.8, 0.4, 0.5, 1.0, 1.0, q), std::domain_error);
}

TEST_CASE("generalized Balan N") {
    QuadratureSpec q;
    // eta = 0, H = 1/2, z^{alpha/2} t = 2 pi: N = pi t z^{-alpha} exactly
    const double alpha = 2.0;
    const double z = 4.0, t = 2.0 * kPi / std::pow(z, alpha / 2.0);
    const double n_val = balan_N(alpha, 0.0, 0.5, t, z, q);
    CHECK(rel_err(n_val, kPi * t * std::pow(z, -alpha)) < 1e-6);
    // sandwich: ratio against the closed comparison kernel stays in a band
    for (double H : {0.5, 0.75}) {
        for (double eta : {0.0, -kPi / 4.0}) {
            double lo = 1e300, hi = -1e300;
            for (double a = 0.5; a <= 100.0; a *= 1.9) {
                const double zz = std::pow(a, 2.0 / alpha);  // t = 1
                const double N = balan_N(alpha, eta, H, 1.0, zz, q);
                // N = t^4 A(t, t z^{a/2}); A is the quantity the kernel sandwiches
                const double A = N * std::pow(zz, 2.0 * alpha);
                const double ratio = A / balan_bound_kernel(H, 1.0, a);
                CHECK(ratio > 0.0);
                lo = std::min(lo, ratio);
                hi = std::max(hi, ratio);
            }
            CAPTURE(H);
            CAPTURE(eta);
            CHECK(hi / lo < 100.0);
        }
    }
}

TEST_CASE("increment variance basics") {
    QuadratureSpec q;
    q.rel_tol = 1e-7;
    EquationParams she = eq(2, 1, 0);
    NoiseParams wn{0.5, 1.0};
    CHECK(increment_variance(she, wn, {1.0, 0.0}, {1.0, 0.0}, Axis::Time, q) == 0.0);
    CHECK(increment_variance(she, wn, {1.0, 0.3}, {1.0, 0.3}, Axis::Space, q) == 0.0);
    // symmetry in the two points
    const double v1 = increment_variance(she, wn, {1.0, 0.0}, {1.25, 0.0}, Axis::Time, q);
    const double v2 = increment_variance(she, wn, {1.25, 0.0}, {1.0, 0.0}, Axis::Time, q);
    CHECK(rel_err(v1, v2) < 1e-12);
    CHECK(v1 > 0.0);
    CHECK_THROWS_AS(increment_variance(she, {0.5, 2.0}, {1.0, 0.0}, {1.5, 0.0}, Axis::Time, q),
                    RegimeError);
    // time increments over a short lag follow the 2 rho = 1/2 scaling locally
    const double d1 = increment_variance(she, wn, {1.0, 0.0}, {1.0 + 1.0 / 256, 0.0}, Axis::Time, q);
    const double d2 = increment_variance(she, wn, {1.0, 0.0}, {1.0 + 1.0 / 1024, 0.0}, Axis::Time, q);
    const double slope = std::log(d1 / d2) / std::log(4.0);
    CHECK(slope == doctest::Approx(0.5).epsilon(0.06));
    // spatial increments follow 2 rho_tilde = 1
    const double s1 = increment_variance(she, wn, {1.0, 0.0}, {1.0, 1.0 / 256}, Axis::Space, q);
    const double s2 = increment_variance(she, wn, {1.0, 0.0}, {1.0, 1.0 / 1024}, Axis::Space, q);
    const double sslope = std::log(s1 / s2) / std::log(4.0);
    CHECK(sslope == doctest::Approx(1.0).epsilon(0.06));
}

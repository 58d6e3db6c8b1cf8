#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "stf/quadrature.hpp"
#include "stf/special_functions.hpp"

using namespace stf;
using specfun::MLParams;

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;

double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(1e-300, std::abs(want));
}
}  // namespace

TEST_CASE("gamma classical values") {
    CHECK(rel_err(specfun::gamma(0.5), std::sqrt(kPi)) < 1e-14);
    CHECK(specfun::gamma(1.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(specfun::gamma(5.0) == doctest::Approx(24.0).epsilon(1e-14));
    CHECK_THROWS_AS(specfun::gamma(0.0), std::domain_error);
    CHECK_THROWS_AS(specfun::gamma(-3.0), std::domain_error);
}

TEST_CASE("reciprocal gamma vanishes at the poles") {
    CHECK(specfun::rgamma(0.0) == 0.0);
    CHECK(specfun::rgamma(-1.0) == 0.0);
    CHECK(specfun::rgamma(-7.0) == 0.0);
    CHECK(rel_err(specfun::rgamma(0.5), 1.0 / std::sqrt(kPi)) < 1e-14);
    CHECK(rel_err(specfun::rgamma(-0.5), 1.0 / (-2.0 * std::sqrt(kPi))) < 1e-13);
}

TEST_CASE("mittag-leffler closed-form families") {
    CHECK(rel_err(specfun::mittag_leffler({1, 1}, -2.0), std::exp(-2.0)) < 1e-14);
    CHECK(rel_err(specfun::mittag_leffler({0.7, 1.3}, 0.0), specfun::rgamma(1.3)) < 1e-14);
    // E_{2,3}(-4) = (1 - cos 2)/4
    CHECK(rel_err(specfun::mittag_leffler({2, 3}, -4.0), (1.0 - std::cos(2.0)) / 4.0) < 1e-14);
}

TEST_CASE("mittag-leffler a=1 family against the exact reduction") {
    // E_{1,2}(-x) = (1-e^{-x})/x, E_{1,3}(-x) = (e^{-x}-1+x)/x^2
    for (double x : {0.1, 1.0, 7.0, 42.0, 300.0}) {
        CHECK(rel_err(specfun::mittag_leffler({1, 2}, -x), -std::expm1(-x) / x) < 1e-13);
        CHECK(rel_err(specfun::mittag_leffler({1, 3}, -x), (std::expm1(-x) + x) / (x * x)) < 1e-12);
    }
}

TEST_CASE("mittag-leffler branch consistency across switch points") {
    // Taylor and the large-x expansion must agree on a window straddling the
    // switch; the integral branch referees in between.
    EvalTolerance tol;
    for (double a : {0.4, 0.6, 0.8, 1.5, 1.9, 2.0}) {
        for (double b : {0.7, 1.0, 2.2}) {
            const double xsw = specfun::detail::taylor_cancellation_limit(a, 1e-12);
            for (double f : {0.8, 1.0}) {
                const double x = xsw * f;
                const auto taylor = specfun::detail::ml_taylor(a, b, -x, tol);
                const auto integral = specfun::detail::ml_integral(a, b, x, tol);
                const double scale = std::max({std::abs(taylor.value), std::abs(integral.value), 1e-8});
                CHECK(std::abs(taylor.value - integral.value) / scale < 1e-8);
            }
            // asymptotic vs integral far out where the expansion self-reports ok
            const double xfar = std::max(2.0 * xsw, std::pow(35.0 / a, a));
            const auto asym = specfun::detail::ml_asymptotic(a, b, xfar, tol);
            const auto integral = specfun::detail::ml_integral(a, b, xfar, tol);
            const double scale = std::max({std::abs(asym.value), std::abs(integral.value), 1e-10});
            CHECK(std::abs(asym.value - integral.value) / scale < 1e-7);
        }
    }
}

TEST_CASE("mittag-leffler uniform decay bound") {
    // |E_{a,b}(-x)| (1+x) stays bounded for a in (0,2); for a = 2 and
    // b in [2,3) the weight is 1+x^{(b-1)/2}
    for (double a : {0.3, 0.7, 1.0, 1.3, 1.7}) {
        for (double b : {0.5, 1.0, 2.5, 4.0}) {
            double worst = 0.0;
            for (double lx = -2.0; lx <= 6.0; lx += 0.25) {
                const double x = std::pow(10.0, lx);
                const double e = specfun::mittag_leffler({a, b}, -x);
                worst = std::max(worst, std::abs(e) * (1.0 + x));
            }
            CHECK(worst < 100.0);
            CHECK(std::isfinite(worst));
        }
    }
    for (double b : {2.0, 2.5, 2.9}) {
        double worst = 0.0;
        for (double lx = -2.0; lx <= 6.0; lx += 0.25) {
            const double x = std::pow(10.0, lx);
            const double e = specfun::mittag_leffler({2.0, b}, -x);
            worst = std::max(worst, std::abs(e) * (1.0 + std::pow(x, (b - 1.0) / 2.0)));
        }
        CHECK(worst < 100.0);
    }
}

TEST_CASE("mittag-leffler derivative identity") {
    // d/dx [x^{b-1} E_{a,b}(l x^a)] = x^{b-2} E_{a,b-1}(l x^a)
    const double h = 1e-5;
    for (double a : {0.6, 1.0, 1.4, 2.0}) {
        for (double b : {1.5, 2.5}) {
            for (double lam : {-0.5, -2.0}) {
                for (double x : {0.7, 1.8}) {
                    auto f = [&](double u) {
                        return std::pow(u, b - 1.0) *
                               specfun::mittag_leffler({a, b}, lam * std::pow(u, a));
                    };
                    const double num = (f(x + h) - f(x - h)) / (2.0 * h);
                    const double ref = std::pow(x, b - 2.0) *
                                       specfun::mittag_leffler({a, b - 1.0}, lam * std::pow(x, a));
                    CHECK(rel_err(num, ref) < 1e-5);
                }
            }
        }
    }
}

TEST_CASE("mittag-leffler rejects unsupported index") {
    CHECK_THROWS_AS(specfun::mittag_leffler({2.5, 1.0}, -1.0), UnsupportedError);
    CHECK_THROWS_AS(specfun::mittag_leffler({-1.0, 1.0}, -1.0), std::domain_error);
}

TEST_CASE("hyp2f1 special values") {
    // 2F1(1,b;1;-1) = 2^{-b}
    for (double b : {0.1, 0.3, 0.5, 0.7, 0.9})
        CHECK(rel_err(specfun::hyp2f1(1.0, b, 1.0, -1.0), std::pow(2.0, -b)) < 1e-12);
    // 2F1(1,-1;2H;-1) = (1+2H)/(2H), truncating case
    for (double H : {0.5, 0.55, 0.75, 0.95}) {
        CHECK(rel_err(specfun::hyp2f1(1.0, -1.0, 2.0 * H, -1.0), (1.0 + 2.0 * H) / (2.0 * H)) <
              1e-14);
    }
    CHECK(specfun::hyp2f1(0.3, 0.9, 1.7, 0.0) == 1.0);
}

TEST_CASE("hyp2f1 against the Euler integral") {
    // c > b > 0: Gamma(c)/(Gamma(b)Gamma(c-b)) int_0^1 t^{b-1}(1-t)^{c-b-1}(1-zt)^{-a}
    for (double z : {-5.0, -2.0, -1.0, -0.3}) {
        for (auto [a, b, c] : {std::tuple{1.0, 0.5, 2.0}, {0.7, 1.2, 2.9}, {2.0, 0.4, 1.1}}) {
            auto f = [&, a = a, b = b, c = c](double t) {
                return std::pow(t, b - 1.0) * std::pow(1.0 - t, c - b - 1.0) *
                       std::pow(1.0 - z * t, -a);
            };
            // endpoint substitutions to tame the power singularities
            auto left = [&, b = b](double u) {
                const double t = std::pow(u, 1.0 / b);
                return f(t) * std::pow(u, 1.0 / b - 1.0) / b;
            };
            const double cb = c - b;
            auto right = [&, cb = cb](double u) {
                const double t = 1.0 - std::pow(u, 1.0 / cb);
                return f(t) * std::pow(u, 1.0 / cb - 1.0) / cb;
            };
            const double mid = 0.5;
            const double i1 = quad::adaptive(left, 0.0, std::pow(mid, b), 1e-11, 0.0, 4000);
            const double i2 = quad::adaptive(right, 0.0, std::pow(mid, cb), 1e-11, 0.0, 4000);
            const double euler =
                specfun::gamma(c) / (specfun::gamma(b) * specfun::gamma(cb)) * (i1 + i2);
            CHECK(rel_err(specfun::hyp2f1(a, b, c, z), euler) < 1e-8);
        }
    }
}

TEST_CASE("log kernel integral") {
    // frozen against adaptive quadrature of the integrand with endpoint splitting
    CHECK(rel_err(specfun::log_kernel_integral(0.75, 1.0), 4.9858019211218441) < 1e-12);
    // oracle at another H
    const double H = 0.62, t = 1.0;
    auto f = [&](double u) { return std::pow(u, 2.0 * H - 2.0) * std::log((2.0 * t - u) / u); };
    // u = (t-s); substitution u = v^{1/(2H-1)} at the endpoint
    const double p = 1.0 / (2.0 * H - 1.0);
    auto g = [&](double v) {
        const double u = std::pow(v, p);
        return f(u) * p * std::pow(v, p - 1.0);
    };
    const double oracle = quad::adaptive(g, 0.0, std::pow(t, 1.0 / p), 1e-11, 0.0, 6000);
    CHECK(rel_err(specfun::log_kernel_integral(H, t), oracle) < 1e-8);
    // scaling in t
    CHECK(rel_err(specfun::log_kernel_integral(0.8, 3.0),
                  std::pow(3.0, 0.6) * specfun::log_kernel_integral(0.8, 1.0)) < 1e-12);
    // pole signalling
    CHECK(std::isinf(specfun::log_kernel_integral(0.5 + 1e-9, 1.0)));
    CHECK_THROWS_AS(specfun::log_kernel_integral(0.4, 1.0), std::domain_error);
    CHECK_THROWS_AS(specfun::log_kernel_integral(1.0, 1.0), std::domain_error);
}

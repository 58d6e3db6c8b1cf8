#include "stf/kernel.hpp"

#include <algorithm>
#include <cmath>

#include "stf/quadrature.hpp"

namespace stf::kernel {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

using specfun::MLParams;
using specfun::rgamma;

double symbol_scale(const EquationParams& p, double t) { return 0.5 * p.nu * std::pow(t, p.beta); }

}  // namespace

double fourier_kernel(KernelKind kind, const EquationParams& p, double t, double r) {
    p.validate();
    if (!(t > 0.0)) throw std::domain_error("fourier_kernel: t must be positive");
    if (!(r >= 0.0)) throw std::domain_error("fourier_kernel: r must be nonnegative");
    const double arg = -symbol_scale(p, t) * std::pow(r, p.alpha);
    switch (kind) {
        case KernelKind::Y:
            return std::pow(t, p.beta + p.gamma - 1.0) *
                   specfun::mittag_leffler({p.beta, p.beta + p.gamma}, arg);
        case KernelKind::Z: {
            const double ceil_b = std::ceil(p.beta);
            return std::pow(t, ceil_b - 1.0) * specfun::mittag_leffler({p.beta, ceil_b}, arg);
        }
        case KernelKind::Zstar:
            if (!(p.beta > 1.0))
                throw std::domain_error("fourier_kernel: Zstar requires beta in (1, 2]");
            return t * specfun::mittag_leffler({p.beta, 2.0}, arg);
    }
    throw std::invalid_argument("fourier_kernel: unknown kind");
}

double green_function(const EquationParams& p, double t, double r, const EvalTolerance& tol) {
    p.validate();
    tol.validate();
    if (p.d != 1 && p.d != 3)
        throw UnsupportedError("green_function: physical-space evaluation restricted to d in {1,3}");
    if (!(p.beta < 2.0))
        throw UnsupportedError("green_function: physical-space kernel requires beta < 2");
    if (!(t > 0.0)) throw std::domain_error("green_function: t must be positive");
    r = std::abs(r);

    const double scale = symbol_scale(p, t);
    const double tpow = std::pow(t, p.beta + p.gamma - 1.0);
    const auto& ml = specfun::MLInterpolant::get(p.beta, p.beta + p.gamma);

    auto symbol = [&](double xi) { return ml(scale * std::pow(xi, p.alpha)); };

    const double rel = std::max(tol.rel_tol, 1e-12);
    if (r == 0.0) {
        if (p.alpha <= p.d)
            throw std::domain_error("green_function: G(t,0) diverges for alpha <= d");
        if (p.d == 1) {
            const double v = quad::to_infinity(symbol, 0.0, rel * 0.5, 0.0, 8000);
            return tpow * v / kPi;
        }
        auto f3 = [&](double xi) { return xi * xi * symbol(xi); };
        const double v = quad::to_infinity(f3, 0.0, rel * 0.5, 0.0, 8000);
        return tpow * v / (2.0 * kPi * kPi);
    }

    if (p.d == 1) {
        auto f = [&](double xi) { return symbol(xi) * std::cos(xi * r); };
        auto node = [&](int k) { return (k + 0.5) * kPi / r; };
        const double v = quad::oscillatory(f, 0.0, node, rel, 0.0, 6000);
        return tpow * v / kPi;
    }
    auto f = [&](double xi) { return xi * symbol(xi) * std::sin(xi * r); };
    auto node = [&](int k) { return (k + 1.0) * kPi / r; };
    const double v = quad::oscillatory(f, 0.0, node, rel, 0.0, 6000);
    return tpow * v / (2.0 * kPi * kPi * r);
}

// -- origin expansion --------------------------------------------------------

namespace {

// first-series coefficient h*_{1,l}
double h1_coefficient(const EquationParams& p, long long l) {
    const double sgn = (l % 2 == 0) ? 1.0 : -1.0;
    const double csc = 1.0 / std::sin((p.d + 2.0 * l) * kPi / p.alpha);
    const double denom = p.alpha * std::tgamma(static_cast<double>(l) + 1.0) *
                         std::tgamma(l + p.d / 2.0);
    const double rg = rgamma(p.beta + p.gamma - (p.d + 2.0 * l) * p.beta / p.alpha);
    return 2.0 * sgn * kPi * csc / denom * rg;
}

// second-series coefficient h*_{2,l}
double h2_coefficient(const EquationParams& p, long long l) {
    const double sgn = (l % 2 == 0) ? 1.0 : -1.0;
    const double num_arg = (p.d - (l + 1.0) * p.alpha) / 2.0;
    if (num_arg <= 0.5 && nearly_integer(num_arg))
        throw std::domain_error("origin_expansion: coefficient pole escaped arithmetic detection");
    const double num = std::tgamma(num_arg);
    return sgn * num * rgamma((l + 1.0) * p.alpha / 2.0) * rgamma(p.gamma - l * p.beta);
}

struct ArithmeticHit {
    bool found = false;
    long long ell1 = -1;
    long long ell2 = -1;
    bool by_tolerance = false;
};

ArithmeticHit detect_arithmetic(const EquationParams& p, long long ell2_bound) {
    ArithmeticHit hit;
    for (long long l2 = 0; l2 <= ell2_bound; ++l2) {
        if (p.alpha_ratio) {
            const long long num = p.alpha_ratio->num * (l2 + 1) - static_cast<long long>(p.d) * p.alpha_ratio->den;
            if (num >= 0 && num % p.alpha_ratio->den == 0 && (num / p.alpha_ratio->den) % 2 == 0) {
                hit = {true, num / p.alpha_ratio->den / 2, l2, false};
                return hit;
            }
        } else {
            const double v = p.alpha * (l2 + 1) - p.d;
            const double half = v / 2.0;
            if (half > -1e-9 && nearly_integer(half, 1e-12)) {
                hit = {true, std::llround(std::max(half, 0.0)), l2, true};
                return hit;
            }
        }
    }
    return hit;
}

// admissible multipliers r: all of N for even d, odd r only for odd d
bool admissible_r(long long r, int d) { return r >= 1 && (d % 2 == 0 || r % 2 == 1); }

bool in_l1(long long l, long long ell1_star, int d) {
    // l = ((2 l1* + d) r - d)/2 for admissible r
    const long long base = 2 * ell1_star + d;
    const long long num = 2 * l + d;
    if (num % base != 0) return false;
    return admissible_r(num / base, d);
}

bool in_l2(long long l, long long ell2_star, int d) {
    const long long base = ell2_star + 1;
    if ((l + 1) % base != 0) return false;
    return admissible_r((l + 1) / base, d);
}

}  // namespace

OriginExpansion origin_expansion(const EquationParams& p, int n_terms) {
    p.validate();
    if (!(p.beta < 2.0))
        throw UnsupportedError("origin_expansion: expansion requires beta in (0, 2)");
    if (n_terms < 1) throw std::domain_error("origin_expansion: n_terms must be positive");

    OriginExpansion out;
    const long long bound = n_terms + 4;
    const ArithmeticHit hit = detect_arithmetic(p, bound);
    out.detection_by_tolerance = hit.by_tolerance && hit.found;
    out.scan_truncated = !hit.found;  // the relation could first occur beyond the bound

    std::vector<SeriesTerm> pool;
    if (hit.found) {
        out.regime = OriginRegime::Arithmetic;
        out.ell1_star = hit.ell1;
        out.ell2_star = hit.ell2;
        for (long long l = 0; l <= bound; ++l) {
            if (in_l1(l, hit.ell1, p.d))
                out.excluded_l1.push_back(l);
            else
                pool.push_back({(p.d + 2.0 * l) / p.alpha, 0, h1_coefficient(p, l)});
            if (in_l2(l, hit.ell2, p.d))
                out.excluded_l2.push_back(l);
            else
                pool.push_back({l + 1.0, 0, h2_coefficient(p, l)});
        }
        // (-1)^{l1*+l2*+1} (l2*+1) / (l1*! Gamma(d/2+l1*+1) Gamma(gamma - beta l2*))
        const double c =
            ((hit.ell1 + hit.ell2 + 1) % 2 == 0 ? 1.0 : -1.0) * (hit.ell2 + 1.0) /
            std::tgamma(static_cast<double>(hit.ell1) + 1.0) *
            rgamma(p.d / 2.0 + hit.ell1 + 1.0) * rgamma(p.gamma - p.beta * hit.ell2);
        pool.push_back({hit.ell2 + 1.0, 1, c});
    } else {
        out.regime = OriginRegime::Generic;
        for (long long l = 0; l <= bound; ++l) {
            pool.push_back({(p.d + 2.0 * l) / p.alpha, 0, h1_coefficient(p, l)});
            pool.push_back({l + 1.0, 0, h2_coefficient(p, l)});
        }
    }
    std::sort(pool.begin(), pool.end(), [](const SeriesTerm& a, const SeriesTerm& b) {
        if (a.exponent != b.exponent) return a.exponent < b.exponent;
        return a.log_power < b.log_power;
    });
    if (static_cast<int>(pool.size()) > n_terms) pool.resize(n_terms);
    out.terms = std::move(pool);
    return out;
}

double OriginExpansion::eval(double z) const {
    double s = 0.0;
    const double lz = std::log(z);
    for (const auto& t : terms)
        s += t.coefficient * std::pow(z, t.exponent) * (t.log_power ? lz : 1.0);
    return s;
}

double green_origin_approx(const EquationParams& p, const OriginExpansion& exp, double x) {
    const double c2 = std::pow(2.0, 1.0 - p.alpha) / p.nu;
    x = std::abs(x);
    return std::pow(kPi, -p.d / 2.0) * std::pow(x, -static_cast<double>(p.d)) *
           exp.eval(c2 * std::pow(x, p.alpha));
}

// -- infinity asymptote ------------------------------------------------------

InfinityAsymptote infinity_asymptote(const EquationParams& p) {
    p.validate();
    if (!(p.beta < 2.0))
        throw std::domain_error("infinity_asymptote: asymptotics proved for beta in (0, 2) only");
    InfinityAsymptote out;
    const double a = p.alpha, b = p.beta, g = p.gamma, d = p.d;
    const double c2 = std::pow(2.0, 1.0 - a) / p.nu;
    const double pref = std::pow(kPi, -d / 2.0);

    const bool even = a >= 2.0 - 1e-12 && nearly_integer(a / 2.0);
    if (!even) {
        out.form = AsymptoteForm::PowerLaw;
        const double h11 = std::tgamma((d + a) / 2.0) * std::tgamma(1.0 + a / 2.0) *
                           std::sin(kPi * a / 2.0) / (kPi * std::tgamma(2.0 * b + g));
        out.theta1 = pref * h11 / c2;
        out.power = -(d + a);
        return out;
    }
    if (nearly_integer(a) && std::abs(a - 2.0) <= 1e-12) {
        out.form = AsymptoteForm::StretchedExp;
        const double s = (d / 2.0 + 1.0 - (b + g)) / (2.0 - b);
        out.theta21 = pref * std::pow(b, (-4.0 * g + b * (d - 3.0) + 2.0) / (4.0 - 2.0 * b)) /
                      std::sqrt(2.0 - b) * std::pow(c2, s);
        out.theta22 = (2.0 - b) * std::pow(b, b / (2.0 - b)) * std::pow(c2, 1.0 / (2.0 - b));
        out.power = a * s - d;
        out.rate_exponent = a / (2.0 - b);
        return out;
    }
    out.form = AsymptoteForm::OscillatoryExp;
    const double s = (d / 2.0 + 1.0 - (b + g)) / (a - b);
    out.theta_ab = (2.0 - b) / (a - b) * kPi / 2.0;
    const double c51 = std::pow(2.0 * kPi, (a / 2.0 - 1.0) / 2.0) / std::sqrt(a - b) *
                       std::pow(a / 2.0, (b * (1.0 - d) + a * (2.0 * b + 2.0 * g - 3.0)) / (2.0 * a - 2.0 * b)) *
                       std::pow(b, (b * (1.0 + d) - a * (2.0 * b + 2.0 * g - 1.0)) / (2.0 * a - 2.0 * b));
    out.theta31 = pref * c51 * std::pow(c2, s);
    out.theta32 = kPi * (a / 2.0 - 1.0) * (d / 2.0 + 1.0 - (b + g)) / (a - b);
    out.theta33 = std::pow(a / 2.0, a / (b - a)) * (a - b) * std::pow(b, b / (a - b)) *
                  std::pow(c2, 1.0 / (a - b));
    out.power = a * s - d;
    out.rate_exponent = a / (a - b);
    return out;
}

double InfinityAsymptote::eval(double x) const {
    x = std::abs(x);
    switch (form) {
        case AsymptoteForm::PowerLaw:
            return theta1 * std::pow(x, power);
        case AsymptoteForm::StretchedExp:
            return theta21 * std::pow(x, power) * std::exp(-theta22 * std::pow(x, rate_exponent));
        case AsymptoteForm::OscillatoryExp: {
            const double q = std::pow(x, rate_exponent);
            return theta31 * std::pow(x, power) *
                   std::cos(theta32 - theta33 * std::cos(theta_ab) * q) *
                   std::exp(-theta33 * std::sin(theta_ab) * q);
        }
    }
    return 0.0;
}

FoxHParams fox_h_parameters(const EquationParams& p) {
    p.validate();
    FoxHParams out;
    out.a_star = 2.0 - p.beta;
    out.a1_star = p.alpha / 2.0 + 1.0 - p.beta;
    out.delta_cap = p.alpha - p.beta;
    out.mu = (p.d + 1.0) / 2.0 - (p.beta + p.gamma);
    out.delta = std::pow(p.alpha / 2.0, p.alpha) * std::pow(p.beta, -p.beta);
    return out;
}

}  // namespace stf::kernel

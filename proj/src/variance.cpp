#include "stf/variance.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "stf/quadrature.hpp"
#include "stf/solvability.hpp"
#include "stf/special_functions.hpp"

namespace stf::variance {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

using quad::Fn;

double a_H(double H) { return H * (2.0 * H - 1.0); }

// Fourier symbol of G at time v and radial frequency r.
struct Symbol {
    double beta, bg, scale;  // scale = nu/2 * r^alpha

    double operator()(double v) const {
        if (v <= 0.0) return 0.0;
        return std::pow(v, bg - 1.0) * specfun::mittag_leffler({beta, bg}, -scale * std::pow(v, beta));
    }
};

Symbol make_symbol(const EquationParams& p, double r) {
    return {p.beta, p.beta + p.gamma, 0.5 * p.nu * std::pow(r, p.alpha)};
}

// integral with an integrable power endpoint singularity x^e at x = 0:
// substitutes x = tau^{1/(1+e)} when e < 0
double integrate_power_endpoint(const Fn& f, double h, double e, double rel_tol, int max_iv) {
    if (h <= 0.0) return 0.0;
    if (e >= 0.0) return quad::adaptive(f, 0.0, h, rel_tol, 0.0, max_iv);
    const double p = 1.0 / (1.0 + e);
    auto g = [&](double tau) {
        const double x = std::pow(tau, p);
        return f(x) * p * std::pow(tau, p - 1.0);
    };
    return quad::adaptive(g, 0.0, std::pow(h, 1.0 / p), rel_tol, 0.0, max_iv);
}

// oscillation frequency of the symbol in the time variable (beta = 2 family)
double time_frequency(const EquationParams& p, double r) {
    if (p.beta < 2.0) return 0.0;
    return std::sqrt(0.5 * p.nu * std::pow(r, p.alpha));
}

double adaptive_osc(const Fn& f, double a, double b, double freq, double rel_tol, int budget) {
    if (b <= a) return 0.0;
    const double cycles = freq * (b - a) / kPi;
    if (cycles <= 8.0) return quad::adaptive(f, a, b, rel_tol, 0.0, budget);
    const int panels = static_cast<int>(std::min(4000.0, cycles)) + 1;
    const double h = (b - a) / panels;
    double total = 0.0;
    for (int i = 0; i < panels; ++i)
        total += quad::adaptive(f, a + i * h, a + (i + 1) * h, rel_tol, 0.0,
                                std::max(8, budget / panels));
    return total;
}

}  // namespace

namespace detail {

double surface_constant(int d) { return 2.0 * std::pow(kPi, d / 2.0) / std::tgamma(d / 2.0); }

double time_l2_product(const EquationParams& p, double t1, double t2, double r,
                       const QuadratureSpec& q) {
    const double s = std::min(t1, t2);
    if (s <= 0.0) return 0.0;
    const Symbol g = make_symbol(p, r);
    auto f = [&](double w) { return g(t1 - w) * g(t2 - w); };
    const double rel = q.rel_tol * 0.3;
    const double sing = 2.0 * (p.beta + p.gamma) - 2.0;  // endpoint power at w -> s
    const double freq = time_frequency(p, r);
    if (sing >= 0.0) return adaptive_osc(f, 0.0, s, freq, rel, 1200);
    // integrable singularity where the younger time argument vanishes
    auto f_end = [&](double v) { return g(t1 - s + v) * g(t2 - s + v); };
    const double h = std::min(s, 0.25);
    double head = adaptive_osc(f, 0.0, s - h, freq, rel, 1200);
    return head + integrate_power_endpoint(f_end, h, (t1 == t2) ? sing : (p.beta + p.gamma - 1.0),
                                           rel, 800);
}

double time_fractional_product(const EquationParams& p, double H, double t1, double t2, double r,
                               const QuadratureSpec& q) {
    const Symbol g = make_symbol(p, r);
    const double rel = q.rel_tol * 0.3;
    const double freq = time_frequency(p, r);
    const double e = 2.0 * H - 2.0;
    if (t1 == t2) {
        // symmetric square: 2 int_0^t du u^{2H-2} int_0^{t-u} g(w) g(w+u) dw
        const double t = t1;
        auto corr = [&](double u) {
            auto f = [&](double w) { return g(w) * g(w + u); };
            return adaptive_osc(f, 0.0, t - u, freq, rel, 800);
        };
        return 2.0 * integrate_power_endpoint(corr, t, e, rel, 400);
    }
    if (t1 < t2) return time_fractional_product(p, H, t2, t1, r, q);
    // iterated over the rectangle [0,t1] x [0,t2], inner split at the diagonal
    auto outer = [&](double wp) {
        const double gv = g(t2 - wp);
        if (gv == 0.0) return 0.0;
        auto left = [&](double u) { return g(t1 - wp + u); };
        auto right = [&](double u) { return g(t1 - wp - u); };
        const double li = integrate_power_endpoint(left, wp, e, rel, 400);
        const double ri = integrate_power_endpoint(right, t1 - wp, e, rel, 400);
        return gv * (li + ri);
    };
    // outer endpoint w' -> t2 leaves g(t2-w') singular if beta+gamma < 1
    const double sing = p.beta + p.gamma - 1.0;
    if (sing >= 0.0) return adaptive_osc(outer, 0.0, t2, freq, rel, 600);
    auto outer_end = [&](double v) { return outer(t2 - v); };
    const double h = std::min(t2, 0.25);
    return adaptive_osc(outer, 0.0, t2 - h, freq, rel, 600) +
           integrate_power_endpoint(outer_end, h, sing, rel, 400);
}

double radial_integral(const EquationParams& p, double ell, const std::function<double(double)>& phi,
                       double time_scale, const QuadratureSpec& q) {
    q.check_cancel();
    auto weighted = [&](double r) { return std::pow(r, ell - 1.0) * phi(r); };
    const double rel = q.rel_tol;
    // scale where the symbol argument reaches ~60
    const double r0 = std::pow(120.0 / (p.nu * std::pow(time_scale, p.beta)), 1.0 / p.alpha);
    const double r1 = std::min(1.0, r0);
    double total = integrate_power_endpoint(weighted, r1, ell - 1.0, rel * 0.3, 2000);
    if (r0 > r1) total += quad::adaptive(weighted, r1, r0, rel * 0.3, 0.0, 4000);

    if (p.beta == 2.0) {
        // persistent oscillation rides on an algebraically decaying mean:
        // integrate in y = c r^{alpha/2} where the phase is linear, with
        // period-snapped geometric blocks
        const double c = std::sqrt(0.5 * p.nu) * std::pow(time_scale, p.beta / 2.0);
        const double y0 = c * std::pow(r0, p.alpha / 2.0);
        auto fy = [&](double y) {
            const double r = std::pow(y / c, 2.0 / p.alpha);
            return weighted(r) * (2.0 / p.alpha) * std::pow(y / c, 2.0 / p.alpha - 1.0) / c;
        };
        const double tail =
            quad::mixed_tail(fy, y0, kPi, rel * 0.5, rel * 0.2 * std::abs(total), &q);
        return total + tail;
    }
    // power-law tail: geometric blocks with ratio extrapolation
    return total + quad::mixed_tail(weighted, r0, 0.0, rel * 0.5, rel * 0.2 * std::abs(total), &q);
}

}  // namespace detail

// -- K constant ---------------------------------------------------------------

namespace {

double hg(double a, double b, double c) { return specfun::hyp2f1(a, b, c, -1.0); }

// closed forms of the K constant; the beta = 2 family is normalized so that the
// quadrature of the second-moment integral is reproduced for every nu (the
// symbol carries a 1/sqrt(nu/2) amplitude).
struct ClosedK {
    bool available = false;
    double value = 0.0;
    KCase tag = KCase::None;
};

ClosedK closed_k(const EquationParams& p, const NoiseParams& n) {
    ClosedK out;
    if (p.gamma != 0.0) return out;
    const double al = p.alpha, nu = p.nu, H = n.H, ell = n.ell;
    const double d = p.d;
    const double gd = std::tgamma(d / 2.0);
    if (p.beta == 1.0) {
        if (H == 0.5) {
            if (!(ell < al)) return out;
            out = {true,
                   4.0 * std::pow(kPi, (2.0 + d) / 2.0) * std::tgamma(ell / al) /
                       (std::pow(nu, ell / al) * gd * (al - ell)),
                   KCase::KPlus1};
            return out;
        }
        if (!(ell < 2.0 * al * H)) return out;
        out = {true,
               std::pow(2.0, 3.0 + ell / al) * H * std::pow(kPi, (2.0 + d) / 2.0) *
                   std::tgamma(ell / al) * hg(1.0, ell / al, 2.0 * H) /
                   (std::pow(nu, ell / al) * gd * (2.0 * al * H - ell)),
               KCase::K0};
        return out;
    }
    if (p.beta == 2.0) {
        const double la = ell / al;
        if (H == 0.5) {
            if (!(ell < al)) return out;
            if (ell == al / 2.0) {
                out = {true, std::pow(2.0, 1.5) * std::pow(kPi, (d + 4.0) / 2.0) /
                                 (std::sqrt(nu) * gd * al),
                       KCase::K2};
                return out;
            }
            out = {true,
                   std::pow(2.0, 4.0 - la) * std::pow(nu, -la) * std::pow(kPi, (d + 2.0) / 2.0) *
                       specfun::gamma(2.0 * (la - 1.0)) * std::cos(kPi * la) /
                       (gd * (3.0 * al - 2.0 * ell)),
                   KCase::K1};
            return out;
        }
        if (!(ell < (0.5 + H) * al)) return out;
        if (ell == al / 2.0) {
            out = {true, std::pow(2.0, 2.5) * std::pow(kPi, (d + 4.0) / 2.0) /
                             (std::sqrt(nu) * al * (1.0 + 2.0 * H) * gd),
                   KCase::K4};
            return out;
        }
        if (ell == al) {
            out = {true,
                   (2.0 / nu) * 4.0 * std::pow(kPi, (d + 2.0) / 2.0) / (al * gd) *
                       (hg(1.0, 1.0, 1.0 + 2.0 * H) / (2.0 * H) + 1.0 / (2.0 * H - 1.0)),
                   KCase::K5};
            return out;
        }
        out = {true,
               (2.0 / nu) * std::pow(2.0, la) * std::pow(nu, 1.0 - la) * H *
                   std::pow(kPi, (d + 2.0) / 2.0) / gd * specfun::gamma(2.0 * (la - 1.0)) *
                   std::cos(kPi * la) *
                   (al * (1.0 - 2.0 * H) / ((al * (0.5 + H) - ell) * (al * (1.0 + H) - ell)) +
                    2.0 * hg(1.0, 2.0 * (la - 1.0), 2.0 * H) / (al * (1.0 + H) - ell)),
               KCase::K3};
        return out;
    }
    return out;
}

double k_quadrature(const EquationParams& p, const NoiseParams& n, const QuadratureSpec& q) {
    auto phi = [&](double r) {
        if (n.H == 0.5) return detail::time_l2_product(p, 1.0, 1.0, r, q);
        return detail::time_fractional_product(p, n.H, 1.0, 1.0, r, q);
    };
    const double pre = (n.H == 0.5) ? 2.0 * kPi : 2.0 * kPi * a_H(n.H);
    return pre * detail::surface_constant(p.d) * detail::radial_integral(p, n.ell, phi, 1.0, q);
}

}  // namespace

KResult k_constant(const EquationParams& p, const NoiseParams& n, KMethod method,
                   const QuadratureSpec& q) {
    p.validate();
    n.validate(p.d);
    const auto verdict = solvability::dalang_check(p, n);
    if (verdict.status == solvability::Solvability::NotSolvable ||
        verdict.status == solvability::Solvability::Unknown)
        throw RegimeError("k_constant: second moment is not finite in this regime");

    KResult res;
    const ClosedK cf = closed_k(p, n);
    if (method == KMethod::ClosedForm && !cf.available)
        throw UnsupportedError("k_constant: no closed form for these parameters");
    if (cf.available && method != KMethod::Quadrature) {
        res.value = cf.value;
        res.method = KMethod::ClosedForm;
        res.case_tag = cf.tag;
        return res;
    }
    res.value = k_quadrature(p, n, q);
    res.method = KMethod::Quadrature;
    res.case_tag = cf.tag;
    res.closed_form_unavailable = (method == KMethod::Auto) && !cf.available;
    return res;
}

// -- trigonometric integral F_theta -------------------------------------------

namespace {

double f_theta_closed(double theta, double s1, double s2) {
    if (s1 == s2) {
        if (theta == -2.0) return kPi * s1 / 2.0;
        return specfun::gamma(1.0 + theta) * std::sin(theta * kPi / 2.0) /
               std::pow(2.0, 2.0 + theta) * std::pow(s1, -1.0 - theta);
    }
    if (theta == -2.0) return kPi * std::min(s1, s2) / 2.0;
    if (theta == -1.0) return 0.5 * std::log((s1 + s2) / std::abs(s2 - s1));
    return 0.5 * specfun::gamma(1.0 + theta) * std::sin(kPi * theta / 2.0) *
           (std::pow(s2 + s1, -1.0 - theta) - std::pow(std::abs(s2 - s1), -1.0 - theta));
}

// tail int_{x0}^inf x^theta cos(w x) dx by zero-to-zero panels
double cos_tail(double theta, double w, double x0, const QuadratureSpec& q) {
    auto f = [&](double x) { return std::pow(x, theta) * std::cos(w * x); };
    const int k0 = static_cast<int>(std::ceil((w * x0 / kPi) - 0.5));
    auto node = [&](int k) { return (k0 + k + 0.5) * kPi / w; };
    return quad::oscillatory_tail(f, x0, node, q.rel_tol * 0.3, 1e-14, q.max_panels, &q);
}

double f_theta_quadrature(double theta, double s1, double s2, const QuadratureSpec& q) {
    // head: combined integrand, singularity x^{theta+2} at 0
    auto head_f = [&](double x) { return std::pow(x, theta) * std::sin(s1 * x) * std::sin(s2 * x); };
    const double x0 = kPi / (2.0 * (s1 + s2));
    double v = integrate_power_endpoint(head_f, x0, theta + 2.0, q.rel_tol * 0.2, 2000);
    // tails of the two cosine components
    const double wm = s2 - s1;
    const double wp = s2 + s1;
    if (wm != 0.0) {
        v += 0.5 * cos_tail(theta, std::abs(wm), x0, q);
    } else {
        // diagonal: mean part integrates exactly, theta < -1 there
        v += 0.5 * (-std::pow(x0, theta + 1.0) / (theta + 1.0));
    }
    v -= 0.5 * cos_tail(theta, wp, x0, q);
    return v;
}

}  // namespace

double trig_integral_F(double theta, double s1, double s2, FMethod method,
                       const QuadratureSpec& q) {
    if (!(s1 > 0.0) || !(s2 > 0.0)) throw std::domain_error("trig_integral_F: s1, s2 must be positive");
    if (s1 > s2) std::swap(s1, s2);
    const bool diagonal = (s1 == s2);
    if (diagonal) {
        if (!(theta > -3.0 && theta < -1.0))
            throw std::domain_error("trig_integral_F: diagonal integral diverges unless theta in (-3,-1)");
    } else if (!(theta > -3.0 && theta < 0.0)) {
        throw std::domain_error("trig_integral_F: integral diverges unless theta in (-3,0)");
    }
    if (method == FMethod::ClosedForm) return f_theta_closed(theta, s1, s2);
    return f_theta_quadrature(theta, s1, s2, q);
}

// -- Mittag-Leffler integrals --------------------------------------------------

double ml_product_integral(double a, double b, double theta, double s1, double s2,
                           const QuadratureSpec& q) {
    if (!(theta > -1.0 && theta < 1.0))
        throw std::domain_error("ml_product_integral: theta must be in (-1,1)");
    if (!(s1 > 0.0 && s2 > 0.0)) throw std::domain_error("ml_product_integral: s must be positive");
    if (s1 > s2) std::swap(s1, s2);
    const auto& ml = specfun::MLInterpolant::get(a, b);
    auto f = [&](double x) { return std::pow(x, theta) * ml(s1 * x) * ml(s2 * x); };
    const double rel = q.rel_tol * 0.3;
    double v = integrate_power_endpoint(f, 1.0 / s2, theta, rel, 1500);
    if (s1 != s2) v += quad::adaptive(f, 1.0 / s2, 1.0 / s1, rel, 0.0, 1500);
    const double x1 = 1.0 / s1;
    if (a == 2.0) {
        // oscillatory tail in y = sqrt(x) on top of an algebraic mean;
        // convergence needs b - theta > 3/2 off the diagonal, theta < b - 2 on it
        if ((s1 != s2 && !(b - theta > 1.5)) || (s1 == s2 && !(theta < b - 2.0)))
            throw ConvergenceError("ml_product_integral: tail diverges for these parameters");
        auto fy = [&](double y) { return 2.0 * y * f(y * y); };
        const double wslow = (s1 != s2) ? std::sqrt(s2) - std::sqrt(s1)
                                        : std::sqrt(s1) + std::sqrt(s2);
        v += quad::mixed_tail(fy, std::sqrt(x1), 2.0 * kPi / wslow, rel,
                              rel * std::abs(v), &q);
        return v;
    }
    // algebraic tail ~ x^{theta-2}
    v += quad::mixed_tail(f, x1, 0.0, rel, rel * std::abs(v), &q);
    return v;
}

double ml_power_time_integral(double beta, double theta_b, double H, double lambda, double t,
                              const QuadratureSpec& q) {
    if (!(theta_b + H > 1.0))
        throw std::domain_error("ml_power_time_integral: requires theta_b + H > 1");
    if (!(H > 0.0 && H < 1.0)) throw std::domain_error("ml_power_time_integral: H must be in (0,1)");
    if (!(beta > 0.0 && beta <= 2.0)) throw std::domain_error("ml_power_time_integral: beta in (0,2]");
    if (!(t > 0.0)) throw std::domain_error("ml_power_time_integral: t must be positive");
    const specfun::MLParams ml{beta, theta_b};
    auto f = [&](double w) {
        const double e = specfun::mittag_leffler(ml, -lambda * std::pow(w, beta));
        return std::pow(w, (theta_b - 1.0) / H) * std::pow(std::abs(e), 1.0 / H);
    };
    return integrate_power_endpoint(f, t, (theta_b - 1.0) / H, q.rel_tol * 0.5, 3000);
}

// -- generalized Balan quantities ----------------------------------------------

namespace {

// F_eta(theta, tau) = int_0^theta e^{i s tau} sin(s + eta) ds, evaluated through
// the two-pole form with a cancellation-free (e^{iy}-1)/y kernel.
std::complex<double> balan_F(double eta, double theta, double tau) {
    auto D = [&](double w) -> std::complex<double> {
        const double y = w * theta;
        double re, im;
        if (std::abs(y) < 1e-8) {
            re = -0.5 * y;
            im = 1.0 - y * y / 6.0;
        } else {
            const double sh = std::sin(0.5 * y);
            re = -2.0 * sh * sh / y;
            im = std::sin(y) / y;
        }
        return theta * std::complex<double>(re, im);
    };
    const std::complex<double> eip(std::cos(eta), std::sin(eta));
    return 0.5 * (eip * D(tau + 1.0) - std::conj(eip) * D(tau - 1.0));
}

}  // namespace

double balan_N(double alpha, double eta, double H, double t, double z, const QuadratureSpec& q) {
    if (!(z > 0.0 && t > 0.0)) throw std::domain_error("balan_N: t and z must be positive");
    if (!(H > 0.0 && H < 1.0)) throw std::domain_error("balan_N: H must be in (0,1)");
    const double theta = t * std::pow(z, alpha / 2.0);
    auto f = [&](double sigma) {
        const std::complex<double> F = balan_F(eta, theta, sigma);
        return std::pow(sigma, 1.0 - 2.0 * H) * std::norm(F);
    };
    const double rel = q.rel_tol * 0.5;
    // head with the |sigma|^{1-2H} weight
    double v = integrate_power_endpoint(f, 0.5, 1.0 - 2.0 * H, rel, 1500);
    // resonance at sigma = 1 of width ~ 1/theta needs explicit bracketing or
    // the adaptive grid can step straight over it
    const double half_width = std::min(0.3, std::max(0.02, 6.0 * kPi / std::max(theta, 1.0)));
    v += quad::adaptive(f, 0.5, 1.0 - half_width, rel, 0.0, 2000);
    v += quad::adaptive(f, 1.0 - half_width, 1.0 + half_width, rel, 0.0, 4000);
    v += quad::adaptive(f, 1.0 + half_width, 2.0, rel, 0.0, 2000);
    // tail: sigma^{-1-2H} mean with oscillation at frequency theta
    v += quad::mixed_tail(f, 2.0, 2.0 * kPi / std::max(theta, 0.5), rel, rel * v, &q);
    return std::pow(z, -alpha * (1.0 + H)) * 2.0 * v;
}

double balan_bound_kernel(double H, double t, double a) {
    // (1/(t sqrt(a^2+t^2))) int_R |tau/t|^{1-2H} / (tau^2 + a^2 + t^2) dtau
    const double c2 = a * a + t * t;
    const double integral = kPi * std::pow(c2, -H) / std::sin(kPi * H);
    return std::pow(t, 2.0 * H - 1.0) * integral / (t * std::sqrt(c2));
}

// -- increment variance ---------------------------------------------------------

double increment_variance(const EquationParams& p, const NoiseParams& n, const SpacetimePoint& a,
                          const SpacetimePoint& b, Axis axis, const QuadratureSpec& q) {
    p.validate();
    n.validate(p.d);
    a.validate();
    b.validate();
    if (p.d != 1) throw UnsupportedError("increment_variance: numeric route requires d = 1");
    const auto verdict = solvability::dalang_check(p, n);
    if (verdict.status == solvability::Solvability::NotSolvable ||
        verdict.status == solvability::Solvability::Unknown)
        throw RegimeError("increment_variance: regime not solvable");

    if (axis == Axis::Time) {
        if (a.x != b.x) throw std::invalid_argument("increment_variance: time axis needs equal x");
        const double t = std::max(a.t, b.t);
        const double s = std::min(a.t, b.t);
        if (t == s) return 0.0;
        auto phi = [&](double r) {
            const Symbol g = make_symbol(p, r);
            if (n.H == 0.5) {
                auto diff2 = [&](double w) {
                    const double dgl = g(t - w) - g(s - w);
                    return dgl * dgl;
                };
                const double freq = time_frequency(p, r);
                const double sing = 2.0 * (p.beta + p.gamma) - 2.0;
                double v;
                if (sing >= 0.0) {
                    v = adaptive_osc(diff2, 0.0, s, freq, q.rel_tol * 0.3, 1000);
                } else {
                    const double h = std::min(s, 0.25);
                    auto end = [&](double u) { return diff2(s - u); };
                    v = adaptive_osc(diff2, 0.0, s - h, freq, q.rel_tol * 0.3, 1000) +
                        integrate_power_endpoint(end, h, sing, q.rel_tol * 0.3, 800);
                }
                v += detail::time_l2_product(p, t - s, t - s, r, q);
                return v;
            }
            return detail::time_fractional_product(p, n.H, t, t, r, q) +
                   detail::time_fractional_product(p, n.H, s, s, r, q) -
                   2.0 * detail::time_fractional_product(p, n.H, t, s, r, q);
        };
        const double pre = (n.H == 0.5) ? 2.0 * kPi : 2.0 * kPi * a_H(n.H);
        return pre * detail::surface_constant(p.d) * detail::radial_integral(p, n.ell, phi, t, q);
    }
    if (a.t != b.t) throw std::invalid_argument("increment_variance: space axis needs equal t");
    const double dx = std::abs(a.x - b.x);
    if (dx == 0.0) return 0.0;
    auto phi = [&](double r) {
        const double T = (n.H == 0.5) ? detail::time_l2_product(p, a.t, a.t, r, q)
                                      : detail::time_fractional_product(p, n.H, a.t, a.t, r, q);
        return 2.0 * (1.0 - std::cos(r * dx)) * T;
    };
    const double pre = (n.H == 0.5) ? 2.0 * kPi : 2.0 * kPi * a_H(n.H);
    return pre * detail::surface_constant(p.d) * detail::radial_integral(p, n.ell, phi, a.t, q);
}

}  // namespace stf::variance

#include "stf/simulator.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>

#include "stf/quadrature.hpp"
#include "stf/solvability.hpp"
#include "stf/special_functions.hpp"
#include "stf/variance.hpp"

namespace stf::sim {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

double a_H(double H) { return H * (2.0 * H - 1.0); }

void check_solvable(const EquationParams& p, const NoiseParams& n, const char* who) {
    const auto v = solvability::dalang_check(p, n);
    if (v.status == solvability::Solvability::NotSolvable ||
        v.status == solvability::Solvability::Unknown)
        throw RegimeError(std::string(who) + ": regime not solvable");
}

// -- radial product profile ---------------------------------------------------
//
// For points sharing the spatial coordinate the covariance reduces, after the
// radial scaling r -> lambda^{-1/alpha} rho, to a one-parameter profile
//   Rt(mu) = int_0^inf rho^{ell-1} E(-rho^alpha) E(-mu rho^alpha) drho,
// with mu in [0, 1] the ratio of the two symbol arguments.  The profile is
// tabulated once per parameter set and interpolated.
struct RadialProfile {
    std::vector<double> mu;   // ascending, mu[0] = 0
    std::vector<double> val;

    double operator()(double m) const {
        if (m >= mu.back()) return val.back();
        if (m <= 0.0) return val.front();
        auto it = std::upper_bound(mu.begin(), mu.end(), m);
        const std::size_t i = static_cast<std::size_t>(it - mu.begin());
        const double w = (m - mu[i - 1]) / (mu[i] - mu[i - 1]);
        return val[i - 1] * (1.0 - w) + val[i] * w;
    }
};

struct ProfileKey {
    double alpha, beta, gamma, ell;
    bool operator<(const ProfileKey& o) const {
        return std::tie(alpha, beta, gamma, ell) < std::tie(o.alpha, o.beta, o.gamma, o.ell);
    }
};

double radial_pair_integral(const EquationParams& p, double ell, double mu,
                            const QuadratureSpec& q) {
    // int_0^inf rho^{ell-1} E(-rho^alpha) E(-mu rho^alpha) drho with nu/2 = 1, t = 1
    EquationParams unit = p;
    unit.nu = 2.0;
    auto phi = [&](double r) {
        const double ra = std::pow(r, p.alpha);
        const specfun::MLParams ml{p.beta, p.beta + p.gamma};
        return specfun::mittag_leffler(ml, -ra) * specfun::mittag_leffler(ml, -mu * ra);
    };
    return variance::detail::radial_integral(unit, ell, phi, 1.0, q);
}

const RadialProfile& radial_profile(const EquationParams& p, const NoiseParams& n,
                                    const QuadratureSpec& q) {
    static std::map<ProfileKey, RadialProfile> cache;
    static std::mutex mtx;
    const ProfileKey key{p.alpha, p.beta, p.gamma, n.ell};
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    RadialProfile prof;
    const int n_nodes = 257;
    prof.mu.resize(n_nodes);
    prof.val.resize(n_nodes);
    QuadratureSpec pq = q;
    pq.rel_tol = std::min(q.rel_tol, 1e-9);
    for (int i = 0; i < n_nodes; ++i) {
        // grid refined toward both endpoints; mu = (i/(n-1))^2 flavor keeps the
        // mu -> 0 end dense where the profile bends
        const double s = static_cast<double>(i) / (n_nodes - 1);
        prof.mu[i] = s * s * (3.0 - 2.0 * s);  // smoothstep: dense near 0 and 1
        prof.val[i] = radial_pair_integral(p, n.ell, prof.mu[i], pq);
    }
    prof.mu.front() = 0.0;
    prof.mu.back() = 1.0;
    auto [pos, ok] = cache.emplace(key, std::move(prof));
    return pos->second;
}

// covariance of two points with equal x through the scaled profile
double covariance_temporal(const EquationParams& p, const NoiseParams& n, double t_hi, double t_lo,
                           const QuadratureSpec& q) {
    const RadialProfile& prof = radial_profile(p, n, q);
    const double bg = p.beta + p.gamma;
    const double scale = std::pow(0.5 * p.nu, -n.ell / p.alpha);
    const double la = n.ell * p.beta / p.alpha;
    auto integrand = [&](double w) {
        const double v1 = t_hi - w;
        const double v2 = t_lo - w;
        const double mu = std::pow(v2 / v1, p.beta);
        return std::pow(v1, bg - 1.0 - la) * std::pow(v2, bg - 1.0) * prof(mu);
    };
    // endpoint w -> t_lo: integrable (s-w)^{bg-1} factor
    const double e = bg - 1.0;
    double v;
    if (e >= 0.0) {
        v = quad::adaptive(integrand, 0.0, t_lo, q.rel_tol * 0.5, 0.0, 3000);
    } else {
        const double h = std::min(t_lo, 0.25);
        auto end = [&](double u) { return integrand(t_lo - u); };
        v = quad::adaptive(integrand, 0.0, t_lo - h, q.rel_tol * 0.5, 0.0, 2000);
        // power substitution for the (s-w)^{bg-1} endpoint
        const double pw = 1.0 / (1.0 + e);
        auto sub = [&](double tau) {
            const double u = std::pow(tau, pw);
            return end(u) * pw * std::pow(tau, pw - 1.0);
        };
        v += quad::adaptive(sub, 0.0, std::pow(h, 1.0 / pw), q.rel_tol * 0.5, 0.0, 2000);
    }
    const double pre = (n.H == 0.5) ? 4.0 * kPi : 4.0 * kPi * a_H(n.H);
    if (n.H == 0.5) return pre * scale * v;
    // H > 1/2: double time integral with |w-w'|^{2H-2} weight
    auto kernel2 = [&](double w1, double w2) {
        const double v1 = t_hi - w1;
        const double v2 = t_lo - w2;
        const double hi = std::max(std::pow(v1, p.beta), std::pow(v2, p.beta));
        const double lo = std::min(std::pow(v1, p.beta), std::pow(v2, p.beta));
        return std::pow(v1, bg - 1.0) * std::pow(v2, bg - 1.0) * std::pow(hi, -n.ell / p.alpha) *
               prof(lo / hi);
    };
    const double eH = 2.0 * n.H - 2.0;
    auto outer = [&](double w2) {
        auto left = [&](double u) { return kernel2(w2 - u, w2); };   // w1 < w2
        auto right = [&](double u) { return kernel2(w2 + u, w2); };  // w1 > w2
        const double pw = 1.0 / (1.0 + eH);
        auto subL = [&](double tau) {
            const double u = std::pow(tau, pw);
            return left(u) * pw * std::pow(tau, pw - 1.0);
        };
        auto subR = [&](double tau) {
            const double u = std::pow(tau, pw);
            return right(u) * pw * std::pow(tau, pw - 1.0);
        };
        double s = 0.0;
        if (w2 > 0.0) s += quad::adaptive(subL, 0.0, std::pow(w2, 1.0 / pw), q.rel_tol, 0.0, 800);
        if (t_hi - w2 > 0.0)
            s += quad::adaptive(subR, 0.0, std::pow(t_hi - w2, 1.0 / pw), q.rel_tol, 0.0, 800);
        return s;
    };
    const double dbl = quad::adaptive(outer, 0.0, t_lo, q.rel_tol * 0.5, 0.0, 800);
    return pre * scale * dbl;
}

// general pair (different x): direct spectral quadrature
double covariance_general(const EquationParams& p, const NoiseParams& n, const SpacetimePoint& a,
                          const SpacetimePoint& b, const QuadratureSpec& q) {
    const double dx = std::abs(a.x - b.x);
    const double t_hi = std::max(a.t, b.t);
    const double t_lo = std::min(a.t, b.t);
    auto phi = [&](double r) {
        const double T = (n.H == 0.5)
                             ? variance::detail::time_l2_product(p, t_hi, t_lo, r, q)
                             : variance::detail::time_fractional_product(p, n.H, t_hi, t_lo, r, q);
        return std::cos(r * dx) * T;
    };
    const double pre = (n.H == 0.5) ? 2.0 * kPi : 2.0 * kPi * a_H(n.H);
    return pre * variance::detail::surface_constant(p.d) *
           variance::detail::radial_integral(p, n.ell, phi, t_hi, q);
}

}  // namespace

double covariance(const EquationParams& p, const NoiseParams& n, const SpacetimePoint& a,
                  const SpacetimePoint& b, const QuadratureSpec& q) {
    p.validate();
    n.validate(p.d);
    a.validate();
    b.validate();
    if (p.d != 1) throw UnsupportedError("covariance: numeric route requires d = 1");
    check_solvable(p, n, "covariance");
    if (a.x == b.x) return covariance_temporal(p, n, std::max(a.t, b.t), std::min(a.t, b.t), q);
    return covariance_general(p, n, a, b, q);
}

CovMatrix gram_matrix(const EquationParams& p, const NoiseParams& n,
                      const std::vector<SpacetimePoint>& points, const QuadratureSpec& q) {
    if (points.empty()) throw std::invalid_argument("gram_matrix: empty point set");
    const int N = static_cast<int>(points.size());
    CovMatrix m;
    m.points = points;
    m.entries.resize(N, N);
    for (int i = 0; i < N; ++i)
        for (int j = i; j < N; ++j) {
            const double c = covariance(p, n, points[i], points[j], q);
            m.entries(i, j) = c;
            m.entries(j, i) = c;
        }
    // jitter escalation until a Cholesky factorization succeeds
    const double base = m.entries.diagonal().maxCoeff();
    double jitter = 0.0;
    Eigen::LLT<Eigen::MatrixXd> llt(m.entries);
    if (llt.info() != Eigen::Success) {
        jitter = 1e-12 * base;
        while (jitter <= 1e-6 * base) {
            Eigen::MatrixXd reg = m.entries;
            reg.diagonal().array() += jitter;
            llt.compute(reg);
            if (llt.info() == Eigen::Success) {
                m.entries = reg;
                m.jitter = jitter;
                return m;
            }
            jitter *= 2.0;
        }
        throw ConditioningError("gram_matrix: factorization failed within the jitter budget");
    }
    return m;
}

// -- counter-based Gaussian draws ----------------------------------------------

namespace detail {

namespace {
std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double uniform01(std::uint64_t h) {
    return (static_cast<double>(h >> 11) + 0.5) * 0x1p-53;
}
}  // namespace

double counter_normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    // Box-Muller on two independent hashed uniforms; deterministic in any order
    const std::uint64_t k = splitmix64(seed ^ splitmix64(stream * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL));
    const std::uint64_t h1 = splitmix64(k ^ (2 * index + 1));
    const std::uint64_t h2 = splitmix64(k ^ (2 * index + 2) ^ 0xda942042e4dd58b5ULL);
    const double u1 = uniform01(h1);
    const double u2 = uniform01(h2);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

}  // namespace detail

// -- harmonizable sampler --------------------------------------------------------

namespace {

struct Cell {
    double tau_c, xi_c;   // representative frequency (signed)
    double weight;        // sqrt of the cell spectral mass
};

// mass of |w|^{e} over [a,b], 0 <= a < b
double power_mass(double a, double b, double e) {
    return (std::pow(b, e + 1.0) - std::pow(a, e + 1.0)) / (e + 1.0);
}

// density-weighted centroid of |w|^{e} over [a,b]
double power_centroid(double a, double b, double e) {
    return power_mass(a, b, e + 1.0) / power_mass(a, b, e);
}

std::vector<double> log_graded_edges(double lo, double hi, int m) {
    std::vector<double> edges(m + 1);
    edges[0] = 0.0;
    for (int i = 1; i <= m; ++i)
        edges[i] = lo * std::pow(hi / lo, static_cast<double>(i - 1) / (m - 1));
    return edges;
}

std::complex<double> symbol_time_transform(const EquationParams& p, double t, double tau,
                                           double xi, const QuadratureSpec& q) {
    // B_t(tau, xi) = int_0^t e^{i tau w} g(w, |xi|) dw
    const specfun::MLParams ml{p.beta, p.beta + p.gamma};
    const double scale = 0.5 * p.nu * std::pow(std::abs(xi), p.alpha);
    auto re = [&](double w) {
        return std::cos(tau * w) * std::pow(w, p.beta + p.gamma - 1.0) *
               specfun::mittag_leffler(ml, -scale * std::pow(w, p.beta));
    };
    auto im = [&](double w) {
        return std::sin(tau * w) * std::pow(w, p.beta + p.gamma - 1.0) *
               specfun::mittag_leffler(ml, -scale * std::pow(w, p.beta));
    };
    const double rel = std::max(q.rel_tol, 1e-8);
    const double vr = quad::adaptive(re, 0.0, t, rel, 1e-14, 1200);
    const double vi = quad::adaptive(im, 0.0, t, rel, 1e-14, 1200);
    return {vr, vi};
}

}  // namespace

FieldSample sample_field(const EquationParams& p, const NoiseParams& n,
                         const std::vector<SpacetimePoint>& points, int mode_count,
                         int n_replicates, std::uint64_t seed, const QuadratureSpec& q) {
    p.validate();
    n.validate(p.d);
    if (p.d != 1) throw UnsupportedError("sample_field: requires d = 1");
    if (mode_count < 16) throw std::domain_error("sample_field: mode_count must be at least 16");
    if (points.empty()) throw std::invalid_argument("sample_field: empty point set");
    if (n_replicates < 1) throw std::invalid_argument("sample_field: need at least one replicate");
    check_solvable(p, n, "sample_field");

    const double lambda_H = specfun::gamma(2.0 * n.H + 1.0) * std::sin(kPi * n.H);
    const double e_tau = 1.0 - 2.0 * n.H;
    const double e_xi = n.ell - p.d;

    // reference total variance at the latest point, for box sizing
    SpacetimePoint ref = points.front();
    for (const auto& pt : points) {
        ref.t = std::max(ref.t, pt.t);
    }
    const double target_var = covariance(p, n, ref, ref, q);

    const int m_axis = std::max(2, static_cast<int>(std::lround(std::sqrt(mode_count / 4.0))));
    double tau_max = 64.0, xi_max = 64.0;
    std::vector<Cell> cells;
    double box_var = 0.0;
    for (int grow = 0; grow < 7; ++grow) {
        cells.clear();
        const auto tau_edges = log_graded_edges(1.0 / ref.t, tau_max, m_axis);
        const auto xi_edges = log_graded_edges(0.125, xi_max, m_axis);
        for (int i = 0; i < m_axis; ++i)
            for (int j = 0; j < m_axis; ++j) {
                const double mt = lambda_H * power_mass(tau_edges[i], tau_edges[i + 1], e_tau);
                const double mx = power_mass(xi_edges[j], xi_edges[j + 1], e_xi);
                const double tc = power_centroid(tau_edges[i], tau_edges[i + 1], e_tau);
                const double xc = power_centroid(xi_edges[j], xi_edges[j + 1], e_xi);
                const double w = std::sqrt(mt * mx);
                // four sign quadrants
                cells.push_back({tc, xc, w});
                cells.push_back({-tc, xc, w});
                cells.push_back({tc, -xc, w});
                cells.push_back({-tc, -xc, w});
            }
        // variance captured by the box at the reference point
        box_var = 0.0;
        for (const auto& c : cells) {
            const std::complex<double> B = symbol_time_transform(p, ref.t, c.tau_c, c.xi_c, q);
            box_var += c.weight * c.weight * std::norm(B);
        }
        if (box_var >= 0.99 * target_var) break;
        tau_max *= 3.0;
        xi_max *= 2.0;
    }

    FieldSample out;
    out.seed = seed;
    out.mode_count = static_cast<int>(cells.size());
    out.tail_mass_fraction = std::max(0.0, 1.0 - box_var / target_var);
    out.values.setZero(n_replicates, static_cast<int>(points.size()));

    // F[G...](tau,xi) = e^{-i(tau t + xi x)} B_t(tau, xi); per cell one complex
    // standard Gaussian shared across points
    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
        const Cell& c = cells[ci];
        std::vector<std::complex<double>> F(points.size());
        for (std::size_t pi = 0; pi < points.size(); ++pi) {
            const std::complex<double> B = symbol_time_transform(p, points[pi].t, c.tau_c, c.xi_c, q);
            const double phase = -(c.tau_c * points[pi].t + c.xi_c * points[pi].x);
            F[pi] = std::polar(1.0, phase) * B;
        }
        for (int rep = 0; rep < n_replicates; ++rep) {
            const double z1 = detail::counter_normal(seed, ci, 2 * rep);
            const double z2 = detail::counter_normal(seed, ci, 2 * rep + 1);
            for (std::size_t pi = 0; pi < points.size(); ++pi)
                out.values(rep, static_cast<int>(pi)) +=
                    c.weight * (F[pi].real() * z1 - F[pi].imag() * z2);
        }
    }
    return out;
}

double conditional_variance(const CovMatrix& m, int target, const std::vector<int>& given) {
    const int N = static_cast<int>(m.entries.rows());
    if (target < 0 || target >= N) throw std::invalid_argument("conditional_variance: bad target");
    for (int g : given) {
        if (g < 0 || g >= N || g == target)
            throw std::invalid_argument("conditional_variance: indices must be valid and disjoint");
    }
    const double var0 = m.entries(target, target);
    if (given.empty()) return var0;
    const int k = static_cast<int>(given.size());
    Eigen::MatrixXd G(k, k);
    Eigen::VectorXd c(k);
    for (int i = 0; i < k; ++i) {
        c(i) = m.entries(target, given[i]);
        for (int j = 0; j < k; ++j) G(i, j) = m.entries(given[i], given[j]);
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(G);
    if (ldlt.info() != Eigen::Success)
        throw ConditioningError("conditional_variance: conditioning block is not factorizable");
    const double reduction = c.dot(ldlt.solve(c));
    return std::max(0.0, var0 - reduction);
}

FitResult fit_exponent(const std::vector<double>& lags, const std::vector<double>& values) {
    if (lags.size() != values.size() || lags.size() < 4)
        throw std::domain_error("fit_exponent: need at least 4 matching points");
    const int n = static_cast<int>(lags.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (int i = 0; i < n; ++i) {
        if (!(lags[i] > 0.0) || !(values[i] > 0.0))
            throw std::domain_error("fit_exponent: inputs must be positive");
        const double x = std::log(lags[i]);
        const double y = std::log(values[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
    }
    FitResult out;
    const double den = n * sxx - sx * sx;
    out.slope = (n * sxy - sx * sy) / den;
    out.intercept = (sy - out.slope * sx) / n;
    const double ss_tot = syy - sy * sy / n;
    const double ss_res = ss_tot - out.slope * (sxy - sx * sy / n);
    out.r2 = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : 1.0;
    return out;
}

SmallBallCurve small_ball_mc(const EquationParams& p, const NoiseParams& n, double t_lo,
                             double t_hi, double x0, const std::vector<double>& eps_list,
                             long n_samples, int grid_size, std::uint64_t seed,
                             const QuadratureSpec& q) {
    if (!(t_hi > t_lo && t_lo > 0.0)) throw std::domain_error("small_ball_mc: bad interval");
    if (grid_size < 2 || n_samples < 1) throw std::domain_error("small_ball_mc: bad sizes");
    const auto e = solvability::exponents(p, n);
    if (!(e.rho > 0.0 && e.rho < 1.0))
        throw RegimeError("small_ball_mc: requires rho in (0,1); critical cases are refused");
    check_solvable(p, n, "small_ball_mc");

    std::vector<SpacetimePoint> grid(grid_size);
    for (int i = 0; i < grid_size; ++i)
        grid[i] = {t_lo + (t_hi - t_lo) * i / (grid_size - 1.0), x0};
    const CovMatrix m = gram_matrix(p, n, grid, q);
    Eigen::LLT<Eigen::MatrixXd> llt(m.entries);
    if (llt.info() != Eigen::Success)
        throw ConditioningError("small_ball_mc: Cholesky failed on the jittered Gram matrix");
    const Eigen::MatrixXd L = llt.matrixL();

    std::vector<double> eps_sorted(eps_list);
    std::sort(eps_sorted.begin(), eps_sorted.end());
    std::vector<long> hist(eps_sorted.size(), 0);  // first eps level that contains sup
    Eigen::VectorXd z(grid_size);
    for (long rep = 0; rep < n_samples; ++rep) {
        for (int i = 0; i < grid_size; ++i)
            z(i) = detail::counter_normal(seed, 0x5ba11ULL + static_cast<std::uint64_t>(rep), i);
        const double sup = (L * z).cwiseAbs().maxCoeff();
        const auto it = std::lower_bound(eps_sorted.begin(), eps_sorted.end(), sup);
        if (it != eps_sorted.end()) ++hist[static_cast<std::size_t>(it - eps_sorted.begin())];
    }
    // cumulative counts: the events {sup <= eps} are nested in eps
    std::vector<long> counts(eps_sorted.size(), 0);
    long acc = 0;
    for (std::size_t k = 0; k < eps_sorted.size(); ++k) {
        acc += hist[k];
        counts[k] = acc;
    }
    SmallBallCurve out;
    out.n_samples = n_samples;
    out.eps = eps_sorted;
    out.prob.resize(eps_sorted.size());
    for (std::size_t k = 0; k < eps_sorted.size(); ++k)
        out.prob[k] = static_cast<double>(counts[k]) / static_cast<double>(n_samples);
    return out;
}

}  // namespace stf::sim

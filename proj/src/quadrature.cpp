#include "stf/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace stf::quad {

namespace {

// Gauss-Kronrod 7-15 nodes/weights on [-1, 1].
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct PanelResult {
    double value;
    double err;
};

PanelResult gk15(const Fn& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double res_k = kWgk[7] * fc;
    double res_g = kWg[3] * fc;
    for (int j = 0; j < 7; ++j) {
        const double x = h * kXgk[j];
        const double f1 = f(c - x);
        const double f2 = f(c + x);
        res_k += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) res_g += kWg[j / 2] * (f1 + f2);
    }
    res_k *= h;
    res_g *= h;
    double err = std::abs(res_k - res_g);
    // sharpen the raw difference the usual way
    err = std::pow(200.0 * err, 1.5);
    err = std::min(std::abs(res_k - res_g), err);
    return {res_k, std::max(err, std::abs(res_k) * 1e-16)};
}

struct Interval {
    double a, b, value, err;
    bool operator<(const Interval& o) const { return err < o.err; }
};

}  // namespace

double adaptive(const Fn& f, double a, double b, double rel_tol, double abs_tol,
                int max_intervals) {
    if (a == b) return 0.0;
    std::priority_queue<Interval> heap;
    PanelResult r = gk15(f, a, b);
    heap.push({a, b, r.value, r.err});
    double total = r.value;
    double total_err = r.err;
    int n = 1;
    while (n < max_intervals) {
        const double tol = std::max(abs_tol, rel_tol * std::abs(total));
        if (total_err <= tol) break;
        Interval top = heap.top();
        if (top.err <= tol / std::max<std::size_t>(heap.size(), 1) * 0.5) break;
        heap.pop();
        const double m = 0.5 * (top.a + top.b);
        if (m <= top.a || m >= top.b) {  // cannot split further
            heap.push(top);
            break;
        }
        PanelResult r1 = gk15(f, top.a, m);
        PanelResult r2 = gk15(f, m, top.b);
        total += r1.value + r2.value - top.value;
        total_err += r1.err + r2.err - top.err;
        heap.push({top.a, m, r1.value, r1.err});
        heap.push({m, top.b, r2.value, r2.err});
        ++n;
    }
    return total;
}

double to_infinity(const Fn& f, double a, double rel_tol, double abs_tol, int max_intervals) {
    auto g = [&](double t) {
        const double omt = 1.0 - t;
        const double x = a + t / omt;
        return f(x) / (omt * omt);
    };
    return adaptive(g, 0.0, 1.0, rel_tol, abs_tol, max_intervals);
}

AccelResult wynn_epsilon(const std::vector<double>& s) {
    const std::size_t n = s.size();
    if (n == 0) return {0.0, std::numeric_limits<double>::infinity()};
    if (n == 1) return {s[0], std::abs(s[0])};
    std::vector<double> e0(s);             // epsilon_{k}
    std::vector<double> e1(n - 1, 0.0);    // workspace
    double best = s.back();
    double best_err = std::abs(s[n - 1] - s[n - 2]);
    std::vector<double> prev_prev(s);
    std::vector<double> prev;
    // first odd column
    prev.resize(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double d = s[i + 1] - s[i];
        prev[i] = (d == 0.0) ? 1e300 : 1.0 / d;
    }
    for (std::size_t col = 2; col < n; ++col) {
        std::vector<double> cur(n - col);
        for (std::size_t i = 0; i + col < n; ++i) {
            double d = prev[i + 1] - prev[i];
            cur[i] = prev_prev[i + 1] + ((d == 0.0) ? 1e300 : 1.0 / d);
        }
        if (col % 2 == 0 && !cur.empty()) {
            const double cand = cur.back();
            const double err = std::abs(cand - best);
            if (err < best_err && std::isfinite(cand)) {
                best_err = err;
                best = cand;
            }
        }
        prev_prev.swap(prev);
        prev.swap(cur);
    }
    return {best, best_err};
}

double oscillatory_tail(const Fn& f, double a, const std::function<double(int)>& node,
                        double rel_tol, double abs_tol, int max_panels,
                        const QuadratureSpec* spec) {
    std::vector<double> sums;
    sums.reserve(64);
    double lo = a;
    double running = 0.0;
    AccelResult acc{0.0, std::numeric_limits<double>::infinity()};
    double prev_acc = std::numeric_limits<double>::quiet_NaN();
    int k = 0;
    double scale = 0.0;
    while (k < max_panels) {
        if (spec) spec->check_cancel();
        double hi = node(k);
        ++k;
        if (hi <= lo) continue;
        const double piece = adaptive(f, lo, hi, std::max(rel_tol * 0.1, 1e-14), abs_tol * 0.05, 200);
        running += piece;
        scale = std::max(scale, std::abs(running));
        sums.push_back(running);
        lo = hi;
        if (sums.size() >= 10 && sums.size() % 2 == 0) {
            acc = wynn_epsilon(sums);
            const double tol = std::max(abs_tol, rel_tol * std::max(scale, std::abs(acc.value)));
            // terminate on a stable extrapolation: the raw panel size is
            // irrelevant once the alternating sums are accelerated
            if (acc.err_estimate <= tol && std::isfinite(prev_acc) &&
                std::abs(acc.value - prev_acc) <= tol)
                return acc.value;
            prev_acc = acc.value;
        }
    }
    if (!std::isfinite(acc.value)) throw ConvergenceError("oscillatory tail failed to converge");
    return acc.value;
}

double mixed_tail(const Fn& f, double a, double period, double rel_tol, double abs_tol,
                  const QuadratureSpec* spec) {
    auto snap = [&](double x) {
        if (period <= 0.0) return x;
        return a + std::max(1.0, std::round((x - a) / period)) * period;
    };
    double total = 0.0;
    double lo = a;
    double prev = 0.0;
    double prev_ratio = 0.0;
    bool have_prev = false;
    for (int j = 0; j < 48; ++j) {
        if (spec) spec->check_cancel();
        const double hi = snap(std::max(lo * 2.0, lo + 4.0 * period));
        if (hi <= lo) break;
        const int periods = period > 0.0 ? static_cast<int>((hi - lo) / period) + 1 : 1;
        const double block =
            adaptive(f, lo, hi, rel_tol * 0.2, abs_tol * 0.1, std::max(400, 12 * periods));
        total += block;
        const double tol = std::max(abs_tol, rel_tol * std::abs(total));
        if (have_prev && prev != 0.0) {
            const double ratio = block / prev;
            if (ratio > 0.0 && ratio < 0.98 && prev_ratio > 0.0 &&
                std::abs(ratio - prev_ratio) < 0.25 * (1.0 - ratio)) {
                const double remainder = block * ratio / (1.0 - ratio);
                if (std::abs(remainder) <= tol) return total + remainder;
            }
            prev_ratio = (prev != 0.0 && block / prev > 0.0) ? block / prev : 0.0;
        }
        if (std::abs(block) <= 0.05 * tol && have_prev && std::abs(prev) <= 0.1 * tol)
            return total;
        prev = block;
        have_prev = true;
        lo = hi;
    }
    throw ConvergenceError("mixed_tail: tail did not converge");
}

double oscillatory(const Fn& f, double a, const std::function<double(int)>& node,
                   double rel_tol, double abs_tol, int max_panels,
                   const QuadratureSpec* spec) {
    // find first node beyond a
    int k0 = 0;
    while (k0 < max_panels && node(k0) <= a) ++k0;
    if (k0 >= max_panels) throw ConvergenceError("no oscillation nodes beyond interval start");
    const double first = node(k0);
    const double head = adaptive(f, a, first, rel_tol * 0.1, abs_tol * 0.1, 2000);
    auto shifted = [&](int k) { return node(k + k0 + 1); };
    const double tail = oscillatory_tail(f, first, shifted, rel_tol, std::max(abs_tol, rel_tol * std::abs(head)) * 0.5,
                                         max_panels, spec);
    return head + tail;
}

}  // namespace stf::quad

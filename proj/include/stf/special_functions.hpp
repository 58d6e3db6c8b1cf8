#pragma once

#include <vector>

#include "stf/types.hpp"

namespace stf::specfun {

// Two-parameter Mittag-Leffler indices E_{a,b}.
struct MLParams {
    double a = 1.0;  // > 0, supported range (0, 2]
    double b = 1.0;

    void validate() const {
        if (!(a > 0.0)) throw std::domain_error("ML index a must be positive");
    }
};

// Gamma(x); throws std::domain_error at the poles x = 0, -1, -2, ...
double gamma(double x);

// log|Gamma(x)| with sign, thread-safe.
double log_gamma(double x, int* sign = nullptr);

// 1/Gamma(x); returns exactly 0 at the poles.  This zeroing is what makes
// series coefficients with Gamma factors in the denominator drop out cleanly.
double rgamma(double x);

enum class MLBranch { ClosedForm, Taylor, Asymptotic, Integral };

struct MLResult {
    double value = 0.0;
    double err_estimate = 0.0;
    MLBranch branch = MLBranch::Taylor;
};

// E_{a,b}(z) for real z, a in (0, 2].  Dispatches between closed forms, the
// Taylor series, the large-|z| expansion and an exact branch-cut integral.
double mittag_leffler(const MLParams& p, double z, const EvalTolerance& tol = {});

// Same with branch/error diagnostics.
MLResult mittag_leffler_info(const MLParams& p, double z, const EvalTolerance& tol = {});

// Gauss hypergeometric 2F1(a,b;c;z) for z <= 0 (series, Pfaff transformation,
// truncating cases evaluated exactly).
double hyp2f1(double a, double b, double c, double z, const EvalTolerance& tol = {});

// int_0^t (t-s)^{2H-2} log((t+s)/(t-s)) ds for H in (1/2, 1), t > 0.
// Returns +infinity once H - 1/2 < 1e-8 (the (2H-1)^{-2} pole).
double log_kernel_integral(double H, double t, const EvalTolerance& tol = {});

// Shared per-(a,b) interpolation table for y -> E_{a,b}(-y), y >= 0, built by
// error-driven refinement to ~1e-10 relative accuracy.  Dense kernel and
// sampling quadratures evaluate through it; one-off calls should use
// mittag_leffler directly.
class MLInterpolant {
public:
    static const MLInterpolant& get(double a, double b);
    double operator()(double y) const;

private:
    MLInterpolant(double a, double b);
    double a_ = 1.0, b_ = 1.0;
    bool closed_form_ = false;
    double y_lo_ = 1e-6, y_hi_ = 1e8;
    std::vector<double> lny_, val_;  // refined node set on [ln y_lo, ln y_hi]
};

namespace detail {
// Individual evaluation branches, exposed for branch-consistency tests.
MLResult ml_taylor(double a, double b, double z, const EvalTolerance& tol);
MLResult ml_asymptotic(double a, double b, double x, const EvalTolerance& tol);  // arg -x, x > 0
MLResult ml_integral(double a, double b, double x, const EvalTolerance& tol);    // arg -x, x > 0
double taylor_cancellation_limit(double a, double target_tol);
}  // namespace detail

}  // namespace stf::specfun

#pragma once

#include <functional>
#include <vector>

#include "stf/types.hpp"

namespace stf::quad {

using Fn = std::function<double(double)>;

// Adaptive Gauss-Kronrod (7-15) on a finite interval.
double adaptive(const Fn& f, double a, double b, double rel_tol, double abs_tol = 0.0,
                int max_intervals = 2000);

// Adaptive integral over [a, inf) via the rational substitution x = a + t/(1-t).
// Suitable for absolutely convergent tails.
double to_infinity(const Fn& f, double a, double rel_tol, double abs_tol = 0.0,
                   int max_intervals = 2000);

// Wynn epsilon acceleration of a sequence of partial sums; returns the best
// available extrapolation together with a crude error estimate.
struct AccelResult {
    double value = 0.0;
    double err_estimate = 0.0;
};
AccelResult wynn_epsilon(const std::vector<double>& partial_sums);

// Integral of an oscillatory integrand over [a, inf): integrates panel by
// panel between consecutive nodes (typically zeros of the trigonometric
// factor) and accelerates the alternating panel sums.  `node(k)` must be
// increasing with node(0) >= a.
double oscillatory_tail(const Fn& f, double a, const std::function<double(int)>& node,
                        double rel_tol, double abs_tol, int max_panels,
                        const QuadratureSpec* spec = nullptr);

// Convenience: full oscillatory integral [a, inf) where the first node can sit
// well beyond a; integrates [a, node(k0)] adaptively first.
double oscillatory(const Fn& f, double a, const std::function<double(int)>& node,
                   double rel_tol, double abs_tol, int max_panels,
                   const QuadratureSpec* spec = nullptr);

// Tail integral [a, inf) of a mixture of an algebraically decaying mean and an
// oscillation of known period: geometric blocks snapped to whole periods, with
// ratio extrapolation of the remaining mean.  Pass period = 0 for a purely
// algebraic tail.
double mixed_tail(const Fn& f, double a, double period, double rel_tol, double abs_tol,
                  const QuadratureSpec* spec = nullptr);

}  // namespace stf::quad

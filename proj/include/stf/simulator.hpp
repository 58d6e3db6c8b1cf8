#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "stf/types.hpp"

namespace stf::sim {

struct CovMatrix {
    std::vector<SpacetimePoint> points;
    Eigen::MatrixXd entries;
    double jitter = 0.0;  // diagonal regularization actually applied
};

struct FieldSample {
    std::uint64_t seed = 0;
    int mode_count = 0;
    Eigen::MatrixXd values;        // replicates x points
    double tail_mass_fraction = 0.0;  // spectral mass outside the frequency box
};

struct SmallBallCurve {
    std::vector<double> eps;
    std::vector<double> prob;
    long n_samples = 0;
};

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

// E[u(a) u(b)] through the spectral double integral (d = 1).
double covariance(const EquationParams& p, const NoiseParams& n, const SpacetimePoint& a,
                  const SpacetimePoint& b, const QuadratureSpec& q = {});

// Symmetric covariance matrix of the solution on a point set, with minimal
// diagonal jitter to restore positive definiteness.
CovMatrix gram_matrix(const EquationParams& p, const NoiseParams& n,
                      const std::vector<SpacetimePoint>& points, const QuadratureSpec& q = {});

// Seeded harmonizable-representation sampler: one complex Gaussian per
// frequency cell, reproducible in any evaluation order.
FieldSample sample_field(const EquationParams& p, const NoiseParams& n,
                         const std::vector<SpacetimePoint>& points, int mode_count,
                         int n_replicates, std::uint64_t seed, const QuadratureSpec& q = {});

// Var(u_target | u_given) as a Schur complement of the (jittered) Gram matrix.
double conditional_variance(const CovMatrix& m, int target, const std::vector<int>& given);

// OLS fit of log(value) against log(lag).
FitResult fit_exponent(const std::vector<double>& lags, const std::vector<double>& values);

// Monte Carlo small-ball curve for the temporal process on [t_lo, t_hi] at x0,
// sampled exactly through the Gram factorization on a grid of grid_size points.
SmallBallCurve small_ball_mc(const EquationParams& p, const NoiseParams& n, double t_lo,
                             double t_hi, double x0, const std::vector<double>& eps_list,
                             long n_samples, int grid_size, std::uint64_t seed,
                             const QuadratureSpec& q = {});

namespace detail {
// Deterministic counter-based standard normal keyed by (seed, stream, index).
double counter_normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);
}  // namespace detail

}  // namespace stf::sim

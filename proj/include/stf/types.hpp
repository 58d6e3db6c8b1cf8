#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace stf {

// Errors ------------------------------------------------------------------

// Parameter combination outside the solvable regime (no random field solution,
// or an operation that requires one).
class RegimeError : public std::runtime_error {
public:
    explicit RegimeError(const std::string& what) : std::runtime_error(what) {}
};

// Requested tolerance could not be met within the configured budget.
class ConvergenceError : public std::runtime_error {
public:
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

// Operation not available for these parameters (e.g. physical-space kernel in
// unsupported dimension).
class UnsupportedError : public std::runtime_error {
public:
    explicit UnsupportedError(const std::string& what) : std::runtime_error(what) {}
};

// Gram matrix could not be factorized within the jitter budget.
class ConditioningError : public std::runtime_error {
public:
    explicit ConditioningError(const std::string& what) : std::runtime_error(what) {}
};

// Domain types --------------------------------------------------------------

// Exact ratio used when the spatial order is known as a rational number, so
// the arithmetic-regime test in the origin expansion can be exact.
struct Rational {
    long long num = 0;
    long long den = 1;

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

// Deterministic parameters of the operator (d_t^beta + (nu/2)(-Lap)^{alpha/2})
// with forcing integrated to order gamma.
struct EquationParams {
    double alpha = 2.0;   // spatial order, > 0
    double beta = 1.0;    // time order, in (0, 2]
    double gamma = 0.0;   // forcing integral order, >= 0
    double nu = 2.0;      // diffusivity, > 0
    int d = 1;            // spatial dimension, >= 1
    std::optional<Rational> alpha_ratio;  // exact alpha when known

    void validate() const {
        if (!(alpha > 0.0)) throw std::domain_error("alpha must be positive");
        if (!(beta > 0.0 && beta <= 2.0)) throw std::domain_error("beta must be in (0, 2]");
        if (!(gamma >= 0.0)) throw std::domain_error("gamma must be nonnegative");
        if (!(nu > 0.0)) throw std::domain_error("nu must be positive");
        if (d < 1) throw std::domain_error("d must be a positive integer");
        if (alpha_ratio && (alpha_ratio->den <= 0 || alpha_ratio->num <= 0))
            throw std::domain_error("alpha_ratio must be a positive ratio");
    }
};

// Noise roughness pair: Hurst index in time, Riesz exponent in space.
struct NoiseParams {
    double H = 0.5;     // in [1/2, 1)
    double ell = 1.0;   // in (0, 2d)

    // The closed right endpoint ell = 2d is admitted so that boundary
    // parameter points can be classified (they are never solvable).
    void validate(int d) const {
        if (!(H >= 0.5 && H < 1.0)) throw std::domain_error("H must be in [1/2, 1)");
        if (!(ell > 0.0 && ell <= 2.0 * d)) throw std::domain_error("ell must be in (0, 2d]");
    }
};

// Stopping control for series evaluation.
struct EvalTolerance {
    double abs_tol = 0.0;
    double rel_tol = 1e-12;
    int max_terms = 4000;

    void validate() const {
        if (!(abs_tol >= 0.0) || !(rel_tol >= 0.0) || abs_tol + rel_tol <= 0.0)
            throw std::domain_error("abs_tol + rel_tol must be positive");
        if (max_terms < 1) throw std::domain_error("max_terms must be positive");
    }
};

enum class OscillationMode { PanelsBetweenZeros, PlainAdaptive };

// Control block for the quadrature paths.  The cancel flag is cooperative:
// long integrations poll it and abort with ConvergenceError when set.
struct QuadratureSpec {
    double rel_tol = 1e-9;
    int max_panels = 4000;
    OscillationMode oscillation_mode = OscillationMode::PanelsBetweenZeros;
    std::atomic<bool>* cancel = nullptr;

    void check_cancel() const {
        if (cancel && cancel->load(std::memory_order_relaxed))
            throw ConvergenceError("quadrature cancelled");
    }
};

// A point (t, x) with scalar spatial coordinate (the numeric routes are d=1).
struct SpacetimePoint {
    double t = 1.0;
    double x = 0.0;

    void validate() const {
        if (!(t > 0.0)) throw std::domain_error("SpacetimePoint: t must be positive");
    }
};

inline bool nearly_integer(double x, double tol = 1e-12) {
    return std::abs(x - std::round(x)) <= tol * std::max(1.0, std::abs(x));
}

}  // namespace stf

#pragma once

#include <functional>

#include "stf/types.hpp"

namespace stf::variance {

enum class KMethod { Auto, ClosedForm, Quadrature };

enum class KCase { None, K0, KPlus1, K1, K2, K3, K4, K5 };

struct KResult {
    double value = 0.0;
    KMethod method = KMethod::Quadrature;
    KCase case_tag = KCase::None;
    bool closed_form_unavailable = false;  // Auto fell back to quadrature
};

// Variance constant K with E[u(t,x)^2] = K t^{2 rho0}.  Closed forms exist for
// beta in {1,2}, gamma = 0; the quadrature path evaluates the (single or
// double) time integral against the radial spectral measure.
KResult k_constant(const EquationParams& p, const NoiseParams& n, KMethod method = KMethod::Auto,
                   const QuadratureSpec& q = {});

enum class FMethod { ClosedForm, Quadrature };

// F_theta(s1, s2) = int_0^inf x^theta sin(s1 x) sin(s2 x) dx.
// Diagonal requires theta in (-3,-1); off-diagonal theta in (-3,0).
double trig_integral_F(double theta, double s1, double s2, FMethod method = FMethod::ClosedForm,
                       const QuadratureSpec& q = {});

// int_0^inf x^theta E_{a,b}(-s1 x) E_{a,b}(-s2 x) dx, theta in (-1,1).
double ml_product_integral(double a, double b, double theta, double s1, double s2,
                           const QuadratureSpec& q = {});

// int_0^t w^{(theta_b-1)/H} |E_{beta,theta_b}(-lambda w^beta)|^{1/H} dw.
double ml_power_time_integral(double beta, double theta_b, double H, double lambda, double t,
                              const QuadratureSpec& q = {});

// N_{alpha,eta}(t,z) = z^{-alpha} int_R |tau|^{1-2H} |int_0^t e^{i tau s}
//   sin(s z^{alpha/2} + eta) ds|^2 dtau.
double balan_N(double alpha, double eta, double H, double t, double z,
               const QuadratureSpec& q = {});

// Two-sided comparison kernel of the generalized Balan bounds (closed form).
double balan_bound_kernel(double H, double t, double a);

enum class Axis { Time, Space };

// E[(u(a) - u(b))^2] for points sharing the other coordinate, d = 1.
double increment_variance(const EquationParams& p, const NoiseParams& n, const SpacetimePoint& a,
                          const SpacetimePoint& b, Axis axis, const QuadratureSpec& q = {});

namespace detail {
// Spectral building blocks shared with the simulator.
// int_0^{min(t1,t2)} g(t1-w, r) g(t2-w, r) dw with g(v,r) the Fourier symbol.
double time_l2_product(const EquationParams& p, double t1, double t2, double r,
                       const QuadratureSpec& q);
// double time integral with the |w-w'|^{2H-2} weight over [0,t1] x [0,t2]
double time_fractional_product(const EquationParams& p, double H, double t1, double t2, double r,
                               const QuadratureSpec& q);
// int_0^inf r^{ell-1} phi(r) dr with oscillation-aware tail handling
double radial_integral(const EquationParams& p, double ell, const std::function<double(double)>& phi,
                       double time_scale, const QuadratureSpec& q);
double surface_constant(int d);  // 2 pi^{d/2} / Gamma(d/2)
}  // namespace detail

}  // namespace stf::variance

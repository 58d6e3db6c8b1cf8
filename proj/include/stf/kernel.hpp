#pragma once

#include <vector>

#include "stf/special_functions.hpp"
#include "stf/types.hpp"

namespace stf::kernel {

enum class KernelKind { Z, Zstar, Y };

// Mellin-Barnes parameters shared by the three fundamental-solution
// H-functions (identical across Z, Z*, Y).
struct FoxHParams {
    double a_star = 0.0;     // 2 - beta
    double a1_star = 0.0;    // alpha/2 + 1 - beta
    double delta_cap = 0.0;  // alpha - beta
    double mu = 0.0;         // (d+1)/2 - (beta+gamma)
    double delta = 0.0;      // (alpha/2)^alpha beta^{-beta}
};

struct SeriesTerm {
    double exponent = 0.0;  // power of z
    int log_power = 0;      // 0 or 1
    double coefficient = 0.0;
};

enum class OriginRegime { Generic, Arithmetic };

// Expansion of f(z) = H^{2,1}_{2,3}[z] near z = 0; G(1,x) is recovered through
// G(1,x) = pi^{-d/2} |x|^{-d} f(c2 |x|^alpha) with c2 = 2^{1-alpha}/nu.
struct OriginExpansion {
    OriginRegime regime = OriginRegime::Generic;
    std::vector<SeriesTerm> terms;   // sorted by (exponent, log_power)
    long long ell1_star = -1;        // arithmetic regime only
    long long ell2_star = -1;
    std::vector<long long> excluded_l1;  // indices of L1 below the scan bound
    std::vector<long long> excluded_l2;
    bool detection_by_tolerance = false;  // alpha tested with 1e-12 tolerance, not exactly
    bool scan_truncated = false;          // arithmetic relation may exist beyond the bound

    // partial sum of the expansion at z > 0
    double eval(double z) const;
};

enum class AsymptoteForm { PowerLaw, StretchedExp, OscillatoryExp };

// Leading behavior of G(1,x) as |x| -> infinity.
struct InfinityAsymptote {
    AsymptoteForm form = AsymptoteForm::PowerLaw;
    // PowerLaw:      G ~ theta1 |x|^{-(d+alpha)}
    // StretchedExp:  G ~ theta21 |x|^{p} exp(-theta22 |x|^{q}), q = alpha/(2-beta)
    // Oscillatory:   G ~ theta31 |x|^{p} cos(theta32 - theta33 cos(th) |x|^{q})
    //                      * exp(-theta33 sin(th) |x|^{q}),   q = alpha/(alpha-beta)
    double theta1 = 0.0;
    double theta21 = 0.0, theta22 = 0.0;
    double theta31 = 0.0, theta32 = 0.0, theta33 = 0.0;
    double theta_ab = 0.0;     // in (0, pi/2), oscillatory case
    double power = 0.0;        // p above
    double rate_exponent = 0.0;  // q above

    double eval(double x) const;  // leading term at |x| = x
};

// Radial Fourier symbol of the selected fundamental solution at |xi| = r.
double fourier_kernel(KernelKind kind, const EquationParams& p, double t, double r);

// G(t, x) at |x| = r for d in {1, 3} via the radial inverse Fourier integral.
double green_function(const EquationParams& p, double t, double r, const EvalTolerance& tol = {});

OriginExpansion origin_expansion(const EquationParams& p, int n_terms);

// Approximation of G(1, x) from the first terms of the origin expansion.
double green_origin_approx(const EquationParams& p, const OriginExpansion& exp, double x);

InfinityAsymptote infinity_asymptote(const EquationParams& p);

FoxHParams fox_h_parameters(const EquationParams& p);

}  // namespace stf::kernel

#pragma once

#include "stf/types.hpp"

namespace stf::solvability {

// All derived regularity exponents.  rho0 and rho1 coincide by definition;
// both are kept so callers can follow the paper's two notations.
struct Exponents {
    double rho0 = 0.0;        // beta + gamma - 1 + H - ell*beta/(2 alpha)
    double rho = 0.0;         // branch-selected temporal exponent
    double rho_tilde = 0.0;   // min(alpha*rho/beta, alpha - ell/2)
    double rho1 = 0.0;
    double rho2 = 0.0;        // gamma + H - ell/alpha + 1/2
    double rho_tilde1 = 0.0;
    double rho_tilde2 = 0.0;
};

enum class Solvability { Solvable, NotSolvable, SolvableSufficientOnly, Unknown };

enum class DalangCase {
    SubHyperbolic,   // beta in (0,2), or beta = 2 with gamma > 1 (iff condition)
    WaveWhiteForcing,  // beta = 2, gamma = 0 (iff condition)
    WaveFractionalForcing,  // beta = 2, gamma in (0,1] (sufficient only)
};

struct Verdict {
    Solvability status = Solvability::Unknown;
    DalangCase case_tag = DalangCase::SubHyperbolic;
    bool on_boundary = false;  // some threshold held with equality
};

enum class SlndTime { TwoSided, OneSided, None };

struct RegimeTags {
    SlndTime slnd_time = SlndTime::None;
    bool slnd_space = false;
    bool variance_lower_time_valid = false;
    bool extra_assumption_needed = false;  // ell < alpha (gamma + 1/2) required
    bool extra_assumption_holds = false;
};

enum class ModulusKind { M1, M2, W1, W2 };

Exponents exponents(const EquationParams& p, const NoiseParams& n);

Verdict dalang_check(const EquationParams& p, const NoiseParams& n);

// Variance scaling (m1, m2) and modulus-of-continuity (w1, w2) functions at
// radius r in (0, 1], with the critical-case logarithmic branches.
double modulus(const EquationParams& p, const NoiseParams& n, ModulusKind which, double r);

RegimeTags regime_report(const EquationParams& p, const NoiseParams& n);

}  // namespace stf::solvability

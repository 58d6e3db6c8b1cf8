#include "stf/solvability.hpp"

#include <algorithm>
#include <cmath>

namespace stf::solvability {

namespace {

void validate(const EquationParams& p, const NoiseParams& n) {
    p.validate();
    n.validate(p.d);
}

bool is_wave(const EquationParams& p) { return p.beta == 2.0; }

}  // namespace

Exponents exponents(const EquationParams& p, const NoiseParams& n) {
    validate(p, n);
    Exponents e;
    e.rho1 = p.beta + p.gamma + n.H - n.ell * p.beta / (2.0 * p.alpha) - 1.0;
    e.rho0 = e.rho1;
    e.rho2 = p.gamma + n.H - n.ell / p.alpha + 0.5;
    e.rho = (!is_wave(p) || p.gamma > 1.0) ? e.rho1 : e.rho2;
    const double space_cap = p.alpha - n.ell / 2.0;
    e.rho_tilde = std::min(p.alpha * e.rho / p.beta, space_cap);
    e.rho_tilde1 = std::min(p.alpha * e.rho1 / p.beta, space_cap);
    e.rho_tilde2 = std::min(p.alpha * e.rho2 / 2.0, space_cap);
    return e;
}

Verdict dalang_check(const EquationParams& p, const NoiseParams& n) {
    validate(p, n);
    const Exponents e = exponents(p, n);
    Verdict v;
    if (!is_wave(p) || p.gamma > 1.0) {
        v.case_tag = DalangCase::SubHyperbolic;
        const bool ok = e.rho0 > 0.0 && n.ell < 2.0 * p.alpha;
        v.status = ok ? Solvability::Solvable : Solvability::NotSolvable;
        v.on_boundary = (e.rho0 == 0.0) || (n.ell == 2.0 * p.alpha);
        return v;
    }
    if (p.gamma == 0.0) {
        v.case_tag = DalangCase::WaveWhiteForcing;
        const double threshold = (0.5 + n.H) * p.alpha;
        v.status = n.ell < threshold ? Solvability::Solvable : Solvability::NotSolvable;
        v.on_boundary = (n.ell == threshold);
        return v;
    }
    if (p.gamma <= 1.0) {
        v.case_tag = DalangCase::WaveFractionalForcing;
        const double threshold = std::min(2.0, p.gamma + n.H + 0.5) * p.alpha;
        v.status = n.ell < threshold ? Solvability::SolvableSufficientOnly : Solvability::Unknown;
        v.on_boundary = (n.ell == threshold);
        return v;
    }
    // unreachable: gamma > 1 handled by the first branch
    return v;
}

double modulus(const EquationParams& p, const NoiseParams& n, ModulusKind which, double r) {
    validate(p, n);
    if (!(r > 0.0 && r <= 1.0)) throw std::domain_error("modulus: r must be in (0, 1]");
    const Verdict v = dalang_check(p, n);
    if (v.status == Solvability::NotSolvable || v.status == Solvability::Unknown)
        throw RegimeError("modulus: no random field solution in this regime");
    const Exponents e = exponents(p, n);
    const double rho = (which == ModulusKind::M1 || which == ModulusKind::W1) ? e.rho : e.rho_tilde;
    const bool critical = (rho == 1.0);
    switch (which) {
        case ModulusKind::M1:
        case ModulusKind::M2:
            if (critical) return r * r * (1.0 + std::abs(std::log(r)));
            return std::pow(r, 2.0 * std::min(rho, 1.0));
        case ModulusKind::W1:
        case ModulusKind::W2:
            if (critical) return r * std::log1p(1.0 / r);
            return std::pow(r, rho) * std::sqrt(std::log1p(1.0 / r));
    }
    throw std::invalid_argument("modulus: unknown kind");
}

RegimeTags regime_report(const EquationParams& p, const NoiseParams& n) {
    validate(p, n);
    RegimeTags tags;
    const bool wave = is_wave(p);
    if (p.beta == 1.0 || (wave && p.gamma <= 1.0))
        tags.slnd_time = SlndTime::TwoSided;
    else if (!wave)
        tags.slnd_time = SlndTime::OneSided;
    else
        tags.slnd_time = SlndTime::None;  // beta = 2, gamma > 1: conjectural
    const Verdict v = dalang_check(p, n);
    tags.slnd_space =
        v.status == Solvability::Solvable || v.status == Solvability::SolvableSufficientOnly;
    tags.variance_lower_time_valid = !wave || p.gamma <= 1.0;
    tags.extra_assumption_needed = wave && p.gamma > 0.0 && p.gamma <= 2.0;
    tags.extra_assumption_holds = n.ell < p.alpha * (p.gamma + 0.5);
    return tags;
}

}  // namespace stf::solvability

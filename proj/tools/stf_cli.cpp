// stf: batch front end for the stochastic time-fractional equation toolkit.
//
// Subcommands: check, exponents, kconst, kernel (eval|expand|asym), varinc,
// simulate, condvar, smallball.  All outputs are byte-reproducible for a fixed
// configuration and seed; floating point is printed with 17 significant digits.

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "stf/kernel.hpp"
#include "stf/simulator.hpp"
#include "stf/solvability.hpp"
#include "stf/special_functions.hpp"
#include "stf/types.hpp"
#include "stf/variance.hpp"

using nlohmann::json;
using namespace stf;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRegime = 2;
constexpr int kExitConvergence = 3;
constexpr int kExitUsage = 64;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct CommonOpts {
    EquationParams p;
    NoiseParams n;
    std::uint64_t seed = 1;
    std::string out_path;
    std::string format = "json";
    int threads = 1;
};

void add_param_flags(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--alpha", o.p.alpha, "spatial order alpha > 0");
    cmd->add_option("--beta", o.p.beta, "time order beta in (0,2]");
    cmd->add_option("--gamma", o.p.gamma, "forcing integral order gamma >= 0");
    cmd->add_option("--nu", o.p.nu, "diffusivity nu > 0");
    cmd->add_option("--d", o.p.d, "spatial dimension");
    cmd->add_option("--H", o.n.H, "Hurst index in [1/2,1)");
    cmd->add_option("--ell", o.n.ell, "Riesz exponent in (0,2d)");
    cmd->add_option("--seed", o.seed, "RNG seed");
    cmd->add_option("--out", o.out_path, "output file (default: stdout or $STF_OUT_DIR)");
    cmd->add_option("--format", o.format, "output format: json|csv")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--threads", o.threads, "worker cap")->check(CLI::PositiveNumber);
}

json params_json(const CommonOpts& o) {
    return json{{"alpha", o.p.alpha}, {"beta", o.p.beta},   {"gamma", o.p.gamma},
                {"nu", o.p.nu},       {"d", o.p.d},         {"H", o.n.H},
                {"ell", o.n.ell}};
}

void emit(const CommonOpts& o, const std::string& body) {
    std::string path = o.out_path;
    if (path.empty()) {
        if (const char* dir = std::getenv("STF_OUT_DIR")) path = std::string(dir) + "/stf_out";
    }
    if (path.empty()) {
        std::cout << body;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file " + path);
    f << body;
}

std::string verdict_name(solvability::Solvability s) {
    switch (s) {
        case solvability::Solvability::Solvable: return "Solvable";
        case solvability::Solvability::NotSolvable: return "NotSolvable";
        case solvability::Solvability::SolvableSufficientOnly: return "SolvableSufficientOnly";
        case solvability::Solvability::Unknown: return "Unknown";
    }
    return "?";
}

std::string case_name(solvability::DalangCase c) {
    switch (c) {
        case solvability::DalangCase::SubHyperbolic: return "sub_hyperbolic";
        case solvability::DalangCase::WaveWhiteForcing: return "wave_white_forcing";
        case solvability::DalangCase::WaveFractionalForcing: return "wave_fractional_forcing";
    }
    return "?";
}

json exponents_json(const solvability::Exponents& e) {
    return json{{"rho0", e.rho0},       {"rho", e.rho},
                {"rho_tilde", e.rho_tilde}, {"rho1", e.rho1},
                {"rho2", e.rho2},       {"rho_tilde1", e.rho_tilde1},
                {"rho_tilde2", e.rho_tilde2}};
}

int run_check(const CommonOpts& o) {
    const auto e = solvability::exponents(o.p, o.n);
    const auto v = solvability::dalang_check(o.p, o.n);
    const auto tags = solvability::regime_report(o.p, o.n);
    json moduli = json::array();
    if (v.status == solvability::Solvability::Solvable ||
        v.status == solvability::Solvability::SolvableSufficientOnly) {
        for (double r : {0.5, 0.25, 0.125, 0.0625}) {
            moduli.push_back(json{{"r", r},
                                  {"m1", solvability::modulus(o.p, o.n, solvability::ModulusKind::M1, r)},
                                  {"m2", solvability::modulus(o.p, o.n, solvability::ModulusKind::M2, r)},
                                  {"w1", solvability::modulus(o.p, o.n, solvability::ModulusKind::W1, r)},
                                  {"w2", solvability::modulus(o.p, o.n, solvability::ModulusKind::W2, r)}});
        }
    }
    json out{{"params", params_json(o)},
             {"exponents", exponents_json(e)},
             {"verdict",
              json{{"status", verdict_name(v.status)},
                   {"case", case_name(v.case_tag)},
                   {"on_boundary", v.on_boundary}}},
             {"tags",
              json{{"slnd_time", tags.slnd_time == solvability::SlndTime::TwoSided  ? "two_sided"
                                 : tags.slnd_time == solvability::SlndTime::OneSided ? "one_sided"
                                                                                     : "none"},
                   {"slnd_space", tags.slnd_space},
                   {"variance_lower_time_valid", tags.variance_lower_time_valid},
                   {"extra_assumption_needed", tags.extra_assumption_needed},
                   {"extra_assumption_holds", tags.extra_assumption_holds}}},
             {"moduli_samples", moduli}};
    emit(o, out.dump(2) + "\n");
    return kExitOk;
}

int run_exponents(const CommonOpts& o) {
    const auto e = solvability::exponents(o.p, o.n);
    json out{{"params", params_json(o)}, {"exponents", exponents_json(e)}};
    emit(o, out.dump(2) + "\n");
    return kExitOk;
}

int run_kconst(const CommonOpts& o, double rel_tol) {
    QuadratureSpec q;
    q.rel_tol = rel_tol;
    const auto closed = variance::k_constant(o.p, o.n, variance::KMethod::Auto, q);
    const auto oracle = variance::k_constant(o.p, o.n, variance::KMethod::Quadrature, q);
    const double rel_err = std::abs(closed.value - oracle.value) / std::abs(oracle.value);
    const char* case_names[] = {"none", "K-0", "K+1", "K-1", "K-2", "K-3", "K-4", "K-5"};
    if (o.format == "csv") {
        std::ostringstream s;
        s << "alpha,beta,gamma,nu,d,H,ell,value,method,case,oracle_value,rel_err\n";
        s << fmt17(o.p.alpha) << ',' << fmt17(o.p.beta) << ',' << fmt17(o.p.gamma) << ','
          << fmt17(o.p.nu) << ',' << o.p.d << ',' << fmt17(o.n.H) << ',' << fmt17(o.n.ell) << ','
          << fmt17(closed.value) << ','
          << (closed.method == variance::KMethod::ClosedForm ? "closed_form" : "quadrature") << ','
          << case_names[static_cast<int>(closed.case_tag)] << ',' << fmt17(oracle.value) << ','
          << fmt17(rel_err) << "\n";
        emit(o, s.str());
        return kExitOk;
    }
    json out{{"params", params_json(o)},
             {"value", closed.value},
             {"method", closed.method == variance::KMethod::ClosedForm ? "closed_form" : "quadrature"},
             {"case", case_names[static_cast<int>(closed.case_tag)]},
             {"oracle_value", oracle.value},
             {"rel_err", rel_err}};
    emit(o, out.dump(2) + "\n");
    return kExitOk;
}

int run_kernel_eval(const CommonOpts& o, const std::string& kind_name, double t, double r,
                    bool physical) {
    kernel::KernelKind kind = kernel::KernelKind::Y;
    if (kind_name == "Z") kind = kernel::KernelKind::Z;
    else if (kind_name == "Zstar") kind = kernel::KernelKind::Zstar;
    json out{{"params", params_json(o)}, {"kind", kind_name}, {"t", t}, {"r", r},
             {"fourier", kernel::fourier_kernel(kind, o.p, t, r)}};
    if (physical) out["green"] = kernel::green_function(o.p, t, r);
    emit(o, out.dump(2) + "\n");
    return kExitOk;
}

int run_kernel_expand(const CommonOpts& o, int n_terms) {
    const auto e = kernel::origin_expansion(o.p, n_terms);
    json terms = json::array();
    for (const auto& t : e.terms)
        terms.push_back(json{{"exp", t.exponent}, {"logpow", t.log_power}, {"coef", t.coefficient}});
    json out{{"params", params_json(o)},
             {"regime", e.regime == kernel::OriginRegime::Generic ? "generic" : "arithmetic"},
             {"terms", terms}};
    if (e.regime == kernel::OriginRegime::Arithmetic) {
        out["ell1_star"] = e.ell1_star;
        out["ell2_star"] = e.ell2_star;
        out["excluded_l1"] = e.excluded_l1;
        out["excluded_l2"] = e.excluded_l2;
    }
    out["detection_by_tolerance"] = e.detection_by_tolerance;
    out["scan_truncated"] = e.scan_truncated;
    emit(o, out.dump(2) + "\n");
    return kExitOk;
}

int run_kernel_asym(const CommonOpts& o) {
    const auto a = kernel::infinity_asymptote(o.p);
    json constants;
    std::string form;
    switch (a.form) {
        case kernel::AsymptoteForm::PowerLaw:
            form = "power_law";
            constants = json{{"theta1", a.theta1}};
            break;
        case kernel::AsymptoteForm::StretchedExp:
            form = "stretched_exp";
            constants = json{{"theta21", a.theta21}, {"theta22", a.theta22}};
            break;
        case kernel::AsymptoteForm::OscillatoryExp:
            form = "oscillatory_exp";
            constants = json{{"theta31", a.theta31},
                             {"theta32", a.theta32},
                             {"theta33", a.theta33},
                             {"theta_ab", a.theta_ab}};
            break;
    }
    json out{{"params", params_json(o)},
             {"form", form},
             {"constants", constants},
             {"power", a.power},
             {"rate_exponent", a.rate_exponent}};
    emit(o, out.dump(2) + "\n");
    return kExitOk;
}

int run_varinc(const CommonOpts& o, const std::string& axis_name, double t0, double x0,
               int lag_lo, int lag_hi, double rel_tol) {
    QuadratureSpec q;
    q.rel_tol = rel_tol;
    const auto axis = axis_name == "time" ? variance::Axis::Time : variance::Axis::Space;
    std::vector<double> lags, vals;
    std::ostringstream csv;
    csv << "lag,variance\n";
    for (int k = lag_hi; k >= lag_lo; --k) {
        const double lag = std::ldexp(1.0, -k);
        SpacetimePoint a{t0, x0};
        SpacetimePoint b = axis == variance::Axis::Time ? SpacetimePoint{t0 + lag, x0}
                                                        : SpacetimePoint{t0, x0 + lag};
        const double v = variance::increment_variance(o.p, o.n, a, b, axis, q);
        lags.push_back(lag);
        vals.push_back(v);
        csv << fmt17(lag) << ',' << fmt17(v) << "\n";
    }
    const auto fit = sim::fit_exponent(lags, vals);
    if (o.format == "csv") {
        emit(o, csv.str());
        return kExitOk;
    }
    json rows = json::array();
    for (std::size_t i = 0; i < lags.size(); ++i)
        rows.push_back(json{{"lag", lags[i]}, {"variance", vals[i]}});
    json out{{"params", params_json(o)}, {"axis", axis_name}, {"rows", rows},
             {"slope", fit.slope},       {"r2", fit.r2}};
    emit(o, out.dump(2) + "\n");
    return kExitOk;
}

int run_simulate(const CommonOpts& o, double t0, double t1, int n_points, int mode_count,
                 int replicates) {
    std::vector<SpacetimePoint> pts(n_points);
    for (int i = 0; i < n_points; ++i)
        pts[i] = {t0 + (t1 - t0) * i / std::max(1, n_points - 1), 0.0};
    const auto s = sim::sample_field(o.p, o.n, pts, mode_count, replicates, o.seed);
    json header{{"params", params_json(o)},
                {"seed", o.seed},
                {"mode_count", s.mode_count},
                {"tail_mass_fraction", s.tail_mass_fraction},
                {"jitter", 0.0}};
    if (o.format == "json") {
        json values = json::array();
        for (int rep = 0; rep < s.values.rows(); ++rep) {
            json row = json::array();
            for (int i = 0; i < s.values.cols(); ++i) row.push_back(s.values(rep, i));
            values.push_back(row);
        }
        header["values"] = values;
        emit(o, header.dump(2) + "\n");
        return kExitOk;
    }
    std::ostringstream csv;
    csv << "# " << header.dump() << "\n";
    csv << "replicate";
    for (int i = 0; i < n_points; ++i) csv << ",u" << i;
    csv << "\n";
    for (int rep = 0; rep < s.values.rows(); ++rep) {
        csv << rep;
        for (int i = 0; i < s.values.cols(); ++i) csv << ',' << fmt17(s.values(rep, i));
        csv << "\n";
    }
    emit(o, csv.str());
    return kExitOk;
}

int run_condvar(const CommonOpts& o, const std::string& axis_name, int n_configs, int n_cond,
                double span) {
    // sweep of conditional variances against the nearest-point distance
    json rows = json::array();
    QuadratureSpec q;
    for (int cfg = 0; cfg < n_configs; ++cfg) {
        std::vector<SpacetimePoint> pts;
        const double t0 = 1.0, x0 = 0.0;
        // deterministic pseudo-random configuration from the seed
        auto u01 = [&](int k) {
            return 0.5 + 0.499 * std::sin(1e4 * std::sin(o.seed + 37.0 * cfg + 11.0 * k + 1.0));
        };
        pts.push_back({t0 + (axis_name == "time" ? span * u01(0) : 0.0),
                       x0 + (axis_name == "space" ? span * u01(0) : 0.0)});
        for (int j = 1; j <= n_cond; ++j) {
            pts.push_back({t0 + (axis_name == "time" ? span * u01(j) : 0.0),
                           x0 + (axis_name == "space" ? span * u01(j) : 0.0)});
        }
        const auto m = sim::gram_matrix(o.p, o.n, pts, q);
        std::vector<int> given(n_cond);
        for (int j = 0; j < n_cond; ++j) given[j] = j + 1;
        const double cv = sim::conditional_variance(m, 0, given);
        double dmin = 1e300;
        for (int j = 1; j <= n_cond; ++j) {
            const double dist = axis_name == "time" ? std::abs(pts[0].t - pts[j].t)
                                                    : std::abs(pts[0].x - pts[j].x);
            dmin = std::min(dmin, dist);
        }
        rows.push_back(json{{"config", cfg}, {"cond_var", cv}, {"min_dist", dmin}, {"jitter", m.jitter}});
    }
    json out{{"params", params_json(o)}, {"axis", axis_name}, {"rows", rows}};
    emit(o, out.dump(2) + "\n");
    return kExitOk;
}

int run_smallball(const CommonOpts& o, double t0, double t1, double eps_lo, double eps_hi,
                  int n_eps, long n_samples, int grid_size) {
    std::vector<double> eps(n_eps);
    for (int i = 0; i < n_eps; ++i)
        eps[i] = eps_lo * std::pow(eps_hi / eps_lo, static_cast<double>(i) / (n_eps - 1));
    const auto curve = sim::small_ball_mc(o.p, o.n, t0, t1, 0.0, eps, n_samples, grid_size, o.seed);
    if (o.format == "csv") {
        std::ostringstream csv;
        csv << "# " << json{{"params", params_json(o)}, {"seed", o.seed}}.dump() << "\n";
        csv << "eps,prob\n";
        for (std::size_t i = 0; i < curve.eps.size(); ++i)
            csv << fmt17(curve.eps[i]) << ',' << fmt17(curve.prob[i]) << "\n";
        emit(o, csv.str());
        return kExitOk;
    }
    json out{{"params", params_json(o)},
             {"seed", o.seed},
             {"n_samples", curve.n_samples},
             {"eps", curve.eps},
             {"prob", curve.prob}};
    emit(o, out.dump(2) + "\n");
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stf: solvability, kernels, variance constants and Gaussian field simulation\n"
                 "for the stochastic time-fractional equation"};
    app.require_subcommand(1);

    CommonOpts o;
    double t = 1.0, r = 1.0, t1 = 2.0, x0 = 0.0;
    double rel_tol = 1e-8;
    std::string kind = "Y", axis = "time";
    int n_terms = 8, lag_lo = 4, lag_hi = 10, n_points = 16, mode_count = 1024, replicates = 64;
    int n_configs = 10, n_cond = 8;
    double span = 0.5, eps_lo = 0.05, eps_hi = 0.4;
    int n_eps = 8, grid_size = 256;
    long n_samples = 100000;
    bool physical = false;

    auto* c_check = app.add_subcommand("check", "solvability report");
    add_param_flags(c_check, o);
    auto* c_exp = app.add_subcommand("exponents", "regularity exponents");
    add_param_flags(c_exp, o);
    auto* c_k = app.add_subcommand("kconst", "variance constant: closed form + quadrature oracle");
    add_param_flags(c_k, o);
    c_k->add_option("--rel-tol", rel_tol, "quadrature tolerance");
    auto* c_kernel = app.add_subcommand("kernel", "fundamental solution operations");
    auto* c_eval = c_kernel->add_subcommand("eval", "Fourier symbol / physical kernel");
    add_param_flags(c_eval, o);
    c_eval->add_option("--kind", kind, "Z|Zstar|Y")->check(CLI::IsMember({"Z", "Zstar", "Y"}));
    c_eval->add_option("--t", t, "time");
    c_eval->add_option("--r", r, "radius");
    c_eval->add_flag("--physical", physical, "also evaluate G(t,r)");
    auto* c_expand = c_kernel->add_subcommand("expand", "origin expansion");
    add_param_flags(c_expand, o);
    c_expand->add_option("--n-terms", n_terms, "number of series terms");
    auto* c_asym = c_kernel->add_subcommand("asym", "infinity asymptote");
    add_param_flags(c_asym, o);
    auto* c_varinc = app.add_subcommand("varinc", "increment-variance sweep over dyadic lags");
    add_param_flags(c_varinc, o);
    c_varinc->add_option("--axis", axis, "time|space")->check(CLI::IsMember({"time", "space"}));
    c_varinc->add_option("--t0", t, "base time");
    c_varinc->add_option("--x0", x0, "base position");
    c_varinc->add_option("--lag-lo", lag_lo, "smallest dyadic exponent");
    c_varinc->add_option("--lag-hi", lag_hi, "largest dyadic exponent");
    c_varinc->add_option("--rel-tol", rel_tol, "quadrature tolerance");
    auto* c_sim = app.add_subcommand("simulate", "harmonizable spectral sampling");
    add_param_flags(c_sim, o);
    c_sim->add_option("--t0", t, "grid start");
    c_sim->add_option("--t1", t1, "grid end");
    c_sim->add_option("--points", n_points, "grid size");
    c_sim->add_option("--modes", mode_count, "frequency cells");
    c_sim->add_option("--replicates", replicates, "number of sample paths");
    auto* c_cv = app.add_subcommand("condvar", "conditional-variance sweep");
    add_param_flags(c_cv, o);
    c_cv->add_option("--axis", axis, "time|space")->check(CLI::IsMember({"time", "space"}));
    c_cv->add_option("--configs", n_configs, "number of random configurations");
    c_cv->add_option("--conditioning", n_cond, "points conditioned on");
    c_cv->add_option("--span", span, "configuration span");
    auto* c_sb = app.add_subcommand("smallball", "small-ball Monte Carlo curve");
    add_param_flags(c_sb, o);
    c_sb->add_option("--t0", t, "interval start");
    c_sb->add_option("--t1", t1, "interval end");
    c_sb->add_option("--eps-lo", eps_lo, "smallest epsilon");
    c_sb->add_option("--eps-hi", eps_hi, "largest epsilon");
    c_sb->add_option("--n-eps", n_eps, "epsilon count");
    c_sb->add_option("--samples", n_samples, "Monte Carlo samples");
    c_sb->add_option("--grid", grid_size, "temporal grid size");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (c_check->parsed()) return run_check(o);
        if (c_exp->parsed()) return run_exponents(o);
        if (c_k->parsed()) return run_kconst(o, rel_tol);
        if (c_eval->parsed()) return run_kernel_eval(o, kind, t, r, physical);
        if (c_expand->parsed()) return run_kernel_expand(o, n_terms);
        if (c_asym->parsed()) return run_kernel_asym(o);
        if (c_varinc->parsed()) return run_varinc(o, axis, t, x0, lag_lo, lag_hi, rel_tol);
        if (c_sim->parsed()) return run_simulate(o, t, t1, n_points, mode_count, replicates);
        if (c_cv->parsed()) return run_condvar(o, axis, n_configs, n_cond, span);
        if (c_sb->parsed()) return run_smallball(o, t, t1, eps_lo, eps_hi, n_eps, n_samples, grid_size);
    } catch (const RegimeError& e) {
        std::cerr << "regime error: " << e.what() << "\n";
        return kExitRegime;
    } catch (const ConvergenceError& e) {
        std::cerr << "convergence error: " << e.what() << "\n";
        return kExitConvergence;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitUsage;
}

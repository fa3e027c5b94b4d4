// g2kit_main.cpp — command-line front end: correlate (compute + write a
// curve), compare (cross-method agreement report), classify (label a curve
// file).  Exit codes: 0 ok, 2 config, 3 domain, 4 numerical, 5 comparison
// beyond tolerance, 1 unexpected.
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "g2kit/curve_io.hpp"
#include "g2kit/errors.hpp"
#include "g2kit/model.hpp"
#include "g2kit/propagator.hpp"
#include "g2kit/qfunction.hpp"
#include "g2kit/regression.hpp"
#include "g2kit/sde.hpp"

namespace {

using g2kit::Complex;
using g2kit::ConfigError;
using g2kit::DomainError;

constexpr const char* kVersion = "g2kit 1.0.0";

struct PropagatorSpec {
    std::string kernel; // "free" | "damped"
    double omega = 0.0;
    Complex alpha0{1.0, 0.0};
    double t = 0.0;
};

struct RunConfig {
    g2kit::SystemParams params;
    g2kit::TauGrid grid;
    std::string method;
    std::optional<g2kit::sde::EnsembleConfig> ensemble;
    std::optional<PropagatorSpec> prop;
    std::string out_path;
    g2kit::curve_io::Format format = g2kit::curve_io::Format::csv;
    double tolerance = 1e-6;
};

void check_keys(const nlohmann::json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) { known = true; break; }
        if (!known)
            throw ConfigError("config: unknown key \"" + it.key() + "\" in " + where);
    }
}

double get_number(const nlohmann::json& obj, const std::string& where, const char* key) {
    if (!obj.contains(key))
        throw ConfigError("config: missing key \"" + std::string(key) + "\" in " + where);
    if (!obj.at(key).is_number())
        throw ConfigError("config: key \"" + std::string(key) + "\" in " + where + " must be a number");
    return obj.at(key).get<double>();
}

double get_number_or(const nlohmann::json& obj, const std::string& where, const char* key,
                     double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_number())
        throw ConfigError("config: key \"" + std::string(key) + "\" in " + where + " must be a number");
    return obj.at(key).get<double>();
}

std::string get_string(const nlohmann::json& obj, const std::string& where, const char* key) {
    if (!obj.contains(key))
        throw ConfigError("config: missing key \"" + std::string(key) + "\" in " + where);
    if (!obj.at(key).is_string())
        throw ConfigError("config: key \"" + std::string(key) + "\" in " + where + " must be a string");
    return obj.at(key).get<std::string>();
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();

    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(buf.str());
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config: top level must be a JSON object");
    check_keys(doc, "top level",
               {"params", "grid", "method", "ensemble", "propagator", "output", "tolerance"});

    RunConfig rc;

    if (!doc.contains("params")) throw ConfigError("config: missing \"params\" section");
    const auto& jp = doc.at("params");
    if (!jp.is_object()) throw ConfigError("config: \"params\" must be an object");
    check_keys(jp, "params", {"mu", "beta", "B_re", "B_im", "C"});
    rc.params.mu = get_number(jp, "params", "mu");
    rc.params.beta = get_number(jp, "params", "beta");
    rc.params.B = Complex(get_number_or(jp, "params", "B_re", 0.0),
                          get_number_or(jp, "params", "B_im", 0.0));
    rc.params.C = get_number(jp, "params", "C");

    if (!doc.contains("grid")) throw ConfigError("config: missing \"grid\" section");
    const auto& jg = doc.at("grid");
    if (!jg.is_object()) throw ConfigError("config: \"grid\" must be an object");
    check_keys(jg, "grid", {"tau_max", "steps"});
    rc.grid.tau_max = get_number(jg, "grid", "tau_max");
    const double steps = get_number(jg, "grid", "steps");
    if (steps != std::floor(steps))
        throw ConfigError("config: grid.steps must be an integer");
    rc.grid.steps = static_cast<int>(steps);

    rc.method = get_string(doc, "top level", "method");

    if (doc.contains("ensemble")) {
        const auto& je = doc.at("ensemble");
        if (!je.is_object()) throw ConfigError("config: \"ensemble\" must be an object");
        check_keys(je, "ensemble", {"n_traj", "seed", "dt", "t_relax", "scheme"});
        g2kit::sde::EnsembleConfig ec;
        const double n_traj = get_number(je, "ensemble", "n_traj");
        if (n_traj != std::floor(n_traj))
            throw ConfigError("config: ensemble.n_traj must be an integer");
        ec.n_traj = static_cast<std::int64_t>(n_traj);
        if (!je.contains("seed"))
            throw ConfigError("config: missing key \"seed\" in ensemble");
        if (!je.at("seed").is_number_integer() && !je.at("seed").is_number_unsigned())
            throw ConfigError("config: ensemble.seed must be an integer");
        ec.seed = je.at("seed").get<std::uint64_t>();
        ec.dt = get_number(je, "ensemble", "dt");
        ec.t_relax = get_number_or(je, "ensemble", "t_relax", 0.0);
        ec.scheme = g2kit::sde::scheme_from_string(get_string(je, "ensemble", "scheme"));
        rc.ensemble = ec;
    }

    if (doc.contains("propagator")) {
        const auto& jq = doc.at("propagator");
        if (!jq.is_object()) throw ConfigError("config: \"propagator\" must be an object");
        check_keys(jq, "propagator", {"kernel", "omega", "alpha0_re", "alpha0_im", "t"});
        PropagatorSpec ps;
        ps.kernel = get_string(jq, "propagator", "kernel");
        if (ps.kernel != "free" && ps.kernel != "damped")
            throw ConfigError("config: propagator.kernel must be \"free\" or \"damped\"");
        ps.omega = get_number_or(jq, "propagator", "omega", 0.0);
        ps.alpha0 = Complex(get_number_or(jq, "propagator", "alpha0_re", 1.0),
                            get_number_or(jq, "propagator", "alpha0_im", 0.0));
        ps.t = get_number_or(jq, "propagator", "t", 0.0);
        rc.prop = ps;
    }

    if (doc.contains("output")) {
        const auto& jo = doc.at("output");
        if (!jo.is_object()) throw ConfigError("config: \"output\" must be an object");
        check_keys(jo, "output", {"path", "format"});
        rc.out_path = get_string(jo, "output", "path");
        if (jo.contains("format"))
            rc.format = g2kit::curve_io::format_from_string(get_string(jo, "output", "format"));
    }

    rc.tolerance = get_number_or(doc, "top level", "tolerance", 1e-6);
    if (!(rc.tolerance > 0.0)) throw ConfigError("config: tolerance must be positive");
    return rc;
}

// Section-presence rules depend on the effective method, so they run after
// flag overrides.
void validate_method_sections(const RunConfig& rc) {
    if (rc.method != "regression" && rc.method != "sde" && rc.method != "qfunction" &&
        rc.method != "propagator")
        throw ConfigError("config: unknown method \"" + rc.method +
                          "\": expected regression, sde, qfunction, or propagator");
    if (rc.method == "sde" && !rc.ensemble)
        throw ConfigError("config: method \"sde\" requires an \"ensemble\" section");
    if (rc.method != "sde" && rc.ensemble)
        throw ConfigError("config: \"ensemble\" section is only valid for method \"sde\"");
    if (rc.method == "propagator" && !rc.prop)
        throw ConfigError("config: method \"propagator\" requires a \"propagator\" section");
    if (rc.method != "propagator" && rc.prop)
        throw ConfigError("config: \"propagator\" section is only valid for method \"propagator\"");
}

int threads_from_env() {
    const char* raw = std::getenv("G2KIT_THREADS");
    if (raw == nullptr || *raw == '\0') return 0;
    char* end = nullptr;
    const long v = std::strtol(raw, &end, 10);
    if (end == raw || *end != '\0' || v < 1 || v > 4096)
        throw ConfigError("G2KIT_THREADS must be a positive integer");
    return static_cast<int>(v);
}

// The propagator route is restricted to kernel families that keep a
// coherent state exactly coherent (free rotation; damped drift with no
// conjugate coupling), where g1 follows from the correlation chain and
// g2 is identically 1.
g2kit::regression::CorrelationCurve propagator_curve(const RunConfig& rc) {
    g2kit::validate_params(rc.params);
    const PropagatorSpec& ps = *rc.prop;
    g2kit::propagator::KernelFamily fam;
    if (ps.kernel == "free") {
        fam = g2kit::propagator::free_family(ps.omega);
    } else {
        if (rc.params.beta != 0.0)
            throw ConfigError("config: the damped propagator family is exactly coherent only for "
                              "beta = 0; use the regression or qfunction method for beta != 0");
        fam = g2kit::propagator::damped_family(rc.params, ps.omega);
    }
    if (ps.alpha0 == Complex(0.0, 0.0))
        throw DomainError("zero denominator: propagator initial amplitude vanishes");
    if (ps.t < 0.0) throw DomainError("propagator: t must be non-negative");

    const Complex chain0 = g2kit::propagator::g1_via_chain(fam, ps.alpha0, ps.t, 0.0);
    g2kit::regression::CorrelationCurve curve;
    curve.tau = g2kit::grid_points(rc.grid);
    curve.n_ss = chain0.real();
    curve.g1.reserve(curve.tau.size());
    curve.g2.assign(curve.tau.size(), 1.0);
    for (const double tau : curve.tau)
        curve.g1.push_back(g2kit::propagator::g1_via_chain(fam, ps.alpha0, ps.t, tau) / chain0);
    g2kit::regression::validate_curve(curve);
    return curve;
}

g2kit::regression::CorrelationCurve run_method(const RunConfig& rc) {
    validate_method_sections(rc);
    if (rc.method == "regression") return g2kit::regression::g2_curve(rc.params, rc.grid);
    if (rc.method == "qfunction") return g2kit::qfunction::g2_via_q(rc.params, rc.grid);
    if (rc.method == "sde")
        return g2kit::sde::simulate_curve(rc.params, *rc.ensemble, rc.grid, threads_from_env());
    return propagator_curve(rc);
}

int cmd_correlate(RunConfig rc) {
    if (rc.out_path.empty())
        throw ConfigError("config: output path required (set output.path or pass --out)");
    const auto curve = run_method(rc);
    g2kit::curve_io::write_file(curve, rc.out_path, rc.format);
    std::printf("wrote %s (%zu points, method %s)\n", rc.out_path.c_str(), curve.tau.size(),
                rc.method.c_str());
    return 0;
}

int cmd_compare(const RunConfig& a, const RunConfig& b, double tol, double z_max) {
    if (a.params.mu != b.params.mu || a.params.beta != b.params.beta ||
        a.params.B != b.params.B || a.params.C != b.params.C)
        throw ConfigError("compare: the two configs must share identical params");
    if (a.grid.tau_max != b.grid.tau_max || a.grid.steps != b.grid.steps)
        throw ConfigError("compare: the two configs must share an identical grid");
    if (a.method == b.method)
        throw ConfigError("compare: the two configs must use different methods");

    const auto ca = run_method(a);
    const auto cb = run_method(b);
    const std::size_t n = ca.tau.size();
    const bool with_z = ca.has_errors() || cb.has_errors();

    double max_dg1 = 0.0, max_dg2 = 0.0, max_z1 = 0.0, max_z2 = 0.0;
    bool pass = true;
    for (std::size_t i = 0; i < n; ++i) {
        const double dg1 = std::abs(ca.g1[i] - cb.g1[i]);
        const double dg2 = std::abs(ca.g2[i] - cb.g2[i]);
        max_dg1 = std::max(max_dg1, dg1);
        max_dg2 = std::max(max_dg2, dg2);
        if (with_z) {
            const double ea1 = ca.has_errors() ? ca.g1_err[i] : 0.0;
            const double eb1 = cb.has_errors() ? cb.g1_err[i] : 0.0;
            const double ea2 = ca.has_errors() ? ca.g2_err[i] : 0.0;
            const double eb2 = cb.has_errors() ? cb.g2_err[i] : 0.0;
            const double se1 = std::sqrt(ea1 * ea1 + eb1 * eb1);
            const double se2 = std::sqrt(ea2 * ea2 + eb2 * eb2);
            // A zero combined error (e.g. at tau = 0 where the estimator is
            // exact) falls back to the absolute tolerance.
            if (se1 > 0.0) {
                max_z1 = std::max(max_z1, dg1 / se1);
                if (dg1 / se1 > z_max) pass = false;
            } else if (dg1 > tol) {
                pass = false;
            }
            if (se2 > 0.0) {
                max_z2 = std::max(max_z2, dg2 / se2);
                if (dg2 / se2 > z_max) pass = false;
            } else if (dg2 > tol) {
                pass = false;
            }
        } else {
            if (dg1 > tol || dg2 > tol) pass = false;
        }
    }

    std::printf("method A: %s\nmethod B: %s\npoints: %zu\n", a.method.c_str(), b.method.c_str(), n);
    std::printf("max |dg1| = %.6g\nmax |dg2| = %.6g\n", max_dg1, max_dg2);
    if (with_z) {
        std::printf("max z(g1) = %.6g\nmax z(g2) = %.6g\n", max_z1, max_z2);
        std::printf("%s: z-scores vs z_max = %g (absolute tolerance %g where errors vanish)\n",
                    pass ? "PASS" : "FAIL", z_max, tol);
    } else {
        std::printf("%s: absolute tolerance %g\n", pass ? "PASS" : "FAIL", tol);
    }
    return pass ? 0 : 5;
}

int cmd_classify(const std::string& curve_path, double tol) {
    const auto curve = g2kit::curve_io::read_file(curve_path);
    const auto cls = g2kit::regression::classify(curve, tol);
    std::printf("%s\n", g2kit::regression::to_string(cls).c_str());
    std::printf("g2(0) = %.17g\n", curve.g2.front());
    std::printf("g2(tau_max) = %.17g\n", curve.g2.back());
    std::printf("points = %zu\n", curve.tau.size());
    std::printf("tolerance = %g\n", tol);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"one-mode field correlation toolkit: analytic, Monte Carlo, "
                 "quasi-distribution, and propagator-chain routes"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    auto* correlate = app.add_subcommand("correlate", "Compute a correlation curve and write it");
    std::string cfg_path;
    correlate->add_option("--config", cfg_path, "JSON run configuration")->required();
    std::string method_override;
    auto* opt_method = correlate->add_option("--method", method_override,
                                             "Override config method");
    std::uint64_t seed_override = 0;
    auto* opt_seed = correlate->add_option("--seed", seed_override, "Override ensemble seed");
    double tau_max_override = 0.0;
    auto* opt_tau = correlate->add_option("--tau-max", tau_max_override, "Override grid tau_max");
    int steps_override = 0;
    auto* opt_steps = correlate->add_option("--steps", steps_override, "Override grid steps");
    std::string out_override;
    auto* opt_out = correlate->add_option("--out", out_override, "Override output path");

    auto* compare = app.add_subcommand("compare", "Run two configs and compare their curves");
    std::string cfg_a, cfg_b;
    compare->add_option("--config-a", cfg_a, "first JSON run configuration")->required();
    compare->add_option("--config-b", cfg_b, "second JSON run configuration")->required();
    double cmp_tol = 1e-6;
    compare->add_option("--tol", cmp_tol, "absolute tolerance (default 1e-6)");
    double z_max = 3.0;
    compare->add_option("--z-max", z_max, "z-score bound when errors are present (default 3)");

    auto* classify = app.add_subcommand("classify", "Label a curve file by its correlation class");
    std::string curve_path;
    classify->add_option("--curve", curve_path, "curve file (CSV or JSON)")->required();
    double cls_tol = 1e-6;
    classify->add_option("--tol", cls_tol, "classification tolerance (default 1e-6)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*correlate) {
            RunConfig rc = load_config(cfg_path);
            if (opt_method->count() > 0) rc.method = method_override;
            if (opt_seed->count() > 0) {
                if (!rc.ensemble)
                    throw ConfigError("--seed requires an ensemble section (method sde)");
                rc.ensemble->seed = seed_override;
            }
            if (opt_tau->count() > 0) rc.grid.tau_max = tau_max_override;
            if (opt_steps->count() > 0) rc.grid.steps = steps_override;
            if (opt_out->count() > 0) rc.out_path = out_override;
            return cmd_correlate(std::move(rc));
        }
        if (*compare) return cmd_compare(load_config(cfg_a), load_config(cfg_b), cmp_tol, z_max);
        return cmd_classify(curve_path, cls_tol);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const DomainError& e) {
        std::fprintf(stderr, "domain error: %s\n", e.what());
        return 3;
    } catch (const g2kit::ConvergenceError& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return 4;
    } catch (const g2kit::SingularError& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return 4;
    } catch (const g2kit::DegreeError& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "unexpected error: %s\n", e.what());
        return 1;
    }
}

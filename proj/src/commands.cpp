#include "anisompa/commands.hpp"

#include "anisompa/config.hpp"
#include "anisompa/conjugation.hpp"
#include "anisompa/numerics.hpp"
#include "anisompa/rearrangement.hpp"
#include "anisompa/solver.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace anisompa {

namespace {

using json = nlohmann::ordered_json;

json json_number(double x) {
    if (std::isfinite(x)) return x;
    if (std::isnan(x)) return "nan";
    return x > 0 ? "infinity" : "-infinity";
}

void write_json(const json& j, const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open output file " + path.string());
    os << j.dump(2) << "\n";
}

void write_table_csv(const ScalarFunction& f, const char* col_t, const char* col_v,
                     const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open output file " + path.string());
    os << col_t << "," << col_v << "\n";
    char buf[80];
    const auto& ts = f.abscissae();
    const auto& vs = f.values();
    for (size_t i = 0; i < ts.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", ts[i], vs[i]);
        os << buf;
    }
}

double slope_over_window(const ScalarFunction& f, double lo, double hi) {
    auto ts = log_grid(lo, hi, 101);
    std::vector<double> vs(ts.size());
    for (size_t i = 0; i < ts.size(); ++i) vs[i] = f.value(ts[i]);
    return fit_loglog_slope(ts, vs);
}

std::filesystem::path prepare_out_dir(const RunConfig& rc) {
    std::filesystem::path dir = rc.out_dir.empty() ? "." : rc.out_dir;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "'");
    return dir;
}

json exponents_json(int n, const ParsedProblem& p, const ConjugateExponents& ce) {
    json j;
    j["dimension"] = n;
    j["exponents"] = p.phi.exponents;
    json pbar;
    pbar["value"] = json_number(ce.p_bar);
    pbar["fraction"] = ce.p_bar_exact ? json(ce.p_bar_exact->str()) : json(nullptr);
    j["p_bar"] = pbar;
    json pstar;
    if (ce.conjugate_infinite) {
        pstar["value"] = "infinity";
        pstar["fraction"] = nullptr;
    } else {
        pstar["value"] = json_number(*ce.p_bar_star);
        pstar["fraction"] = ce.p_bar_star_exact ? json(ce.p_bar_star_exact->str()) : json(nullptr);
    }
    j["p_bar_star"] = pstar;
    return j;
}

json audit_to_json(const std::vector<HypothesisReport>& reports) {
    json arr = json::array();
    for (const auto& r : reports) {
        json item;
        item["name"] = r.name;
        item["verdict"] = std::string(to_string(r.verdict));
        json ev;
        for (const auto& [k, val] : r.evidence) ev[k] = json_number(val);
        item["evidence"] = ev;
        if (!r.note.empty()) item["note"] = r.note;
        arr.push_back(item);
    }
    return arr;
}

void print_audit(const std::vector<HypothesisReport>& reports) {
    for (const auto& r : reports) {
        std::printf("  %-6s %s", r.name.c_str(), std::string(to_string(r.verdict)).c_str());
        if (!r.note.empty()) std::printf("  (%s)", r.note.c_str());
        std::printf("\n");
    }
}

struct AuditBundle {
    ProblemSpec spec;
    ScalarFunction phi_circ;
    std::optional<ScalarFunction> phi_n;
    std::vector<HypothesisReport> reports;
};

AuditBundle run_audit(const ParsedProblem& p) {
    AuditBundle b{.spec = p.build_problem(),
                  .phi_circ = compute_phi_circ(p.build_phi()),
                  .phi_n = std::nullopt,
                  .reports = {}};
    int n = b.spec.domain.n;
    auto integ = check_integrability(b.phi_circ, n);
    if (integ.phi0 == Verdict::Pass && integ.phi1 == Verdict::Pass)
        b.phi_n = compute_phi_n(b.phi_circ, n);
    SamplePlan plan;
    plan.seed = p.solver.seed;
    b.reports = audit_assumptions(b.spec, b.phi_circ, b.phi_n, plan);
    return b;
}

json norms_json(const SobolevNorm& norms) {
    json j;
    j["gradient_part"] = json_number(norms.gradient_part);
    j["zero_order_part"] = json_number(norms.zero_order_part);
    j["total"] = json_number(norms.total);
    return j;
}

} // namespace

int cmd_conjugate(const RunConfig& rc) {
    auto dir = prepare_out_dir(rc);
    auto p = parse_problem_file(rc.input_path, rc.overrides);
    int n = p.dimension();
    auto phi = p.build_phi();
    auto ce = power_sum_conjugate_exponent(p.phi.exponents, n);

    auto phi_circ = compute_phi_circ(phi);
    write_table_csv(phi_circ, "r", "phi_circ", dir / "phi_circ.csv");
    auto integ = check_integrability(phi_circ, n);

    json j = exponents_json(n, p, ce);
    json profile;
    profile["fit_exponent_at_zero"] = json_number(integ.exponent_at_zero);
    profile["fit_exponent_at_infinity"] = json_number(integ.exponent_at_infinity);
    profile["value_at_one"] = json_number(phi_circ.value(1.0));
    j["phi_circ"] = profile;
    json verdicts;
    verdicts["Phi0"] = std::string(to_string(integ.phi0));
    verdicts["Phi1"] = std::string(to_string(integ.phi1));
    j["verdicts"] = verdicts;
    j["origin_integral"] = json_number(integ.origin_integral);

    int code = kExitOk;
    if (integ.phi0 != Verdict::Pass) {
        j["phi_n"] = nullptr;
        std::printf("conjugate: origin integrability FAILS (growth exponent at zero %.6g >= n = %d); "
                    "Sobolev conjugate undefined\n",
                    integ.exponent_at_zero, n);
        code = kExitIntegrability;
    } else if (integ.phi1 != Verdict::Pass) {
        j["phi_n"] = nullptr;
        std::printf("conjugate: profile outgrows t^n at infinity (exponent %.6g > n = %d); "
                    "Sobolev conjugate degenerate\n",
                    integ.exponent_at_infinity, n);
        code = kExitFail;
    } else {
        auto phi_n = compute_phi_n(phi_circ, n);
        write_table_csv(phi_n, "t", "phi_n", dir / "phi_n.csv");
        json pn;
        pn["fit_slope_window"] = json_number(slope_over_window(phi_n, 1e-1, 1e2));
        pn["value_at_one"] = json_number(phi_n.value(1.0));
        j["phi_n"] = pn;
        std::printf("conjugate: p_bar = %s (%.6g)", ce.p_bar_exact ? ce.p_bar_exact->str().c_str() : "-",
                    ce.p_bar);
        if (ce.conjugate_infinite) std::printf(", p_bar_star = infinity\n");
        else
            std::printf(", p_bar_star = %s (%.6g)\n",
                        ce.p_bar_star_exact ? ce.p_bar_star_exact->str().c_str() : "-", *ce.p_bar_star);
    }
    write_json(j, dir / "exponents.json");
    return code;
}

int cmd_audit(const RunConfig& rc) {
    auto dir = prepare_out_dir(rc);
    auto p = parse_problem_file(rc.input_path, rc.overrides);
    auto bundle = run_audit(p);
    bool all = audit_all_pass(bundle.reports);

    json j;
    j["hypotheses"] = audit_to_json(bundle.reports);
    j["all_pass"] = all;
    write_json(j, dir / "audit.json");

    std::printf("audit: %s\n", all ? "all hypotheses PASS" : "hypothesis failure");
    print_audit(bundle.reports);
    return all ? kExitOk : kExitFail;
}

int cmd_solve(const RunConfig& rc) {
    auto dir = prepare_out_dir(rc);
    auto p = parse_problem_file(rc.input_path, rc.overrides);
    auto bundle = run_audit(p);
    bool all = audit_all_pass(bundle.reports);

    json j;
    j["forced"] = rc.force;
    j["audit"] = audit_to_json(bundle.reports);
    j["audit_all_pass"] = all;

    if (!all && !rc.force) {
        j["aborted"] = "hypothesis failure (rerun with --force to solve anyway)";
        write_json(j, dir / "solve_report.json");
        std::printf("solve: aborted, hypothesis failure\n");
        print_audit(bundle.reports);
        return kExitFail;
    }

    auto opts = p.solver_options();
    auto result = mountain_pass_solve(bundle.spec, opts);

    write_field_csv(result.u_star, (dir / "u_star.csv").string());
    if (p.solver.write_snapshots) {
        char name[64];
        for (size_t i = 0; i < result.snapshots.size(); ++i) {
            std::snprintf(name, sizeof name, "iterate_%04zu.csv", i);
            write_field_csv(result.snapshots[i], (dir / name).string());
        }
    }

    j["verdict"] = to_string(result.verdict);
    j["c_est"] = json_number(result.c_est);
    j["iterations"] = result.iterations;
    j["residual"] = json_number(result.residual);
    j["norms"] = norms_json(sobolev_norm(bundle.spec.phi, bundle.spec.n_func, result.u_star));
    if (!result.note.empty()) j["note"] = result.note;

    json hist = json::array();
    for (const auto& h : result.history) {
        json e;
        e["iteration"] = h.iteration;
        e["max_energy"] = json_number(h.max_energy);
        e["residual"] = json_number(h.residual);
        hist.push_back(e);
    }
    j["history"] = hist;

    SamplePlan plan;
    plan.seed = p.solver.seed;
    auto idx_phi = growth_indices(bundle.spec.phi, plan);
    if (bundle.spec.nonlinearity.theta > idx_phi.s) {
        auto ps = ps_monitor(bundle.spec, result.snapshots, idx_phi);
        json arr = json::array();
        bool ps_all = true;
        for (const auto& e : ps) {
            json item;
            item["energy"] = json_number(e.energy);
            item["residual"] = json_number(e.residual);
            item["lhs"] = json_number(e.lhs);
            item["rhs"] = json_number(e.rhs);
            item["bound_ok"] = e.bound_ok;
            ps_all = ps_all && e.bound_ok;
            arr.push_back(item);
        }
        json ps_json;
        ps_json["all_bounds_ok"] = ps_all;
        ps_json["entries"] = arr;
        j["palais_smale"] = ps_json;
    } else {
        j["palais_smale"] = "skipped: theta does not exceed the upper growth index of Phi";
    }

    write_json(j, dir / "solve_report.json");
    std::printf("solve: %s after %d iterations, c_est = %.8g, residual = %.3g\n",
                to_string(result.verdict).c_str(), result.iterations, result.c_est, result.residual);

    switch (result.verdict) {
        case MPVerdict::Converged: return kExitOk;
        case MPVerdict::MaxIter: return kExitMaxIter;
        default: return kExitDegenerate;
    }
}

int cmd_diagnose(const RunConfig& rc) {
    auto dir = prepare_out_dir(rc);
    auto p = parse_problem_file(rc.input_path, rc.overrides);
    auto spec = p.build_problem();
    auto u_path = dir / "u_star.csv";
    if (!std::filesystem::exists(u_path))
        throw ConfigError("diagnose: missing " + u_path.string() + " (run solve first)");
    Field u = read_field_csv(u_path.string(), spec.domain);

    double r = p.solver.concentration_radius;
    auto conc = concentration_functional(u, r, spec.n_func);

    json j;
    json cj;
    cj["radius"] = json_number(r);
    cj["value"] = json_number(conc.value);
    cj["center"] = conc.center;
    j["concentration"] = cj;

    ProblemOperator op(spec);
    double e_before = op.energy(u);
    json rj;
    if (spec.domain.boundary != BoundaryRule::Periodic) {
        rj["skipped"] = "recentering needs periodic boundaries";
    } else {
        // snap the concentration center to the potential lattice
        std::vector<double> shift(conc.center.size());
        bool on_grid = true;
        for (size_t a = 0; a < shift.size(); ++a) {
            double per = spec.potential.period[a];
            shift[a] = std::round(conc.center[a] / per) * per;
            double q = shift[a] / spec.domain.spacing();
            if (std::abs(q - std::round(q)) > 1e-9) on_grid = false;
        }
        if (!on_grid) {
            rj["skipped"] = "lattice period is not a multiple of the grid spacing";
        } else {
            Field w = recenter(u, shift, spec.potential.period);
            double e_after = op.energy(w);
            rj["shift"] = shift;
            rj["energy_before"] = json_number(e_before);
            rj["energy_after"] = json_number(e_after);
            rj["energy_delta"] = json_number(std::abs(e_after - e_before));
        }
    }
    j["recenter"] = rj;
    j["norms"] = norms_json(sobolev_norm(spec.phi, spec.n_func, u));
    write_json(j, dir / "diagnose.json");
    std::printf("diagnose: concentration %.8g at radius %.3g\n", conc.value, r);
    return kExitOk;
}

} // namespace anisompa

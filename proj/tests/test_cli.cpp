#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "anisompa/config.hpp"
#include "anisompa/field.hpp"

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

std::string cfg(const char* name) {
    return std::string(ANISOMPA_CONFIG_DIR) + "/" + name;
}

int run(const std::string& args) {
    std::string cmd = quoted(ANISOMPA_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

fs::path fresh_dir(const char* name) {
    fs::path d = fs::temp_directory_path() / "anisompa_cli_tests" / name;
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

json load_json(const fs::path& p) {
    std::ifstream is(p);
    REQUIRE(is);
    return json::parse(is);
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    REQUIRE(is);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

} // namespace

TEST_CASE("conjugate reports the exact anisotropic exponents") {
    auto d = fresh_dir("conj_227");
    CHECK(run("conjugate " + quoted(cfg("phi_2_2_7.cfg")) + " --out " + quoted(d.string())) == 0);
    auto j = load_json(d / "exponents.json");
    CHECK(j["dimension"] == 3);
    CHECK(j["p_bar"]["fraction"] == "21/8");
    CHECK(j["p_bar"]["value"].get<double>() == doctest::Approx(21.0 / 8.0).epsilon(1e-15));
    CHECK(j["p_bar_star"]["fraction"] == "21");
    CHECK(j["p_bar_star"]["value"].get<double>() == doctest::Approx(21.0).epsilon(1e-15));
    CHECK(j["verdicts"]["Phi0"] == "PASS");
    CHECK(j["verdicts"]["Phi1"] == "PASS");
    // the tabulated conjugate grows like t^21 over the fit window
    CHECK(j["phi_n"]["fit_slope_window"].get<double>() == doctest::Approx(21.0).epsilon(1e-3));
    CHECK(j["origin_integral"].get<double>() > 0.0);
    CHECK(fs::exists(d / "phi_circ.csv"));
    CHECK(fs::exists(d / "phi_n.csv"));

    auto d4 = fresh_dir("conj_2227");
    CHECK(run("conjugate " + quoted(cfg("phi_2_2_2_7.cfg")) + " --out " + quoted(d4.string())) == 0);
    auto j4 = load_json(d4 / "exponents.json");
    CHECK(j4["p_bar"]["fraction"] == "56/23");
    CHECK(j4["p_bar_star"]["fraction"] == "56/9");
    CHECK(j4["p_bar_star"]["value"].get<double>() == doctest::Approx(56.0 / 9.0).epsilon(1e-12));
}

TEST_CASE("conjugate refuses when origin integrability fails") {
    auto d = fresh_dir("conj_fail0");
    CHECK(run("conjugate " + quoted(cfg("default_problem.cfg")) + " --out " + quoted(d.string()) +
              " --override phi.exponents=3.5,3.5,3.5") == 2);
    auto j = load_json(d / "exponents.json");
    CHECK(j["verdicts"]["Phi0"] == "FAIL");
    CHECK(j["phi_n"].is_null());
    CHECK_FALSE(fs::exists(d / "phi_n.csv"));
}

TEST_CASE("audit verdicts on the default model and the failing sum") {
    auto d = fresh_dir("audit_ok");
    CHECK(run("audit " + quoted(cfg("default_problem.cfg")) + " --out " + quoted(d.string())) == 0);
    auto j = load_json(d / "audit.json");
    CHECK(j["all_pass"] == true);
    const auto& hy = j["hypotheses"];
    REQUIRE(hy.size() == 10);
    const char* names[] = {"Phi0", "Phi1", "Phi2", "Delta", "N1", "f1", "f2", "f3", "V1", "V2"};
    for (size_t i = 0; i < 10; ++i) {
        CHECK(hy[i]["name"] == names[i]);
        CHECK(hy[i]["verdict"] == "PASS");
    }

    // the 7-axis of the four-dimensional sum outgrows its own Sobolev
    // conjugate, and the matching source term outgrows it too
    auto d4 = fresh_dir("audit_fail");
    CHECK(run("audit " + quoted(cfg("phi_2_2_2_7.cfg")) + " --out " + quoted(d4.string())) == 1);
    auto j4 = load_json(d4 / "audit.json");
    CHECK(j4["all_pass"] == false);
    CHECK(j4["hypotheses"][2]["name"] == "Phi2");
    CHECK(j4["hypotheses"][2]["verdict"] == "FAIL");
    CHECK(j4["hypotheses"][6]["name"] == "f2");
    CHECK(j4["hypotheses"][6]["verdict"] == "FAIL");
}

TEST_CASE("solve then diagnose on a coarse grid") {
    auto d = fresh_dir("solve_smoke");
    std::string common = quoted(cfg("default_problem.cfg")) + " --out " + quoted(d.string()) +
                         " --override domain.points=12";
    CHECK(run("solve " + common) == 0);
    auto j = load_json(d / "solve_report.json");
    CHECK(j["audit_all_pass"] == true);
    CHECK(j["verdict"] == "converged");
    CHECK(j["residual"].get<double>() <= 1e-4);
    CHECK(j["c_est"].get<double>() > 1.0);
    CHECK(!j["history"].empty());
    CHECK(j["palais_smale"]["all_bounds_ok"] == true);
    CHECK(j["norms"]["total"].get<double>() > 0.0);

    // the stored field reloads against the same grid
    std::vector<std::string> ov{"domain.points=12"};
    auto p = anisompa::parse_problem_file(cfg("default_problem.cfg"), ov);
    auto u = anisompa::read_field_csv((d / "u_star.csv").string(), p.build_domain());
    CHECK(u.max_abs() > 0.1);

    CHECK(run("diagnose " + common) == 0);
    auto dj = load_json(d / "diagnose.json");
    CHECK(dj["concentration"]["radius"].get<double>() == doctest::Approx(2.0));
    CHECK(dj["concentration"]["value"].get<double>() > 0.0);
    CHECK(dj["recenter"]["energy_delta"].get<double>() <= 1e-9);

    // diagnose without a solved field is a usage error
    auto empty = fresh_dir("diag_empty");
    CHECK(run("diagnose " + quoted(cfg("default_problem.cfg")) + " --out " +
              quoted(empty.string())) == 64);
}

TEST_CASE("solve aborts on hypothesis failure unless forced") {
    auto d = fresh_dir("solve_abort");
    std::string common = quoted(cfg("phi_2_2_2_7.cfg")) + " --out " + quoted(d.string()) +
                         " --override domain.points=8 --override solver.tol=5e-4";
    CHECK(run("solve " + common) == 1);
    auto j = load_json(d / "solve_report.json");
    CHECK(j.contains("aborted"));
    CHECK_FALSE(fs::exists(d / "u_star.csv"));

    CHECK(run("solve " + common + " --force") == 0);
    auto jf = load_json(d / "solve_report.json");
    CHECK(jf["forced"] == true);
    CHECK(jf["verdict"] == "converged");
    CHECK(fs::exists(d / "u_star.csv"));
}

TEST_CASE("exhausted iteration budget maps to its own exit code") {
    auto d = fresh_dir("solve_maxiter");
    CHECK(run("solve " + quoted(cfg("default_problem.cfg")) + " --out " + quoted(d.string()) +
              " --override domain.points=12 --override solver.max_iter=40"
              " --override solver.tol=1e-12") == 3);
    auto j = load_json(d / "solve_report.json");
    CHECK(j["verdict"] == "max_iter");
    CHECK(j["iterations"] == 40);
}

TEST_CASE("usage and parse failures exit with the usage code") {
    auto d = fresh_dir("usage");
    auto dup = d / "dup.cfg";
    std::ofstream(dup) << "phi.kind = power_sum\nphi.exponents = 2,2\nphi.exponents = 2,3\n";
    CHECK(run("audit " + quoted(dup.string())) == 64);
    auto unk = d / "unk.cfg";
    std::ofstream(unk) << "phi.exponents = 2,2\nwhatever.e = 1\n";
    CHECK(run("audit " + quoted(unk.string())) == 64);

    CHECK(run("audit " + quoted((d / "missing.cfg").string())) == 64);
    CHECK(run("audit " + quoted(cfg("default_problem.cfg")) +
              " --override solver.tol=banana") == 64);
    CHECK(run("frobnicate") == 64);
    CHECK(run("") == 64);
    CHECK(run("audit") == 64);
    CHECK(run("--help") == 0);

    // the library signals the same grammar violations with line numbers
    CHECK_THROWS_WITH_AS(anisompa::parse_problem_text("phi.exponents = 2,2\nphi.exponents = 3\n"),
                         "line 2: duplicate key 'phi.exponents'", anisompa::ConfigError);
}

TEST_CASE("canonical text round trips through the parser") {
    std::vector<std::string> ov{"solver.tol=2e-4", "solver.tol=5e-5"}; // repeats allowed, last wins
    auto p = anisompa::parse_problem_file(cfg("default_problem.cfg"), ov);
    CHECK(p.solver.tol == 5e-5);
    auto text = p.canonical_text();
    auto q = anisompa::parse_problem_text(text);
    CHECK(q.canonical_text() == text);
    CHECK(q.solver.tol == 5e-5);
    CHECK(q.phi.exponents == p.phi.exponents);

    auto pc = anisompa::parse_problem_file(cfg("default_problem_cosine.cfg"));
    CHECK(pc.v.kind == "cosine_product");
    CHECK(anisompa::parse_problem_text(pc.canonical_text()).canonical_text() ==
          pc.canonical_text());
}

TEST_CASE("reports are byte-stable across repeated runs") {
    auto a = fresh_dir("stable_a");
    auto b = fresh_dir("stable_b");
    for (const auto& d : {a, b})
        CHECK(run("conjugate " + quoted(cfg("phi_2_2_7.cfg")) + " --out " +
                  quoted(d.string())) == 0);
    CHECK(slurp(a / "exponents.json") == slurp(b / "exponents.json"));
    CHECK(slurp(a / "phi_circ.csv") == slurp(b / "phi_circ.csv"));
    CHECK(slurp(a / "phi_n.csv") == slurp(b / "phi_n.csv"));

    for (const auto& d : {a, b})
        CHECK(run("audit " + quoted(cfg("default_problem.cfg")) + " --out " +
                  quoted(d.string())) == 0);
    CHECK(slurp(a / "audit.json") == slurp(b / "audit.json"));
}

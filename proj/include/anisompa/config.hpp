#pragma once

#include "anisompa/problem.hpp"
#include "anisompa/solver.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace anisompa {

// User-input problems (bad grammar, unknown keys, invariant violations in the
// described problem). CLI maps these to the usage exit code.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Problem files are line-oriented `section.key = value` with # comments.
// Sections: phi, n_func, f, v, domain, solver. Unknown sections or keys are
// errors; physics sections must be spelled out, solver knobs have defaults.
struct PhiSection {
    std::string kind = "power_sum";
    std::vector<double> exponents;
    std::vector<double> coefficients; // empty: all ones
};

struct NSection {
    bool present = false;
    bool pbar = false; // exponent tied to the harmonic mean of phi's exponents
    double exponent = 2.0;
    double scale = 1.0;
};

struct FSection {
    bool present = false;
    std::string kind = "odd_power"; // or "zero"
    double strength = 1.0;
    double exponent = 3.0;
    std::optional<double> theta; // default: exponent + 1
};

struct VSection {
    bool present = false;
    std::string kind = "constant"; // or "cosine_product"
    double value = 1.0;
    double base = 1.0;
    double amplitude = 0.5;
    double period = 1.0;
};

struct DomainSection {
    std::optional<int> n;
    double half_width = 8.0;
    std::optional<int> points;
    std::string boundary = "periodic"; // or "zero_dirichlet"
};

struct SolverSection {
    int path_points = 21;
    double descent_step = 0.1;
    double tol = 1e-4;
    int max_iter = 2000;
    std::uint64_t seed = 0;
    int snapshot_stride = 25;
    double concentration_radius = 1.0;
    bool write_snapshots = false;
};

struct ParsedProblem {
    bool phi_present = false;
    PhiSection phi;
    NSection n_func;
    FSection f;
    VSection v;
    DomainSection domain;
    SolverSection solver;

    int dimension() const; // from phi, cross-checked against domain.n
    GFunction build_phi() const;
    ScalarFunction build_n() const;
    DomainSpec build_domain() const;
    ProblemSpec build_problem() const; // needs phi, n_func, f, v
    MPOptions solver_options() const;

    std::string canonical_text() const; // emit; parse(emit(p)) reproduces p
};

ParsedProblem parse_problem_text(const std::string& text,
                                 std::span<const std::string> overrides = {});
ParsedProblem parse_problem_file(const std::string& path,
                                 std::span<const std::string> overrides = {});

} // namespace anisompa

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "anisompa/conjugation.hpp"
#include "anisompa/rearrangement.hpp"
#include "anisompa/solver.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace anisompa;

namespace {

// -div(grad u) + u = u^3 discretized on a periodic square
ProblemSpec quadratic_spec(int m, double l, BoundaryRule rule = BoundaryRule::Periodic) {
    DomainSpec d;
    d.n = 2;
    d.half_width = l;
    d.points_per_axis = m;
    d.boundary = rule;
    ProblemSpec s{GFunction::power_sum({2.0, 2.0}, {0.5, 0.5}),
                  ScalarFunction::power(2.0, 0.5), Potential{}, Nonlinearity{}, d};
    s.potential.eval = [](std::span<const double>) { return 1.0; };
    s.potential.period = {1.0, 1.0};
    s.nonlinearity.f = [](double t) { return t * t * t; };
    s.nonlinearity.antiderivative = [](double t) { return t * t * t * t / 4.0; };
    s.nonlinearity.theta = 4.0;
    return s;
}

ProblemSpec anisotropic_spec(int m, double l) {
    DomainSpec d;
    d.n = 3;
    d.half_width = l;
    d.points_per_axis = m;
    d.boundary = BoundaryRule::Periodic;
    auto ce = power_sum_conjugate_exponent({1.8, 2.0, 2.2}, 3);
    ProblemSpec s{GFunction::power_sum({1.8, 2.0, 2.2}),
                  ScalarFunction::power(ce.p_bar, 1.0), Potential{}, Nonlinearity{}, d};
    s.potential.eval = [](std::span<const double>) { return 1.0; };
    s.potential.period = {1.0, 1.0, 1.0};
    s.nonlinearity.f = [](double t) { return t * t * t; };
    s.nonlinearity.antiderivative = [](double t) { return t * t * t * t / 4.0; };
    s.nonlinearity.theta = 4.0;
    return s;
}

Field random_clamped(const DomainSpec& d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Field u(d);
    for (auto& v : u.values()) v = unif(rng);
    u.apply_boundary();
    return u;
}

} // namespace

TEST_CASE("energy of a constant field has a closed form") {
    auto spec = quadratic_spec(8, 4.0);
    auto u = Field::from_function(spec.domain, [](std::span<const double>) { return 1.0; });
    // gradient vanishes: J = (2L)^2 (1/2 - 1/4)
    CHECK(energy(spec, u) == doctest::Approx(16.0).epsilon(1e-12));
    Field z(spec.domain);
    CHECK(energy(spec, z) == 0.0);
}

TEST_CASE("discrete gradient matches finite differences of the energy") {
    for (auto rule : {BoundaryRule::Periodic, BoundaryRule::ZeroDirichlet}) {
        auto spec = quadratic_spec(6, 2.0, rule);
        ProblemOperator op(spec);
        auto u = random_clamped(spec.domain, 11);
        auto v = random_clamped(spec.domain, 13);
        double eps = 1e-6;
        double fd = (op.energy(axpy(eps, v, u)) - op.energy(axpy(-eps, v, u))) / (2.0 * eps);
        CHECK(op.derivative_dot(u, v) == doctest::Approx(fd).epsilon(1e-4));
    }
    // the anisotropic exponents exercise the non-quadratic flux
    auto spec = anisotropic_spec(6, 2.0);
    ProblemOperator op(spec);
    auto u = random_clamped(spec.domain, 17);
    auto v = random_clamped(spec.domain, 19);
    double eps = 1e-6;
    double fd = (op.energy(axpy(eps, v, u)) - op.energy(axpy(-eps, v, u))) / (2.0 * eps);
    CHECK(op.derivative_dot(u, v) == doctest::Approx(fd).epsilon(1e-4));
}

TEST_CASE("residual dual norm vanishes only at critical points") {
    auto spec = quadratic_spec(8, 4.0);
    ProblemOperator op(spec);
    Field z(spec.domain);
    CHECK(op.residual_dual_norm(z) == 0.0);
    auto u = random_clamped(spec.domain, 3);
    CHECK(op.residual_dual_norm(u) > 0.0);
    CHECK(op.coercive_part(u) > 0.0);
    CHECK(op.coercive_part(z) == 0.0);
}

TEST_CASE("potential sampling survives the boundary clamp") {
    auto spec = quadratic_spec(6, 2.0, BoundaryRule::ZeroDirichlet);
    ProblemOperator op(spec);
    for (double v : op.potential_field().values()) CHECK(v == 1.0);
}

TEST_CASE("valley point doubling") {
    auto spec = quadratic_spec(10, 4.0);
    std::vector<double> origin{0.0, 0.0};
    auto seed = gaussian_bump(spec.domain, origin, 0.8, 1.0);
    auto e = find_valley_point(spec, seed);
    CHECK(energy(spec, e) < 0.0);

    // without the superquadratic source the energy never goes negative
    auto flat = spec;
    flat.nonlinearity.f = [](double) { return 0.0; };
    flat.nonlinearity.antiderivative = [](double) { return 0.0; };
    flat.nonlinearity.theta = 2.0;
    CHECK_THROWS_AS(find_valley_point(flat, seed), std::runtime_error);

    Field zero(spec.domain);
    CHECK_THROWS_AS(find_valley_point(spec, zero), std::invalid_argument);
}

TEST_CASE("mountain pass option validation") {
    auto spec = quadratic_spec(8, 3.0);
    MPOptions o;
    o.path_points = 4;
    CHECK_THROWS_AS(mountain_pass_solve(spec, o), std::invalid_argument);
    o = {};
    o.tol = 0.0;
    CHECK_THROWS_AS(mountain_pass_solve(spec, o), std::invalid_argument);
    o = {};
    o.descent_step = -1.0;
    CHECK_THROWS_AS(mountain_pass_solve(spec, o), std::invalid_argument);
    o = {};
    o.max_iter = 0;
    CHECK_THROWS_AS(mountain_pass_solve(spec, o), std::invalid_argument);
}

TEST_CASE("mountain pass level is stable under grid refinement") {
    MPOptions o;
    o.descent_step = 0.2;
    o.tol = 1e-4;
    o.max_iter = 4000;
    auto coarse_spec = quadratic_spec(12, 3.0);
    auto coarse = mountain_pass_solve(coarse_spec, o);
    REQUIRE(coarse.verdict == MPVerdict::Converged);
    CHECK(coarse.residual <= o.tol);
    CHECK(coarse.c_est > 0.0);
    CHECK(coarse.u_star.max_abs() > 0.1);
    CHECK(!coarse.history.empty());
    CHECK(coarse.history.back().residual == doctest::Approx(coarse.residual));

    auto fine = mountain_pass_solve(quadratic_spec(24, 3.0), o);
    REQUIRE(fine.verdict == MPVerdict::Converged);
    CHECK(std::abs(fine.c_est - coarse.c_est) <= 0.10 * fine.c_est);

    // the converged maximizer satisfies the discrete Euler-Lagrange system:
    // the plain l2 residual is tiny relative to the field scale
    ProblemOperator op(coarse_spec);
    CHECK(l2_norm_h(op.gradient(coarse.u_star)) <= 2.0 * o.tol);
}

TEST_CASE("iteration budget exhausts gracefully") {
    MPOptions o;
    o.tol = 1e-12; // unreachably tight
    o.max_iter = 12;
    auto res = mountain_pass_solve(quadratic_spec(8, 3.0), o);
    CHECK(res.verdict == MPVerdict::MaxIter);
    CHECK(res.iterations == 12);
    CHECK(!res.note.empty());
    CHECK(std::isfinite(res.residual));
    CHECK(!res.snapshots.empty());
}

TEST_CASE("Palais-Smale bound along iterates") {
    auto spec = quadratic_spec(10, 3.0);
    auto idx = growth_indices(spec.phi);
    std::vector<double> origin{0.0, 0.0};
    std::vector<Field> iterates;
    for (double s : {0.5, 1.0, 2.0, 4.0})
        iterates.push_back(scale(s, gaussian_bump(spec.domain, origin, 0.6, 1.0)));
    auto entries = ps_monitor(spec, iterates, idx);
    REQUIRE(entries.size() == 4);
    for (const auto& e : entries) {
        CHECK(e.bound_ok);
        // theta = 4, s_phi = 2, and all the power identities are exact here,
        // so the two sides coincide
        CHECK(e.lhs == doctest::Approx(e.rhs).epsilon(1e-9));
        CHECK(e.residual >= 0.0);
    }

    auto tight = spec;
    tight.nonlinearity.theta = 2.0; // equals s_phi: the monitor refuses
    CHECK_THROWS_AS(ps_monitor(tight, iterates, idx), std::invalid_argument);
}

TEST_CASE("concentration functional") {
    DomainSpec d;
    d.n = 2;
    d.half_width = 4.0;
    d.points_per_axis = 16;
    d.boundary = BoundaryRule::Periodic;
    auto n2 = ScalarFunction::power(2.0);
    std::vector<double> c0{0.0, 0.0};
    auto u = gaussian_bump(d, c0, 0.7, 1.0);

    // a sub-spacing radius reduces to the single largest nodal mass
    auto tiny = concentration_functional(u, 0.3, n2);
    double mass_max = 0.0;
    for (double v : u.values())
        mass_max = std::max(mass_max, v * v * d.cell_measure());
    CHECK(tiny.value == doctest::Approx(mass_max).epsilon(1e-13));
    CHECK(tiny.center[0] == doctest::Approx(0.0));
    CHECK(tiny.center[1] == doctest::Approx(0.0));

    // monotone in the radius, bounded by the total modular; r = L is refused
    // because the minimum-image stencil would wrap onto itself
    auto mid = concentration_functional(u, 1.5, n2);
    auto big = concentration_functional(u, 3.9, n2);
    CHECK_THROWS_AS(concentration_functional(u, 4.0, n2), std::invalid_argument);
    CHECK(tiny.value <= mid.value);
    CHECK(mid.value <= big.value);
    CHECK(big.value <= modular(n2, u) * (1.0 + 1e-12));

    CHECK_THROWS_AS(concentration_functional(u, 0.0, n2), std::invalid_argument);
    CHECK_THROWS_AS(concentration_functional(u, 5.0, n2), std::invalid_argument);

    // with zero boundary the ball may cover the whole box
    DomainSpec dz = d;
    dz.boundary = BoundaryRule::ZeroDirichlet;
    auto uz = gaussian_bump(dz, c0, 0.7, 1.0);
    auto all = concentration_functional(uz, 20.0, n2);
    CHECK(all.value == doctest::Approx(modular(n2, uz)).epsilon(1e-12));
}

TEST_CASE("concentration is invariant under recentering") {
    DomainSpec d;
    d.n = 2;
    d.half_width = 4.0;
    d.points_per_axis = 16;
    d.boundary = BoundaryRule::Periodic;
    auto n2 = ScalarFunction::power(2.0);
    std::vector<double> c0{0.5, -1.0};
    auto u = gaussian_bump(d, c0, 0.6, 1.3);
    std::vector<double> shift{1.0, -0.5};
    auto w = recenter(u, shift);
    auto cu = concentration_functional(u, 1.5, n2);
    auto cw = concentration_functional(w, 1.5, n2);
    CHECK(cw.value == doctest::Approx(cu.value).epsilon(1e-12));
}

TEST_CASE("recenter is an exact cyclic shift") {
    DomainSpec d;
    d.n = 2;
    d.half_width = 2.0;
    d.points_per_axis = 8;
    d.boundary = BoundaryRule::Periodic;
    auto u = random_clamped(d, 23);
    std::vector<double> shift{1.0, -0.5}; // 2 and -1 grid steps
    auto w = recenter(u, shift);
    int c[2];
    for (std::int64_t j = 0; j < d.node_count(); ++j) {
        d.coords_of(j, c);
        int src[] = {c[0] + 2, c[1] - 1};
        CHECK(w[j] == u[d.flat_of(src)]);
    }

    // shifting by a potential period leaves the energy unchanged
    auto spec = quadratic_spec(8, 2.0);
    spec.potential.eval = [](std::span<const double> x) {
        return 1.5 + 0.5 * std::cos(2.0 * std::numbers::pi * x[0]) *
                          std::cos(2.0 * std::numbers::pi * x[1]);
    };
    std::vector<double> lattice{1.0, 1.0};
    std::vector<double> per_shift{1.0, 0.0};
    auto v = recenter(u, per_shift, lattice);
    CHECK(energy(spec, v) == doctest::Approx(energy(spec, u)).epsilon(1e-12));

    std::vector<double> off_grid{0.3, 0.0};
    CHECK_THROWS_AS(recenter(u, off_grid), std::invalid_argument);
    std::vector<double> off_lattice{0.5, 0.0}; // on the grid, off the lattice
    CHECK_THROWS_AS(recenter(u, off_lattice, lattice), std::invalid_argument);
    DomainSpec dz = d;
    dz.boundary = BoundaryRule::ZeroDirichlet;
    CHECK_THROWS_AS(recenter(random_clamped(dz, 1), shift), std::invalid_argument);
}

TEST_CASE("problem validation catches inconsistent data") {
    auto good = quadratic_spec(6, 2.0);
    CHECK_NOTHROW(good.validate());

    auto bad_dim = good;
    bad_dim.phi = GFunction::power_sum({2.0, 2.0, 2.0});
    CHECK_THROWS_AS(bad_dim.validate(), std::invalid_argument);

    auto bad_v = good;
    bad_v.potential.eval = [](std::span<const double>) { return -1.0; };
    CHECK_THROWS_AS(bad_v.validate(), std::invalid_argument);

    auto bad_f = good;
    bad_f.nonlinearity.antiderivative = [](double t) { return t * t; }; // F' != f
    CHECK_THROWS_AS(bad_f.validate(), std::invalid_argument);

    auto bad_theta = good;
    bad_theta.nonlinearity.theta = 0.5;
    CHECK_THROWS_AS(bad_theta.validate(), std::invalid_argument);
}

TEST_CASE("hypothesis audit passes on the anisotropic model") {
    auto spec = anisotropic_spec(16, 8.0);
    auto phi_circ = compute_phi_circ(spec.phi);
    auto phi_n = compute_phi_n(phi_circ, 3);
    auto reports = audit_assumptions(spec, phi_circ, phi_n);
    REQUIRE(reports.size() == 10);
    const char* names[] = {"Phi0", "Phi1", "Phi2", "Delta", "N1", "f1", "f2", "f3", "V1", "V2"};
    for (size_t i = 0; i < reports.size(); ++i) {
        CHECK(reports[i].name == names[i]);
        CHECK(reports[i].verdict == Verdict::Pass);
    }
    CHECK(audit_all_pass(reports));
}

TEST_CASE("hypothesis audit flags the failing four-dimensional sum") {
    DomainSpec d;
    d.n = 4;
    d.half_width = 8.0;
    d.points_per_axis = 8;
    d.boundary = BoundaryRule::Periodic;
    auto ce = power_sum_conjugate_exponent({2.0, 2.0, 2.0, 7.0}, 4);
    ProblemSpec spec{GFunction::power_sum({2.0, 2.0, 2.0, 7.0}),
                     ScalarFunction::power(ce.p_bar, 1.0), Potential{}, Nonlinearity{}, d};
    spec.potential.eval = [](std::span<const double>) { return 1.0; };
    spec.potential.period = {1.0, 1.0, 1.0, 1.0};
    spec.nonlinearity.f = [](double t) { return std::pow(std::abs(t), 6.0) * t; };
    spec.nonlinearity.antiderivative = [](double t) { return std::pow(std::abs(t), 8.0) / 8.0; };
    spec.nonlinearity.theta = 8.0;

    auto phi_circ = compute_phi_circ(spec.phi);
    auto phi_n = compute_phi_n(phi_circ, 4);
    auto reports = audit_assumptions(spec, phi_circ, phi_n);
    REQUIRE(reports.size() == 10);
    CHECK(reports[2].name == "Phi2");
    CHECK(reports[2].verdict == Verdict::Fail);
    CHECK_FALSE(audit_all_pass(reports));

    // without a conjugate the domination question is left open
    auto no_pn = audit_assumptions(spec, phi_circ, std::nullopt);
    CHECK(no_pn[2].verdict == Verdict::Inconclusive);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "anisompa/conjugation.hpp"
#include "anisompa/rearrangement.hpp"

#include <cmath>
#include <numbers>

using namespace anisompa;

namespace {

double radial_kappa(const std::vector<double>& p, const std::vector<double>& a) {
    int n = static_cast<int>(p.size());
    double sigma = 0.0, log_d = 0.0;
    for (int i = 0; i < n; ++i) {
        sigma += 1.0 / p[i];
        log_d += std::log(2.0) + std::lgamma(1.0 + 1.0 / p[i]) - std::log(a[i]) / p[i];
    }
    log_d -= std::lgamma(1.0 + sigma);
    double log_omega = (n / 2.0) * std::log(std::numbers::pi) - std::lgamma(n / 2.0 + 1.0);
    return std::exp((log_omega - log_d) / sigma);
}

// Sobolev conjugate of the pure power kappa t^q in dimension n (q < n):
// kappa^{n/(n-q)} ((n-q)/(n-1))^{q(n-1)/(n-q)} r^{nq/(n-q)}
double phi_n_closed_form(double kappa, double q, int n, double r) {
    double nq = n - q;
    double c = std::pow(kappa, n / nq) * std::pow(nq / (n - 1.0), q * (n - 1.0) / nq);
    return c * std::pow(r, n * q / nq);
}

} // namespace

TEST_CASE("integrability screen on pure powers") {
    auto rep = check_integrability(ScalarFunction::power(2.0), 3);
    CHECK(rep.phi0 == Verdict::Pass);
    CHECK(rep.phi1 == Verdict::Pass);
    CHECK(rep.exponent_at_zero == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(rep.exponent_at_infinity == doctest::Approx(2.0).epsilon(1e-12));
    // integral of t^{-1/2} over (0,1]
    CHECK(rep.origin_integral == doctest::Approx(2.0).epsilon(1e-12));

    auto border = check_integrability(ScalarFunction::power(3.0), 3);
    CHECK(border.phi0 == Verdict::Fail);
    CHECK(border.phi1 == Verdict::Pass);
    CHECK(std::isinf(border.origin_integral));

    auto fast = check_integrability(ScalarFunction::power(4.0), 3);
    CHECK(fast.phi0 == Verdict::Fail);
    CHECK(fast.phi1 == Verdict::Fail);
}

TEST_CASE("H transform reproduces the power-law formula") {
    // phi_circ = t^2, n = 3: H(s) = (2 sqrt(s))^{2/3}
    auto h = HTransform(ScalarFunction::power(2.0), 3);
    CHECK(h(1.0) == doctest::Approx(std::pow(2.0, 2.0 / 3.0)).epsilon(1e-12));
    CHECK(h(4.0) == doctest::Approx(std::pow(4.0, 2.0 / 3.0)).epsilon(1e-12));
    CHECK(h.cumulative(9.0) == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(h(0.0) == 0.0);
    for (double s : {1e-4, 0.37, 1.0, 55.0, 1e4}) {
        CHECK(h.inverse(h(s)) == doctest::Approx(s).epsilon(1e-9));
    }
    CHECK(compute_H(ScalarFunction::power(2.0), 3, 4.0) ==
          doctest::Approx(std::pow(4.0, 2.0 / 3.0)).epsilon(1e-12));

    // scaled profile, q = 21/8: psi = kappa^{-1/2} t^{-13/16}
    double q = 21.0 / 8.0, kappa = 1.7;
    auto h2 = HTransform(ScalarFunction::power(q, kappa), 3);
    double alpha = (3.0 - q) / 2.0; // beta + 1
    double expect = std::pow(kappa, -0.5) * std::pow(5.0, alpha) / alpha;
    CHECK(h2.cumulative(5.0) == doctest::Approx(expect).epsilon(1e-12));

    CHECK_THROWS_AS(HTransform(ScalarFunction::power(3.0), 3), std::runtime_error);
}

TEST_CASE("H transform integrates tables segment by segment") {
    // piecewise profile with a slope-2 segment in dimension 2: that segment
    // integrates as a logarithm
    double v1 = 0.05 * std::pow(10.0, 1.5);
    std::vector<double> ts{0.1, 1.0, 10.0, 100.0};
    std::vector<double> vs{0.05, v1, v1 * 100.0, v1 * 100.0 * std::pow(10.0, 1.8)};
    auto prof = ScalarFunction::table(ts, vs, 1.5, 1.8);
    auto h = HTransform(prof, 2);

    // independent check: fine trapezoid quadrature of psi on the interpolant
    auto psi = [&](double t) { return t / prof.value(t); };
    double acc = 0.0;
    int steps = 200000;
    double lo = std::log(0.02), hi = std::log(60.0);
    for (int i = 0; i < steps; ++i) {
        double la = lo + (hi - lo) * i / steps, lb = lo + (hi - lo) * (i + 1) / steps;
        double ta = std::exp(la), tb = std::exp(lb);
        acc += 0.5 * (psi(ta) * ta + psi(tb) * tb) * (lb - la);
    }
    CHECK(h.cumulative(60.0) - h.cumulative(0.02) == doctest::Approx(acc).epsilon(1e-8));
    CHECK(h.inverse(h(3.3)) == doctest::Approx(3.3).epsilon(1e-9));
}

TEST_CASE("bounded H reports an unreachable target") {
    std::vector<double> ts{1.0, 10.0};
    std::vector<double> vs{1.0, std::pow(10.0, 1.5)};
    auto prof = ScalarFunction::table(ts, vs, 1.5, 4.0);
    auto h = HTransform(prof, 2);
    // cap of the inner integral: 2 + 2(sqrt(10)-1) + 10^{2.5}/200
    double cap = 2.0 + 2.0 * (std::sqrt(10.0) - 1.0) + std::pow(10.0, 2.5) / 200.0;
    CHECK(h.inverse(0.9 * std::sqrt(cap)) > 0.0);
    CHECK_THROWS_AS(h.inverse(1.1 * std::sqrt(cap)), std::runtime_error);
}

TEST_CASE("Sobolev conjugate of an isotropic quadratic profile") {
    // phi_circ = t^2 in n = 3 gives Phi_n(r) = r^6 / 16
    auto prof = tabulate_loglog([](double t) { return t * t; }, 1e-3, 1e3, 200);
    auto pn = compute_phi_n(prof, 3);
    for (double r : {0.05, 0.3, 1.0, 7.0, 300.0}) {
        CHECK(pn.value(r) == doctest::Approx(std::pow(r, 6.0) / 16.0).epsilon(1e-6));
    }
    CHECK(pn.growth_exponent_at_infinity() == doctest::Approx(6.0).epsilon(1e-6));
    CHECK(pn.growth_exponent_at_zero() == doctest::Approx(6.0).epsilon(1e-6));
}

TEST_CASE("Sobolev conjugate pipeline for the (2,2,7) sum") {
    std::vector<double> p{2.0, 2.0, 7.0}, a{1.0, 1.0, 1.0};
    auto phi = GFunction::power_sum(p, a);
    auto prof = compute_phi_circ(phi);
    auto pn = compute_phi_n(prof, 3);
    double kappa = radial_kappa(p, a);
    // exponent jumps from 21/8 to 21
    CHECK(pn.growth_exponent_at_infinity() == doctest::Approx(21.0).epsilon(1e-4));
    for (double r : {0.1, 1.0, 10.0}) {
        CHECK(pn.value(r) ==
              doctest::Approx(phi_n_closed_form(kappa, 21.0 / 8.0, 3, r)).epsilon(1e-4));
    }
}

TEST_CASE("conjugate refuses non-integrable profiles") {
    CHECK_THROWS_AS(compute_phi_n(ScalarFunction::power(4.0), 3), std::runtime_error);
    // passes at zero, too fast at infinity
    auto mixed = ScalarFunction::table({1e-3, 1.0, 1e3},
                                       {1e-6, 1.0, std::pow(10.0, 12.0)}, 2.0, 4.0);
    CHECK(check_integrability(mixed, 3).phi1 == Verdict::Fail);
    CHECK_THROWS_AS(compute_phi_n(mixed, 3), std::runtime_error);
}

TEST_CASE("scalar domination verdicts") {
    auto quad = ScalarFunction::power(2.0);
    auto cube = ScalarFunction::power(3.0);
    auto d = check_dominates(quad, cube);
    CHECK(d.relation == DominationVerdict::Relation::Dominates);
    REQUIRE(d.constant.has_value());
    for (double t : {10.0, 100.0, 1000.0}) {
        if (t >= d.threshold_radius)
            CHECK(quad.value(t) <= cube.value(*d.constant * t) * (1.0 + 1e-9));
    }

    auto rev = check_dominates(cube, quad);
    CHECK(rev.relation == DominationVerdict::Relation::Fails);
    CHECK(rev.slope_a == doctest::Approx(3.0).epsilon(1e-6));
    CHECK(rev.slope_b == doctest::Approx(2.0).epsilon(1e-6));
    REQUIRE(rev.witness.has_value());
    double w = rev.witness->at(0);
    CHECK(cube.value(w) > quad.value(1024.0 * w));

    // same exponent, bigger scale: constant absorbs it
    auto big = ScalarFunction::power(2.0, 5.0);
    auto one = ScalarFunction::power(2.0, 1.0);
    auto ds = check_dominates(big, one);
    CHECK(ds.relation == DominationVerdict::Relation::Dominates);
    CHECK(*ds.constant == doctest::Approx(4.0)); // first passing power of two
    CHECK(check_dominates(one, one).relation == DominationVerdict::Relation::Dominates);
}

TEST_CASE("domination is transitive on sampled powers") {
    auto p2 = ScalarFunction::power(2.0);
    auto p3 = ScalarFunction::power(3.0);
    auto p4 = ScalarFunction::power(4.0);
    CHECK(check_dominates(p2, p3).relation == DominationVerdict::Relation::Dominates);
    CHECK(check_dominates(p3, p4).relation == DominationVerdict::Relation::Dominates);
    CHECK(check_dominates(p2, p4).relation == DominationVerdict::Relation::Dominates);
}

TEST_CASE("anisotropic sums against their Sobolev conjugates") {
    // (2,2,7) in n=3: p_bar_star = 21 > 7, Phi is essentially dominated
    auto phi3 = GFunction::power_sum({2.0, 2.0, 7.0});
    auto pn3 = compute_phi_n(compute_phi_circ(phi3), 3);
    auto d3 = check_dominates(phi3, pn3);
    CHECK(d3.relation == DominationVerdict::Relation::Dominates);

    // (2,2,2,7) in n=4: p_bar_star = 56/9 < 7, domination fails on the last axis
    auto phi4 = GFunction::power_sum({2.0, 2.0, 2.0, 7.0});
    auto pn4 = compute_phi_n(compute_phi_circ(phi4), 4);
    auto d4 = check_dominates(phi4, pn4);
    CHECK(d4.relation == DominationVerdict::Relation::Fails);
    CHECK(d4.slope_a == doctest::Approx(7.0).epsilon(1e-3));
    CHECK(d4.slope_b == doctest::Approx(56.0 / 9.0).epsilon(1e-3));
    REQUIRE(d4.witness.has_value());
    REQUIRE(d4.witness->size() == 4);
    double r = 0.0;
    for (double c : *d4.witness) r += c * c;
    r = std::sqrt(r);
    CHECK(phi4.value(*d4.witness) > pn4.value(1024.0 * r));
}

TEST_CASE("equivalence of scalar functions") {
    CHECK(equivalent(ScalarFunction::power(2.0, 3.0), ScalarFunction::power(2.0, 1.0)));
    CHECK_FALSE(equivalent(ScalarFunction::power(2.0), ScalarFunction::power(2.5)));
    auto tab = tabulate_loglog([](double t) { return 2.0 * t * t; }, 1e-3, 1e3, 100);
    CHECK(equivalent(tab, ScalarFunction::power(2.0)));
}

TEST_CASE("conjugate exponents as exact fractions") {
    auto ce = power_sum_conjugate_exponent({2.0, 2.0, 7.0}, 3);
    CHECK(ce.p_bar == doctest::Approx(21.0 / 8.0).epsilon(1e-15));
    REQUIRE(ce.p_bar_exact.has_value());
    CHECK(ce.p_bar_exact->str() == "21/8");
    REQUIRE(ce.p_bar_star.has_value());
    CHECK(*ce.p_bar_star == doctest::Approx(21.0).epsilon(1e-15));
    CHECK(ce.p_bar_star_exact->str() == "21");
    CHECK_FALSE(ce.conjugate_infinite);

    auto ce4 = power_sum_conjugate_exponent({2.0, 2.0, 2.0, 7.0}, 4);
    CHECK(ce4.p_bar_exact->str() == "56/23");
    CHECK(ce4.p_bar_star_exact->str() == "56/9");
    CHECK(*ce4.p_bar_star == doctest::Approx(56.0 / 9.0).epsilon(1e-15));

    auto ced = power_sum_conjugate_exponent({1.8, 2.0, 2.2}, 3);
    CHECK(ced.p_bar_exact->str() == "594/299");
    CHECK(ced.p_bar_star_exact->str() == "594/101");
    CHECK(*ced.p_bar_star == doctest::Approx(594.0 / 101.0).epsilon(1e-12));

    // p_bar >= n: conjugate degenerates
    auto inf2 = power_sum_conjugate_exponent({3.0, 3.0}, 2);
    CHECK(inf2.conjugate_infinite);
    CHECK_FALSE(inf2.p_bar_star.has_value());
    auto border = power_sum_conjugate_exponent({2.0, 2.0}, 2);
    CHECK(border.conjugate_infinite);

    CHECK_THROWS_AS(power_sum_conjugate_exponent({2.0, 2.0}, 3), std::invalid_argument);
    CHECK_THROWS_AS(power_sum_conjugate_exponent({1.0, 2.0}, 2), std::invalid_argument);
}

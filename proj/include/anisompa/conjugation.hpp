#pragma once

#include "anisompa/gfunction.hpp"
#include "anisompa/rational.hpp"
#include "anisompa/scalar_function.hpp"
#include "anisompa/verdict.hpp"

#include <optional>
#include <vector>

namespace anisompa {

// Integrability screen at the origin and at infinity for the radial profile:
// the origin integral of (t / phi_circ(t))^{1/(n-1)} must converge (growth
// exponent at zero below n) and the profile must not outgrow t^n at infinity.
struct IntegrabilityReport {
    Verdict phi0 = Verdict::Inconclusive;
    Verdict phi1 = Verdict::Inconclusive;
    double exponent_at_zero = 0.0;
    double exponent_at_infinity = 0.0;
    double origin_integral = 0.0; // integral of psi over (0, 1]; +inf when divergent
};

IntegrabilityReport check_integrability(const ScalarFunction& phi_circ, int n);

// H(s) = ( integral_0^s (t / phi_circ(t))^{1/(n-1)} dt )^{(n-1)/n},
// evaluated segment-by-segment in closed form on the log-log interpolant so
// power-law inputs reproduce the textbook formula to rounding error.
class HTransform {
public:
    HTransform(const ScalarFunction& phi_circ, int n);
    double operator()(double s) const;
    double inverse(double r) const; // monotone bisection in log s
    double cumulative(double s) const; // the inner integral

private:
    int n_;
    std::vector<double> knots_;   // segment boundaries
    std::vector<double> coef_;    // psi(t) = coef * t^beta on each segment
    std::vector<double> beta_;
    std::vector<double> prefix_;  // cumulative integral up to each knot
    double head_exponent_;        // growth exponent of phi_circ at 0
};

double compute_H(const ScalarFunction& phi_circ, int n, double s);

struct PhiNGrid {
    double r_min = 1e-2;
    double r_max = 1e3;
    int count = 200;
};

// Sobolev conjugate Phi_n = phi_circ . H^{-1}. Requires the integrability
// screen to pass; throws otherwise.
ScalarFunction compute_phi_n(const ScalarFunction& phi_circ, int n,
                             const PhiNGrid& grid = {});

// Essential domination A << B: exists C with A(v) <= B(C |v|) for all large
// |v|. Decided on sampled log-log data; a growth-rate win for A beyond B's
// top slope certifies failure together with a synthesized witness radius.
struct DominationVerdict {
    enum class Relation { Dominates, Fails, Inconclusive };
    Relation relation = Relation::Inconclusive;
    std::optional<double> constant;          // C for Dominates
    double threshold_radius = 0.0;           // radius beyond which the bound holds
    std::optional<std::vector<double>> witness; // point violating every sampled C
    double slope_a = 0.0;                    // top-decade growth of A (max over directions)
    double slope_b = 0.0;                    // top-decade growth of B
};

DominationVerdict check_dominates(const GFunction& a, const ScalarFunction& b,
                                  const SamplePlan& plan = {});
DominationVerdict check_dominates(const ScalarFunction& a, const ScalarFunction& b,
                                  const SamplePlan& plan = {});

bool equivalent(const ScalarFunction& a, const ScalarFunction& b, const SamplePlan& plan = {});

// Harmonic-mean exponent p_bar = n / sum(1/p_i) and its Sobolev conjugate
// p_bar_star = n / (sum(1/p_i) - 1), carried as exact fractions whenever the
// input doubles decode to small rationals. p_bar >= n flags the conjugate as
// infinite (p_bar_star absent).
struct ConjugateExponents {
    double p_bar = 0.0;
    std::optional<double> p_bar_star;
    std::optional<Rational> p_bar_exact;
    std::optional<Rational> p_bar_star_exact;
    bool conjugate_infinite = false;
};

ConjugateExponents power_sum_conjugate_exponent(const std::vector<double>& p, int n);

} // namespace anisompa

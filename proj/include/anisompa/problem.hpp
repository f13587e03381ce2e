#pragma once

#include "anisompa/conjugation.hpp"
#include "anisompa/field.hpp"
#include "anisompa/gfunction.hpp"
#include "anisompa/scalar_function.hpp"
#include "anisompa/verdict.hpp"

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace anisompa {

// Bounded periodic potential with a declared lattice (per-axis periods).
struct Potential {
    std::function<double(std::span<const double>)> eval;
    std::vector<double> period;
};

// Odd superlinear source term f with antiderivative F (F(0) = 0) and the
// superquadraticity constant theta from the Ambrosetti-Rabinowitz condition.
struct Nonlinearity {
    std::function<double(double)> f;
    std::function<double(double)> antiderivative;
    double theta = 0.0;
};

// J(u) = int Phi(grad u) + V(x) N(|u|) - F(u) over the truncated box.
struct ProblemSpec {
    GFunction phi;
    ScalarFunction n_func;
    Potential potential;
    Nonlinearity nonlinearity;
    DomainSpec domain;

    // Cheap sampled invariants: V positive and lattice-periodic, F' = f,
    // F(0) = 0, dimensions consistent. Throws naming the violated invariant.
    void validate() const;
};

struct HypothesisReport {
    std::string name;
    Verdict verdict = Verdict::Inconclusive;
    std::vector<std::pair<std::string, double>> evidence;
    std::string note;
};

// Verdicts for the structural hypotheses, in a fixed order: integrability at
// zero and infinity of the radial profile, essential domination of Phi by the
// Sobolev conjugate, doubling of Phi, equivalence of N with the profile,
// smallness of f against N at zero and against Phi_n at infinity, the
// Ambrosetti-Rabinowitz inequality, and positivity/periodicity of V.
// phi_n may be absent (integrability failed); dependent checks then come back
// Inconclusive.
std::vector<HypothesisReport> audit_assumptions(const ProblemSpec& spec,
                                                const ScalarFunction& phi_circ,
                                                const std::optional<ScalarFunction>& phi_n,
                                                const SamplePlan& plan = {});

bool audit_all_pass(const std::vector<HypothesisReport>& reports);

} // namespace anisompa

#pragma once

#include "anisompa/problem.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace anisompa {

// Discrete operator bundle: samples V on the grid once and caches the
// Legendre conjugate of N for the residual dual norm.
class ProblemOperator {
public:
    explicit ProblemOperator(const ProblemSpec& spec);
    explicit ProblemOperator(ProblemSpec&&) = delete; // keeps a reference

    double energy(const Field& u) const;
    // Nodal residual of J: divergence-adjoint of the flux grad Phi(grad u)
    // plus V N'(|u|) sign(u) - f(u); clamped nodes carry zero.
    Field gradient(const Field& u) const;
    double derivative_dot(const Field& u, const Field& v) const; // J'(u)[v]
    // modular(Phi, grad u) + sum V N(|u|) h^n, the coercive part in the
    // bounded-sequence estimate
    double coercive_part(const Field& u) const;
    // Dual-norm proxy 2 ||gradient(u)||_{N^~}; an upper bound for the dual
    // norm of J'(u) via the Hoelder inequality for the Luxemburg pairing.
    double residual_dual_norm(const Field& u) const;

    const ProblemSpec& spec() const { return *spec_; }
    const Field& potential_field() const { return v_; }
    const ScalarFunction& n_conjugate() const { return n_conj_; }

private:
    const ProblemSpec* spec_;
    Field v_;
    ScalarFunction n_conj_;
};

double energy(const ProblemSpec& spec, const Field& u);
Field energy_gradient(const ProblemSpec& spec, const Field& u);

// Scale a seed shape by doubling until the energy goes negative; the valley
// endpoint of the mountain-pass path. Throws when 60 doublings never flip the
// sign (superquadratic growth absent).
Field find_valley_point(const ProblemSpec& spec, const Field& seed, int max_doublings = 60);

enum class MPVerdict { Converged, MaxIter, DegenerateToZero };
std::string to_string(MPVerdict v);

struct MPOptions {
    int path_points = 21;
    double descent_step = 0.1;
    double tol = 1e-4;
    int max_iter = 2000;
    int snapshot_stride = 25;
};

struct MPHistoryEntry {
    int iteration = 0;
    double max_energy = 0.0;
    double residual = 0.0;
};

struct MPResult {
    Field u_star;
    double c_est = 0.0;
    MPVerdict verdict = MPVerdict::MaxIter;
    int iterations = 0;
    double residual = 0.0;
    std::vector<MPHistoryEntry> history;
    std::vector<Field> snapshots;
    std::string note;
};

// Deformation descent on a discrete path from 0 to the valley point: push the
// highest-energy interior point along -gradient with backtracking, keep the
// path equidistributed in the Sobolev norm (highest point pinned), stop when
// the dual-norm residual at the top drops under tol.
MPResult mountain_pass_solve(const ProblemSpec& spec, const MPOptions& opts = {});

struct PSEntry {
    double energy = 0.0;
    double residual = 0.0;
    double lhs = 0.0; // (theta - s_phi)/theta * coercive part
    double rhs = 0.0; // J(v) - J'(v)[v]/theta
    bool bound_ok = false;
};

// Palais-Smale diagnostics along iterates: bounded-sequence inequality and
// residual per field. Requires theta > s_phi.
std::vector<PSEntry> ps_monitor(const ProblemSpec& spec, std::span<const Field> iterates,
                                const GrowthIndices& phi_indices);

struct ConcentrationResult {
    double value = 0.0;
    std::vector<double> center;
};

// max over grid centers y of sum_{|x - y| <= r} N(|u|) h^n, with minimum-image
// distance under periodic boundaries.
ConcentrationResult concentration_functional(const Field& u, double r,
                                             const ScalarFunction& n_func);

// Cyclic translation u(. + shift) on a periodic grid; shift must sit on the
// grid and, when a lattice is declared, on the potential's lattice.
Field recenter(const Field& u, std::span<const double> shift,
               std::span<const double> lattice_period = {});

} // namespace anisompa

#pragma once

#include "anisompa/scalar_function.hpp"
#include "anisompa/verdict.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace anisompa {

// Deterministic sampling layout shared by the growth/doubling/domination
// probes: log-uniform radii plus a direction set of axes, sign diagonals
// (capped) and seeded random unit vectors.
struct SamplePlan {
    double radius_min = 1e-3;
    double radius_max = 1e3;
    int radii_per_decade = 10;
    int random_directions = 256;
    int diagonal_cap = 64;
    std::uint64_t seed = 0;

    std::vector<double> radii() const;
};

std::vector<std::vector<double>> sample_directions(int dim, const SamplePlan& plan);

// Anisotropic Young function on R^dim, vanishing only at 0, convex and
// coercive. Two representations: an exact power sum
//   Phi(v) = sum_i a_i |v_i|^{p_i},  p_i > 1, a_i > 0,
// or an opaque callable (optionally with a gradient oracle; otherwise central
// finite differences are used).
class GFunction {
public:
    using ValueFn = std::function<double(std::span<const double>)>;
    using GradFn = std::function<void(std::span<const double>, std::span<double>)>;

    static GFunction power_sum(std::vector<double> exponents, std::vector<double> coefficients = {});
    static GFunction callable(int dim, ValueFn value, GradFn gradient = nullptr);

    int dim() const { return dim_; }
    bool is_power_sum() const { return power_sum_; }
    const std::vector<double>& exponents() const;
    const std::vector<double>& coefficients() const;

    double value(std::span<const double> v) const;
    void gradient(std::span<const double> v, std::span<double> out) const;
    // Fused value-and-gradient; one pow per component on the power-sum path.
    double value_and_gradient(std::span<const double> v, std::span<double> grad_out) const;

private:
    GFunction() = default;
    int dim_ = 0;
    bool power_sum_ = false;
    std::vector<double> p_, a_;
    ValueFn value_fn_;
    GradFn grad_fn_;

    void check_input(std::span<const double> v) const;
};

struct Evaluation {
    double value = 0.0;
    std::vector<double> gradient;
};

Evaluation evaluate(const GFunction& g, std::span<const double> v);

// inf / sup of v . grad Phi(v) / Phi(v) over the sample plan, rounded outward
// to multiples of 1e-3. sup beyond ratio_cap reports +inf.
struct GrowthIndices {
    double i = 0.0;
    double s = 0.0;
};

GrowthIndices growth_indices(const GFunction& g, const SamplePlan& plan = {},
                             double ratio_cap = 1e6);
GrowthIndices growth_indices(const ScalarFunction& n, const SamplePlan& plan = {},
                             double ratio_cap = 1e6);

// xi bounds from the index pair: lower = min(t^i, t^s), upper = max(t^i, t^s).
std::pair<double, double> xi_bounds(const GrowthIndices& idx, double t);

struct DoublingReport {
    double k1 = 0.0;                 // inf sampled Phi(2v)/Phi(v)
    double k2 = 0.0;                 // sup sampled Phi(2v)/Phi(v)
    Verdict delta2 = Verdict::Inconclusive;
    Verdict nabla2 = Verdict::Inconclusive;
    std::vector<double> argmin;      // sample attaining k1
    std::vector<double> argmax;      // sample attaining k2 (finite samples)
    std::string note;
};

DoublingReport check_delta2_nabla2(const GFunction& g, const SamplePlan& plan = {});

} // namespace anisompa

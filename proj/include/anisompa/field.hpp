#pragma once

#include "anisompa/gfunction.hpp"
#include "anisompa/scalar_function.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace anisompa {

enum class BoundaryRule { Periodic, ZeroDirichlet };

// Uniform truncation of R^n to the box [-L, L]^n with m nodes per axis,
// spacing h = 2L/m, node x_a = -L + i_a h. Cells are node-anchored; forward
// differences map nodes to cells. ZeroDirichlet clamps the outermost node
// layer to zero; Periodic wraps.
struct DomainSpec {
    int n = 0;
    double half_width = 0.0;
    int points_per_axis = 0;
    BoundaryRule boundary = BoundaryRule::Periodic;

    double spacing() const { return 2.0 * half_width / points_per_axis; }
    std::int64_t node_count() const;
    double cell_measure() const; // h^n
    void coords_of(std::int64_t flat, std::span<int> out) const;
    std::int64_t flat_of(std::span<const int> coords) const; // wraps indices
    double axis_coord(int idx) const { return -half_width + idx * spacing(); }
    void validate() const;

    friend bool operator==(const DomainSpec&, const DomainSpec&) = default;
};

class Field {
public:
    Field() = default;
    explicit Field(const DomainSpec& d);
    static Field from_function(const DomainSpec& d,
                               const std::function<double(std::span<const double>)>& fn);

    const DomainSpec& domain() const { return domain_; }
    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }
    double operator[](std::int64_t i) const { return values_[static_cast<size_t>(i)]; }
    double& operator[](std::int64_t i) { return values_[static_cast<size_t>(i)]; }

    void apply_boundary(); // zero the clamped layer under ZeroDirichlet
    double max_abs() const;

private:
    DomainSpec domain_;
    std::vector<double> values_;
};

// Cellwise n-vector data, layout [cell * n + axis].
class VectorField {
public:
    VectorField() = default;
    explicit VectorField(const DomainSpec& d);
    const DomainSpec& domain() const { return domain_; }
    std::span<const double> raw() const { return values_; }
    std::span<double> raw() { return values_; }
    std::span<const double> at(std::int64_t cell) const {
        return {values_.data() + cell * domain_.n, static_cast<size_t>(domain_.n)};
    }
    std::span<double> at(std::int64_t cell) {
        return {values_.data() + cell * domain_.n, static_cast<size_t>(domain_.n)};
    }

private:
    DomainSpec domain_;
    std::vector<double> values_;
};

// field arithmetic helpers (same domain required)
Field axpy(double alpha, const Field& x, const Field& y);   // alpha x + y
Field scale(double alpha, const Field& x);
double dot_h(const Field& a, const Field& b);               // sum a b h^n
double l2_norm_h(const Field& a);

VectorField gradient_field(const Field& u);
// Adjoint of -gradient: sum_cells W . grad(v) h^n = sum_nodes div_adj(W) v h^n.
Field divergence_adjoint(const VectorField& w);

double modular(const GFunction& g, const VectorField& w);
double modular(const ScalarFunction& n, const Field& u);

// Luxemburg gauge inf{ k > 0 : modular(arg / k) <= 1 }. Power and power-sum
// kinds solve the scaling identity from precomputed moments; general kinds
// bisect on a doubling bracket. Zero argument gives 0; a modular that never
// reaches 1 on the bracket is reported as degenerate.
double luxemburg_norm(const GFunction& g, const VectorField& w);
double luxemburg_norm(const ScalarFunction& n, const Field& u);

struct SobolevNorm {
    double gradient_part = 0.0;
    double zero_order_part = 0.0;
    double total = 0.0;
};

SobolevNorm sobolev_norm(const GFunction& phi, const ScalarFunction& n_func, const Field& u);

struct ModularBoundsReport {
    double norm = 0.0;
    double modular_value = 0.0;
    double lower_bound = 0.0; // xi_lower(norm)
    double upper_bound = 0.0; // xi_upper(norm)
    bool lower_ok = false;
    bool upper_ok = false;
};

ModularBoundsReport verify_modular_norm_bounds(const GFunction& g, const GrowthIndices& idx,
                                               const VectorField& w, double rel_tol = 1e-6);
ModularBoundsReport verify_modular_norm_bounds(const ScalarFunction& n, const GrowthIndices& idx,
                                               const Field& u, double rel_tol = 1e-6);

struct SobolevInequalityReport {
    double k_est = 0.0;                  // max norm ratio over the family
    std::vector<double> ratios;          // per member
    std::optional<double> k_integral;    // smallest grid K passing the modular form
};

SobolevInequalityReport verify_sobolev_inequality(const GFunction& phi,
                                                  const ScalarFunction& phi_n,
                                                  std::span<const Field> family,
                                                  std::span<const double> k_grid);

// CSV: header x1,...,xn,value; one row per node in flat order; %.17g so
// round-trips are bit-exact.
void write_field_csv(const Field& u, std::ostream& os);
void write_field_csv(const Field& u, const std::string& path);
Field read_field_csv(std::istream& is, const DomainSpec& expected);
Field read_field_csv(const std::string& path, const DomainSpec& expected);

// deterministic smooth test fields
Field gaussian_bump(const DomainSpec& d, std::span<const double> center, double width,
                    double amplitude);
std::vector<Field> random_bump_family(const DomainSpec& d, int count, std::uint64_t seed);

} // namespace anisompa

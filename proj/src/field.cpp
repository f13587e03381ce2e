#include "anisompa/field.hpp"

#include "anisompa/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace anisompa {

void DomainSpec::validate() const {
    if (n < 1) throw std::invalid_argument("DomainSpec: n >= 1");
    if (!(half_width > 0.0)) throw std::invalid_argument("DomainSpec: half_width > 0");
    if (points_per_axis < 3) throw std::invalid_argument("DomainSpec: points_per_axis >= 3");
    double count = std::pow(static_cast<double>(points_per_axis), n);
    if (count > 2e8) throw std::invalid_argument("DomainSpec: grid too large");
}

std::int64_t DomainSpec::node_count() const {
    std::int64_t c = 1;
    for (int a = 0; a < n; ++a) c *= points_per_axis;
    return c;
}

double DomainSpec::cell_measure() const {
    return std::pow(spacing(), n);
}

void DomainSpec::coords_of(std::int64_t flat, std::span<int> out) const {
    for (int a = n - 1; a >= 0; --a) {
        out[static_cast<size_t>(a)] = static_cast<int>(flat % points_per_axis);
        flat /= points_per_axis;
    }
}

std::int64_t DomainSpec::flat_of(std::span<const int> coords) const {
    std::int64_t flat = 0;
    for (int a = 0; a < n; ++a) {
        int c = coords[static_cast<size_t>(a)] % points_per_axis;
        if (c < 0) c += points_per_axis;
        flat = flat * points_per_axis + c;
    }
    return flat;
}

namespace {

// odometer over grid coordinates in flat order (axis 0 slowest)
struct Odometer {
    int n, m;
    std::vector<int> c;
    explicit Odometer(const DomainSpec& d) : n(d.n), m(d.points_per_axis), c(static_cast<size_t>(d.n), 0) {}
    void advance() {
        for (int a = n - 1; a >= 0; --a) {
            if (++c[static_cast<size_t>(a)] < m) return;
            c[static_cast<size_t>(a)] = 0;
        }
    }
};

std::vector<std::int64_t> axis_strides(const DomainSpec& d) {
    std::vector<std::int64_t> s(static_cast<size_t>(d.n), 1);
    for (int a = d.n - 2; a >= 0; --a)
        s[static_cast<size_t>(a)] = s[static_cast<size_t>(a) + 1] * d.points_per_axis;
    return s;
}

void require_same_domain(const DomainSpec& a, const DomainSpec& b, const char* who) {
    if (!(a == b)) throw std::invalid_argument(std::string(who) + ": domain mismatch");
}

} // namespace

Field::Field(const DomainSpec& d) : domain_(d) {
    domain_.validate();
    values_.assign(static_cast<size_t>(d.node_count()), 0.0);
}

Field Field::from_function(const DomainSpec& d,
                           const std::function<double(std::span<const double>)>& fn) {
    Field u(d);
    Odometer od(d);
    std::vector<double> x(static_cast<size_t>(d.n));
    for (std::int64_t j = 0; j < d.node_count(); ++j, od.advance()) {
        for (int a = 0; a < d.n; ++a) x[static_cast<size_t>(a)] = d.axis_coord(od.c[static_cast<size_t>(a)]);
        u[j] = fn(x);
    }
    u.apply_boundary();
    return u;
}

void Field::apply_boundary() {
    if (domain_.boundary != BoundaryRule::ZeroDirichlet) return;
    Odometer od(domain_);
    int last = domain_.points_per_axis - 1;
    for (std::int64_t j = 0; j < domain_.node_count(); ++j, od.advance()) {
        for (int a = 0; a < domain_.n; ++a) {
            int c = od.c[static_cast<size_t>(a)];
            if (c == 0 || c == last) { values_[static_cast<size_t>(j)] = 0.0; break; }
        }
    }
}

double Field::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

VectorField::VectorField(const DomainSpec& d) : domain_(d) {
    domain_.validate();
    values_.assign(static_cast<size_t>(d.node_count()) * static_cast<size_t>(d.n), 0.0);
}

Field axpy(double alpha, const Field& x, const Field& y) {
    require_same_domain(x.domain(), y.domain(), "axpy");
    Field r(x.domain());
    auto xv = x.values(), yv = y.values();
    auto rv = r.values();
    for (size_t i = 0; i < rv.size(); ++i) rv[i] = alpha * xv[i] + yv[i];
    return r;
}

Field scale(double alpha, const Field& x) {
    Field r(x.domain());
    auto xv = x.values();
    auto rv = r.values();
    for (size_t i = 0; i < rv.size(); ++i) rv[i] = alpha * xv[i];
    return r;
}

double dot_h(const Field& a, const Field& b) {
    require_same_domain(a.domain(), b.domain(), "dot_h");
    double s = 0.0;
    auto av = a.values(), bv = b.values();
    for (size_t i = 0; i < av.size(); ++i) s += av[i] * bv[i];
    return s * a.domain().cell_measure();
}

double l2_norm_h(const Field& a) { return std::sqrt(dot_h(a, a)); }

VectorField gradient_field(const Field& u) {
    const auto& d = u.domain();
    VectorField w(d);
    auto strides = axis_strides(d);
    double inv_h = 1.0 / d.spacing();
    int m = d.points_per_axis;
    Odometer od(d);
    bool periodic = d.boundary == BoundaryRule::Periodic;
    for (std::int64_t j = 0; j < d.node_count(); ++j, od.advance()) {
        auto cell = w.at(j);
        for (int a = 0; a < d.n; ++a) {
            int c = od.c[static_cast<size_t>(a)];
            double nb;
            if (c + 1 < m) nb = u[j + strides[static_cast<size_t>(a)]];
            else if (periodic) nb = u[j - static_cast<std::int64_t>(m - 1) * strides[static_cast<size_t>(a)]];
            else nb = 0.0; // ghost beyond the clamped layer
            cell[static_cast<size_t>(a)] = (nb - u[j]) * inv_h;
        }
    }
    return w;
}

Field divergence_adjoint(const VectorField& w) {
    const auto& d = w.domain();
    Field g(d);
    auto strides = axis_strides(d);
    double inv_h = 1.0 / d.spacing();
    int m = d.points_per_axis;
    Odometer od(d);
    bool periodic = d.boundary == BoundaryRule::Periodic;
    for (std::int64_t j = 0; j < d.node_count(); ++j, od.advance()) {
        double s = 0.0;
        for (int a = 0; a < d.n; ++a) {
            int c = od.c[static_cast<size_t>(a)];
            double w_here = w.at(j)[static_cast<size_t>(a)];
            double w_back;
            if (c > 0) w_back = w.at(j - strides[static_cast<size_t>(a)])[static_cast<size_t>(a)];
            else if (periodic) w_back = w.at(j + static_cast<std::int64_t>(m - 1) * strides[static_cast<size_t>(a)])[static_cast<size_t>(a)];
            else w_back = 0.0;
            s += (w_back - w_here) * inv_h;
        }
        g[j] = s;
    }
    g.apply_boundary();
    return g;
}

double modular(const GFunction& g, const VectorField& w) {
    const auto& d = w.domain();
    if (g.dim() != d.n) throw std::invalid_argument("modular: dimension mismatch");
    double s = 0.0;
    for (std::int64_t j = 0; j < d.node_count(); ++j) s += g.value(w.at(j));
    return s * d.cell_measure();
}

double modular(const ScalarFunction& n, const Field& u) {
    double s = 0.0;
    for (double v : u.values()) s += n.value(std::abs(v));
    return s * u.domain().cell_measure();
}

namespace {

// decreasing rho with rho(0+) = inf on nonzero input; solve rho(k) = 1
double gauge_bisect(const std::function<double(double)>& rho) {
    double hi = 1.0;
    int guard = 0;
    while (rho(hi) > 1.0) {
        hi *= 2.0;
        if (hi > 1e12 || ++guard > 100)
            throw std::runtime_error("luxemburg_norm: gauge not bracketable (degenerate modular)");
    }
    double lo = hi;
    guard = 0;
    while (rho(lo) <= 1.0) {
        lo *= 0.5;
        if (lo < 1e-12) return 0.0; // indistinguishable from the zero field
        if (++guard > 100) break;
    }
    double llo = std::log(lo), lhi = std::log(hi);
    while (lhi - llo > 1e-8) {
        double mid = 0.5 * (llo + lhi);
        (rho(std::exp(mid)) > 1.0 ? llo : lhi) = mid;
    }
    return std::exp(lhi); // upper end keeps modular(w / k) <= 1
}

} // namespace

double luxemburg_norm(const GFunction& g, const VectorField& w) {
    const auto& d = w.domain();
    if (g.dim() != d.n) throw std::invalid_argument("luxemburg_norm: dimension mismatch");
    bool zero = true;
    for (double v : w.raw())
        if (v != 0.0) { zero = false; break; }
    if (zero) return 0.0;

    if (g.is_power_sum()) {
        const auto& p = g.exponents();
        const auto& a = g.coefficients();
        std::vector<double> moments(p.size(), 0.0);
        for (std::int64_t j = 0; j < d.node_count(); ++j) {
            auto cell = w.at(j);
            for (size_t i = 0; i < p.size(); ++i) {
                double av = std::abs(cell[i]);
                if (av > 0.0) moments[i] += std::pow(av, p[i]);
            }
        }
        double meas = d.cell_measure();
        for (size_t i = 0; i < p.size(); ++i) moments[i] *= a[i] * meas;
        auto rho = [&](double k) {
            double s = 0.0;
            for (size_t i = 0; i < p.size(); ++i) s += moments[i] * std::pow(k, -p[i]);
            return s;
        };
        return gauge_bisect(rho);
    }
    VectorField scaled(d);
    auto rho = [&](double k) {
        double inv = 1.0 / k;
        auto src = w.raw();
        auto dst = scaled.raw();
        for (size_t i = 0; i < src.size(); ++i) dst[i] = src[i] * inv;
        return modular(g, scaled);
    };
    return gauge_bisect(rho);
}

double luxemburg_norm(const ScalarFunction& n, const Field& u) {
    bool zero = true;
    for (double v : u.values())
        if (v != 0.0) { zero = false; break; }
    if (zero) return 0.0;

    if (n.is_power()) {
        double q = n.exponent(), kappa = n.scale();
        double s = 0.0;
        for (double v : u.values()) {
            double av = std::abs(v);
            if (av > 0.0) s += std::pow(av, q);
        }
        s *= kappa * u.domain().cell_measure();
        return std::pow(s, 1.0 / q);
    }
    Field scaled(u.domain());
    auto rho = [&](double k) {
        double inv = 1.0 / k;
        auto src = u.values();
        auto dst = scaled.values();
        for (size_t i = 0; i < src.size(); ++i) dst[i] = src[i] * inv;
        return modular(n, scaled);
    };
    return gauge_bisect(rho);
}

SobolevNorm sobolev_norm(const GFunction& phi, const ScalarFunction& n_func, const Field& u) {
    SobolevNorm out;
    out.gradient_part = luxemburg_norm(phi, gradient_field(u));
    out.zero_order_part = luxemburg_norm(n_func, u);
    out.total = out.gradient_part + out.zero_order_part;
    return out;
}

namespace {

ModularBoundsReport bounds_report(double norm, double mod, const GrowthIndices& idx, double rel_tol) {
    ModularBoundsReport rep;
    rep.norm = norm;
    rep.modular_value = mod;
    auto [lo, hi] = xi_bounds(idx, norm);
    rep.lower_bound = lo;
    rep.upper_bound = hi;
    rep.lower_ok = mod >= lo * (1.0 - rel_tol) - 1e-300;
    rep.upper_ok = mod <= hi * (1.0 + rel_tol) + 1e-300;
    return rep;
}

} // namespace

ModularBoundsReport verify_modular_norm_bounds(const GFunction& g, const GrowthIndices& idx,
                                               const VectorField& w, double rel_tol) {
    return bounds_report(luxemburg_norm(g, w), modular(g, w), idx, rel_tol);
}

ModularBoundsReport verify_modular_norm_bounds(const ScalarFunction& n, const GrowthIndices& idx,
                                               const Field& u, double rel_tol) {
    return bounds_report(luxemburg_norm(n, u), modular(n, u), idx, rel_tol);
}

SobolevInequalityReport verify_sobolev_inequality(const GFunction& phi,
                                                  const ScalarFunction& phi_n,
                                                  std::span<const Field> family,
                                                  std::span<const double> k_grid) {
    if (family.empty()) throw std::invalid_argument("verify_sobolev_inequality: empty family");
    SobolevInequalityReport rep;
    for (const auto& u : family) {
        if (u.domain().boundary != BoundaryRule::ZeroDirichlet)
            throw std::invalid_argument("verify_sobolev_inequality: needs zero-boundary fields");
        auto grad = gradient_field(u);
        double gnorm = luxemburg_norm(phi, grad);
        double unorm = luxemburg_norm(phi_n, u);
        if (gnorm == 0.0 && unorm > 0.0)
            throw std::invalid_argument("verify_sobolev_inequality: zero gradient with nonzero field");
        double ratio = gnorm == 0.0 ? 0.0 : unorm / gnorm;
        rep.ratios.push_back(ratio);
        rep.k_est = std::max(rep.k_est, ratio);
    }
    for (double k : k_grid) {
        bool all_ok = true;
        for (const auto& u : family) {
            auto grad = gradient_field(u);
            double grad_modular = modular(phi, grad);
            if (grad_modular == 0.0) continue; // zero member, trivially fine
            double denom = k * std::pow(grad_modular, 1.0 / u.domain().n);
            Field scaled = scale(1.0 / denom, u);
            if (modular(phi_n, scaled) > grad_modular * (1.0 + 1e-9)) { all_ok = false; break; }
        }
        if (all_ok) { rep.k_integral = k; break; }
    }
    return rep;
}

void write_field_csv(const Field& u, std::ostream& os) {
    const auto& d = u.domain();
    for (int a = 0; a < d.n; ++a) os << "x" << (a + 1) << ",";
    os << "value\n";
    Odometer od(d);
    char buf[32];
    std::string line;
    for (std::int64_t j = 0; j < d.node_count(); ++j, od.advance()) {
        line.clear();
        for (int a = 0; a < d.n; ++a) {
            std::snprintf(buf, sizeof buf, "%.17g", d.axis_coord(od.c[static_cast<size_t>(a)]));
            line += buf;
            line += ',';
        }
        std::snprintf(buf, sizeof buf, "%.17g", u[j]);
        line += buf;
        line += '\n';
        os << line;
    }
}

void write_field_csv(const Field& u, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_field_csv: cannot open " + path);
    write_field_csv(u, os);
}

Field read_field_csv(std::istream& is, const DomainSpec& expected) {
    expected.validate();
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("read_field_csv: empty stream");
    {
        std::string want;
        for (int a = 0; a < expected.n; ++a) want += "x" + std::to_string(a + 1) + ",";
        want += "value";
        if (line != want)
            throw std::runtime_error("read_field_csv: header mismatch, expected '" + want + "'");
    }
    Field u(expected);
    Odometer od(expected);
    std::int64_t row = 0;
    int last = expected.points_per_axis - 1;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (row >= expected.node_count())
            throw std::runtime_error("read_field_csv: too many rows");
        const char* s = line.c_str();
        char* end = nullptr;
        for (int a = 0; a < expected.n; ++a) {
            double x = std::strtod(s, &end);
            if (end == s || *end != ',')
                throw std::runtime_error("read_field_csv: malformed row at line " + std::to_string(row + 2));
            double want = expected.axis_coord(od.c[static_cast<size_t>(a)]);
            if (std::abs(x - want) > 1e-9 * std::max(1.0, std::abs(want)))
                throw std::runtime_error("read_field_csv: coordinate mismatch at line " + std::to_string(row + 2));
            s = end + 1;
        }
        double v = std::strtod(s, &end);
        if (end == s) throw std::runtime_error("read_field_csv: malformed value at line " + std::to_string(row + 2));
        if (expected.boundary == BoundaryRule::ZeroDirichlet && v != 0.0) {
            for (int a = 0; a < expected.n; ++a) {
                int c = od.c[static_cast<size_t>(a)];
                if (c == 0 || c == last)
                    throw std::runtime_error("read_field_csv: nonzero value on clamped node at line " +
                                             std::to_string(row + 2));
            }
        }
        u[row] = v;
        ++row;
        od.advance();
    }
    if (row != expected.node_count()) throw std::runtime_error("read_field_csv: too few rows");
    return u;
}

Field read_field_csv(const std::string& path, const DomainSpec& expected) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("read_field_csv: cannot open " + path);
    return read_field_csv(is, expected);
}

Field gaussian_bump(const DomainSpec& d, std::span<const double> center, double width,
                    double amplitude) {
    if (static_cast<int>(center.size()) != d.n)
        throw std::invalid_argument("gaussian_bump: center dimension mismatch");
    if (!(width > 0.0)) throw std::invalid_argument("gaussian_bump: width > 0");
    std::vector<double> c(center.begin(), center.end());
    return Field::from_function(d, [c, width, amplitude](std::span<const double> x) {
        double q = 0.0;
        for (size_t a = 0; a < x.size(); ++a) {
            double dxa = x[a] - c[a];
            q += dxa * dxa;
        }
        return amplitude * std::exp(-q / (2.0 * width * width));
    });
}

std::vector<Field> random_bump_family(const DomainSpec& d, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<Field> family;
    family.reserve(static_cast<size_t>(count));
    double l = d.half_width;
    for (int k = 0; k < count; ++k) {
        int nb = 1 + static_cast<int>(unif(rng) * 3.0);
        if (nb > 3) nb = 3;
        Field u(d);
        for (int b = 0; b < nb; ++b) {
            std::vector<double> c(static_cast<size_t>(d.n));
            for (auto& x : c) x = (unif(rng) - 0.5) * l;
            double width = l / 8.0 + unif(rng) * l / 8.0;
            double amp = 0.5 + 1.5 * unif(rng);
            u = axpy(1.0, gaussian_bump(d, c, width, amp), u);
        }
        u.apply_boundary();
        family.push_back(std::move(u));
    }
    return family;
}

} // namespace anisompa

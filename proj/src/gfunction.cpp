#include "anisompa/gfunction.hpp"

#include "anisompa/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace anisompa {

std::vector<double> SamplePlan::radii() const {
    if (!(radius_min > 0.0) || !(radius_max > radius_min))
        throw std::invalid_argument("SamplePlan: need 0 < radius_min < radius_max");
    if (radii_per_decade < 1) throw std::invalid_argument("SamplePlan: radii_per_decade >= 1");
    double decades = std::log10(radius_max / radius_min);
    int count = std::max(2, static_cast<int>(std::ceil(decades * radii_per_decade)) + 1);
    return log_grid(radius_min, radius_max, count);
}

std::vector<std::vector<double>> sample_directions(int dim, const SamplePlan& plan) {
    if (dim < 1) throw std::invalid_argument("sample_directions: dim >= 1");
    std::vector<std::vector<double>> dirs;
    for (int i = 0; i < dim; ++i) {
        std::vector<double> e(dim, 0.0);
        e[i] = 1.0;
        dirs.push_back(e);
        e[i] = -1.0;
        dirs.push_back(e);
    }
    // sign diagonals (all +-1 patterns), capped, in binary-counter order
    long long total = dim < 62 ? (1LL << dim) : std::numeric_limits<long long>::max();
    long long ndiag = std::min<long long>(total, plan.diagonal_cap);
    double inv = 1.0 / std::sqrt(static_cast<double>(dim));
    for (long long mask = 0; mask < ndiag; ++mask) {
        std::vector<double> d(dim);
        for (int i = 0; i < dim; ++i) d[i] = ((mask >> i) & 1) ? -inv : inv;
        dirs.push_back(std::move(d));
    }
    std::mt19937_64 rng(plan.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int k = 0; k < plan.random_directions; ++k) {
        std::vector<double> d(dim);
        double norm2 = 0.0;
        do {
            norm2 = 0.0;
            for (auto& x : d) { x = normal(rng); norm2 += x * x; }
        } while (norm2 < 1e-12);
        double s = 1.0 / std::sqrt(norm2);
        for (auto& x : d) x *= s;
        dirs.push_back(std::move(d));
    }
    return dirs;
}

GFunction GFunction::power_sum(std::vector<double> exponents, std::vector<double> coefficients) {
    if (exponents.size() < 2)
        throw std::invalid_argument("GFunction::power_sum: dimension must be >= 2");
    if (coefficients.empty()) coefficients.assign(exponents.size(), 1.0);
    if (coefficients.size() != exponents.size())
        throw std::invalid_argument("GFunction::power_sum: coefficient/exponent size mismatch");
    for (double p : exponents)
        if (!std::isfinite(p) || p <= 1.0)
            throw std::invalid_argument("GFunction::power_sum: exponents must exceed 1");
    for (double a : coefficients)
        if (!std::isfinite(a) || a <= 0.0)
            throw std::invalid_argument("GFunction::power_sum: coefficients must be positive");
    GFunction g;
    g.dim_ = static_cast<int>(exponents.size());
    g.power_sum_ = true;
    g.p_ = std::move(exponents);
    g.a_ = std::move(coefficients);
    return g;
}

GFunction GFunction::callable(int dim, ValueFn value, GradFn gradient) {
    if (dim < 2) throw std::invalid_argument("GFunction::callable: dimension must be >= 2");
    if (!value) throw std::invalid_argument("GFunction::callable: value function required");
    GFunction g;
    g.dim_ = dim;
    g.value_fn_ = std::move(value);
    g.grad_fn_ = std::move(gradient);
    return g;
}

const std::vector<double>& GFunction::exponents() const {
    if (!power_sum_) throw std::logic_error("GFunction: exponents() on callable kind");
    return p_;
}

const std::vector<double>& GFunction::coefficients() const {
    if (!power_sum_) throw std::logic_error("GFunction: coefficients() on callable kind");
    return a_;
}

void GFunction::check_input(std::span<const double> v) const {
    if (static_cast<int>(v.size()) != dim_)
        throw std::invalid_argument("GFunction: argument dimension mismatch");
    for (double x : v)
        if (!std::isfinite(x)) throw std::invalid_argument("GFunction: non-finite argument");
}

double GFunction::value(std::span<const double> v) const {
    check_input(v);
    if (power_sum_) {
        double s = 0.0;
        for (int i = 0; i < dim_; ++i) s += a_[i] * std::pow(std::abs(v[i]), p_[i]);
        return s;
    }
    return value_fn_(v);
}

double GFunction::value_and_gradient(std::span<const double> v, std::span<double> grad_out) const {
    check_input(v);
    if (static_cast<int>(grad_out.size()) != dim_)
        throw std::invalid_argument("GFunction: gradient output size mismatch");
    if (power_sum_) {
        double s = 0.0;
        for (int i = 0; i < dim_; ++i) {
            double av = std::abs(v[i]);
            double b = av == 0.0 ? 0.0 : std::pow(av, p_[i] - 1.0);
            s += a_[i] * b * av;
            grad_out[i] = a_[i] * p_[i] * b * sign_of(v[i]);
        }
        return s;
    }
    gradient(v, grad_out);
    return value_fn_(v);
}

void GFunction::gradient(std::span<const double> v, std::span<double> out) const {
    check_input(v);
    if (static_cast<int>(out.size()) != dim_)
        throw std::invalid_argument("GFunction: gradient output size mismatch");
    if (power_sum_) {
        for (int i = 0; i < dim_; ++i) {
            double av = std::abs(v[i]);
            out[i] = av == 0.0 ? 0.0 : a_[i] * p_[i] * std::pow(av, p_[i] - 1.0) * sign_of(v[i]);
        }
        return;
    }
    if (grad_fn_) {
        grad_fn_(v, out);
        return;
    }
    // central differences with componentwise relative step
    std::vector<double> w(v.begin(), v.end());
    for (int i = 0; i < dim_; ++i) {
        double h = 1e-5 * (1.0 + std::abs(v[i]));
        double orig = w[i];
        w[i] = orig + h;
        double fp = value_fn_(w);
        w[i] = orig - h;
        double fm = value_fn_(w);
        w[i] = orig;
        out[i] = (fp - fm) / (2.0 * h);
    }
}

Evaluation evaluate(const GFunction& g, std::span<const double> v) {
    Evaluation e;
    e.gradient.resize(static_cast<size_t>(g.dim()));
    e.value = g.value_and_gradient(v, e.gradient);
    return e;
}

namespace {

struct RatioScan {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    bool unbounded = false;

    void feed(double r) {
        if (!std::isfinite(r)) { unbounded = true; return; }
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
};

GrowthIndices round_indices(const RatioScan& scan, double ratio_cap) {
    GrowthIndices idx;
    idx.i = round_down_step(scan.lo, 1e-3);
    if (scan.unbounded || scan.hi > ratio_cap)
        idx.s = std::numeric_limits<double>::infinity();
    else
        idx.s = round_up_step(scan.hi, 1e-3);
    return idx;
}

} // namespace

GrowthIndices growth_indices(const GFunction& g, const SamplePlan& plan, double ratio_cap) {
    auto radii = plan.radii();
    auto dirs = sample_directions(g.dim(), plan);
    std::vector<double> v(static_cast<size_t>(g.dim()));
    std::vector<double> grad(static_cast<size_t>(g.dim()));
    RatioScan scan;
    for (const auto& d : dirs) {
        for (double r : radii) {
            for (int i = 0; i < g.dim(); ++i) v[static_cast<size_t>(i)] = r * d[static_cast<size_t>(i)];
            double val = g.value_and_gradient(v, grad);
            if (!std::isfinite(val)) { scan.unbounded = true; continue; }
            if (val <= 0.0) continue; // vanishing sample carries no ratio
            double dot = 0.0;
            for (int i = 0; i < g.dim(); ++i) dot += v[static_cast<size_t>(i)] * grad[static_cast<size_t>(i)];
            scan.feed(dot / val);
        }
    }
    if (!std::isfinite(scan.lo))
        throw std::runtime_error("growth_indices: function vanished on every sample");
    return round_indices(scan, ratio_cap);
}

GrowthIndices growth_indices(const ScalarFunction& n, const SamplePlan& plan, double ratio_cap) {
    auto radii = plan.radii();
    RatioScan scan;
    for (double t : radii) {
        double val = n.value(t);
        if (!std::isfinite(val)) { scan.unbounded = true; continue; }
        if (val <= 0.0) continue;
        double d = n.derivative(t);
        if (!std::isfinite(d)) { scan.unbounded = true; continue; }
        scan.feed(t * d / val);
    }
    if (!std::isfinite(scan.lo))
        throw std::runtime_error("growth_indices: function vanished on every sample");
    return round_indices(scan, ratio_cap);
}

std::pair<double, double> xi_bounds(const GrowthIndices& idx, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("xi_bounds: t must be >= 0");
    if (t == 0.0) return {0.0, 0.0};
    double ti = std::pow(t, idx.i), ts = std::pow(t, idx.s);
    return {std::min(ti, ts), std::max(ti, ts)};
}

DoublingReport check_delta2_nabla2(const GFunction& g, const SamplePlan& plan) {
    if (std::log10(plan.radius_max / plan.radius_min) < 6.0 - 1e-9)
        throw std::invalid_argument("check_delta2_nabla2: plan must span >= 6 decades");
    auto radii = plan.radii();
    auto dirs = sample_directions(g.dim(), plan);

    DoublingReport rep;
    rep.k1 = std::numeric_limits<double>::infinity();
    rep.k2 = 0.0;
    bool unbounded = false;

    // per-radius extreme ratios, for the decade trend
    std::vector<double> radius_max_ratio(radii.size(), 0.0);
    std::vector<double> v(static_cast<size_t>(g.dim())), v2(static_cast<size_t>(g.dim()));

    for (const auto& d : dirs) {
        for (size_t ri = 0; ri < radii.size(); ++ri) {
            double r = radii[ri];
            for (int i = 0; i < g.dim(); ++i) {
                v[static_cast<size_t>(i)] = r * d[static_cast<size_t>(i)];
                v2[static_cast<size_t>(i)] = 2.0 * v[static_cast<size_t>(i)];
            }
            double f1 = g.value(v), f2 = g.value(v2);
            if (!(f1 > 0.0) || !std::isfinite(f1)) {
                if (!std::isfinite(f1)) unbounded = true;
                continue;
            }
            if (!std::isfinite(f2)) { // doubled argument overflowed: ratio unbounded
                unbounded = true;
                radius_max_ratio[ri] = std::numeric_limits<double>::infinity();
                continue;
            }
            double ratio = f2 / f1;
            radius_max_ratio[ri] = std::max(radius_max_ratio[ri], ratio);
            if (ratio < rep.k1) { rep.k1 = ratio; rep.argmin.assign(v.begin(), v.end()); }
            if (ratio > rep.k2) { rep.k2 = ratio; rep.argmax.assign(v.begin(), v.end()); }
        }
    }
    if (!(rep.k2 > 0.0))
        throw std::runtime_error("check_delta2_nabla2: function vanished on every sample");

    // decade-over-decade growth of the max ratio across the top of the range
    int per_decade = std::max(1, plan.radii_per_decade);
    auto decade_max = [&](int back) {
        size_t hi = radius_max_ratio.size() - static_cast<size_t>(back) * per_decade;
        size_t lo = hi > static_cast<size_t>(per_decade) ? hi - per_decade : 0;
        double m = 0.0;
        for (size_t i = lo; i < hi; ++i) m = std::max(m, radius_max_ratio[i]);
        return m;
    };
    double top = decade_max(0), mid = decade_max(1), low = decade_max(2);
    bool trending = std::isfinite(mid) && std::isfinite(low) && low > 0.0 && mid > 0.0 &&
                    (!std::isfinite(top) || (top / mid > 1.25 && mid / low > 1.25));

    if (unbounded || trending) {
        rep.delta2 = Verdict::Fail;
        rep.note = unbounded ? "ratio overflow at large radii" : "ratio grows across sampled decades";
        rep.k2 = std::numeric_limits<double>::infinity();
        rep.argmax.clear();
    } else if (std::isfinite(top) && mid > 0.0 && low > 0.0 && top / mid <= 1.01 && mid / low <= 1.01) {
        rep.delta2 = Verdict::Pass;
    } else {
        rep.delta2 = Verdict::Inconclusive;
        rep.note = "mild ratio drift across sampled decades";
    }

    rep.nabla2 = rep.k1 > 1.0 + 1e-6 ? Verdict::Pass : Verdict::Fail;
    return rep;
}

} // namespace anisompa

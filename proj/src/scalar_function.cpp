#include "anisompa/scalar_function.hpp"

#include "anisompa/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace anisompa {

ScalarFunction ScalarFunction::power(double exponent, double scale) {
    if (!std::isfinite(exponent) || exponent <= 0.0)
        throw std::invalid_argument("ScalarFunction::power: exponent must be positive");
    if (!std::isfinite(scale) || scale <= 0.0)
        throw std::invalid_argument("ScalarFunction::power: scale must be positive");
    ScalarFunction f;
    f.kind_ = Kind::Power;
    f.exp_ = exponent;
    f.scale_ = scale;
    return f;
}

ScalarFunction ScalarFunction::table(std::vector<double> abscissae, std::vector<double> values,
                                     std::optional<double> lower_exponent,
                                     std::optional<double> upper_exponent, Interp interp) {
    if (abscissae.size() != values.size() || abscissae.size() < 2)
        throw std::invalid_argument("ScalarFunction::table: need >= 2 matching nodes");
    for (size_t i = 0; i < abscissae.size(); ++i) {
        if (!std::isfinite(abscissae[i]) || !std::isfinite(values[i]))
            throw std::invalid_argument("ScalarFunction::table: non-finite node");
        if (abscissae[i] < 0.0 || values[i] < 0.0)
            throw std::invalid_argument("ScalarFunction::table: negative node");
        if (i > 0 && !(abscissae[i] > abscissae[i - 1]))
            throw std::invalid_argument("ScalarFunction::table: abscissae must increase strictly");
        if (i > 0 && values[i] < values[i - 1])
            throw std::invalid_argument("ScalarFunction::table: values must be nondecreasing");
    }
    if (interp == Interp::LogLog) {
        for (size_t i = 0; i < abscissae.size(); ++i)
            if (!(abscissae[i] > 0.0) || !(values[i] > 0.0))
                throw std::invalid_argument("ScalarFunction::table: log-log tables need positive nodes");
    }
    ScalarFunction f;
    f.kind_ = Kind::Table;
    f.interp_ = interp;
    f.ts_ = std::move(abscissae);
    f.vs_ = std::move(values);
    f.lower_exp_ = lower_exponent;
    f.upper_exp_ = upper_exponent;
    return f;
}

double ScalarFunction::exponent() const {
    if (kind_ != Kind::Power) throw std::logic_error("ScalarFunction: exponent() on table");
    return exp_;
}

double ScalarFunction::scale() const {
    if (kind_ != Kind::Power) throw std::logic_error("ScalarFunction: scale() on table");
    return scale_;
}

size_t ScalarFunction::segment_of(double t) const {
    auto it = std::upper_bound(ts_.begin(), ts_.end(), t);
    if (it == ts_.begin()) return 0;
    return static_cast<size_t>(it - ts_.begin()) - 1;
}

double ScalarFunction::table_value(double t) const {
    if (interp_ == Interp::Step) {
        auto it = std::upper_bound(ts_.begin(), ts_.end(), t);
        if (it == ts_.begin()) return 0.0; // below the first node
        return vs_[static_cast<size_t>(it - ts_.begin()) - 1];
    }
    if (t <= ts_.front()) {
        if (t == ts_.front()) return vs_.front();
        if (!lower_exp_) throw std::runtime_error("ScalarFunction: t below table range, no lower exponent");
        if (t == 0.0) return 0.0;
        return vs_.front() * std::pow(t / ts_.front(), *lower_exp_);
    }
    if (t >= ts_.back()) {
        if (t == ts_.back()) return vs_.back();
        if (!upper_exp_) throw std::runtime_error("ScalarFunction: t above table range, no upper exponent");
        return vs_.back() * std::pow(t / ts_.back(), *upper_exp_);
    }
    size_t i = segment_of(t);
    double t0 = ts_[i], t1 = ts_[i + 1], v0 = vs_[i], v1 = vs_[i + 1];
    if (v0 == v1) return v0;
    double w = (std::log(t) - std::log(t0)) / (std::log(t1) - std::log(t0));
    return std::exp(std::log(v0) + w * (std::log(v1) - std::log(v0)));
}

double ScalarFunction::value(double t) const {
    if (!std::isfinite(t)) throw std::invalid_argument("ScalarFunction::value: non-finite input");
    if (t < 0.0) throw std::invalid_argument("ScalarFunction::value: negative input");
    if (kind_ == Kind::Power) return t == 0.0 ? 0.0 : scale_ * std::pow(t, exp_);
    return table_value(t);
}

double ScalarFunction::derivative(double t) const {
    if (!std::isfinite(t) || t < 0.0) throw std::invalid_argument("ScalarFunction::derivative: bad input");
    if (kind_ == Kind::Power) {
        if (t == 0.0) return exp_ > 1.0 ? 0.0 : (exp_ == 1.0 ? scale_ : std::numeric_limits<double>::infinity());
        return scale_ * exp_ * std::pow(t, exp_ - 1.0);
    }
    if (interp_ == Interp::Step) return 0.0; // flat a.e.; jumps carry the growth
    double q;
    if (t < ts_.front()) {
        if (!lower_exp_) throw std::runtime_error("ScalarFunction: derivative below table range");
        q = *lower_exp_;
        if (t == 0.0) return q > 1.0 ? 0.0 : (q == 1.0 ? table_value(ts_.front()) / ts_.front() : std::numeric_limits<double>::infinity());
    } else if (t >= ts_.back()) {
        if (!upper_exp_) throw std::runtime_error("ScalarFunction: derivative above table range");
        q = *upper_exp_;
    } else {
        size_t i = segment_of(t);
        double t0 = ts_[i], t1 = ts_[i + 1], v0 = vs_[i], v1 = vs_[i + 1];
        if (v0 == v1) return 0.0;
        q = (std::log(v1) - std::log(v0)) / (std::log(t1) - std::log(t0));
    }
    return q * table_value(t) / t;
}

double ScalarFunction::inverse(double y) const {
    if (!std::isfinite(y)) throw std::invalid_argument("ScalarFunction::inverse: non-finite input");
    if (y <= 0.0) return 0.0;
    if (kind_ == Kind::Power) return std::pow(y / scale_, 1.0 / exp_);

    if (interp_ == Interp::Step) {
        // least node whose value reaches y
        auto it = std::lower_bound(vs_.begin(), vs_.end(), y);
        if (it == vs_.end()) throw std::runtime_error("ScalarFunction::inverse: y above step table range");
        return ts_[static_cast<size_t>(it - vs_.begin())];
    }

    if (y <= vs_.front()) {
        if (y == vs_.front()) return ts_.front();
        if (!lower_exp_ || *lower_exp_ <= 0.0)
            throw std::runtime_error("ScalarFunction::inverse: y below table range, no usable lower exponent");
        return ts_.front() * std::pow(y / vs_.front(), 1.0 / *lower_exp_);
    }
    if (y > vs_.back()) {
        if (!upper_exp_ || *upper_exp_ <= 0.0)
            throw std::runtime_error("ScalarFunction::inverse: y above table range, no usable upper exponent");
        return ts_.back() * std::pow(y / vs_.back(), 1.0 / *upper_exp_);
    }
    // leftmost segment whose right value reaches y; lower_bound lands on the
    // first node attaining y, which is the least t for flat stretches
    auto it = std::lower_bound(vs_.begin(), vs_.end(), y);
    size_t j = static_cast<size_t>(it - vs_.begin());
    if (vs_[j] == y) return ts_[j];
    size_t i = j - 1;
    double t0 = ts_[i], t1 = ts_[i + 1], v0 = vs_[i], v1 = vs_[i + 1];
    if (v0 == v1) return t0;
    double w = (std::log(y) - std::log(v0)) / (std::log(v1) - std::log(v0));
    return std::exp(std::log(t0) + w * (std::log(t1) - std::log(t0)));
}

double ScalarFunction::growth_exponent_at_zero() const {
    if (kind_ == Kind::Power) return exp_;
    if (lower_exp_) return *lower_exp_;
    return fit_end_slope(ts_, vs_, /*lower=*/true);
}

double ScalarFunction::growth_exponent_at_infinity() const {
    if (kind_ == Kind::Power) return exp_;
    if (upper_exp_) return *upper_exp_;
    return fit_end_slope(ts_, vs_, /*lower=*/false);
}

ScalarFunction tabulate_loglog(const std::function<double(double)>& fn,
                               double lo, double hi, int count) {
    auto ts = log_grid(lo, hi, count);
    std::vector<double> vs(ts.size());
    for (size_t i = 0; i < ts.size(); ++i) {
        vs[i] = fn(ts[i]);
        if (!std::isfinite(vs[i]) || vs[i] <= 0.0)
            throw std::runtime_error("tabulate_loglog: sampled function not positive finite");
    }
    for (size_t i = 1; i < vs.size(); ++i)
        if (vs[i] < vs[i - 1])
            throw std::runtime_error("tabulate_loglog: sampled function not nondecreasing");
    double qlo = fit_end_slope(ts, vs, true);
    double qup = fit_end_slope(ts, vs, false);
    return ScalarFunction::table(std::move(ts), std::move(vs), qlo, qup);
}

double left_cont_inverse(const ScalarFunction& f, double y) { return f.inverse(y); }

namespace {

// sup_t { s t - M(t) } by coarse log-grid scan plus golden-section refinement.
double legendre_sup(const ScalarFunction& m, double s, double tlo, double thi) {
    auto objective = [&](double t) { return s * t - m.value(t); };
    const int coarse = 320;
    double best = 0.0, best_t = 0.0; // t = 0 always yields 0
    double llo = std::log(tlo), lhi = std::log(thi);
    for (int i = 0; i <= coarse; ++i) {
        double t = std::exp(llo + (lhi - llo) * i / coarse);
        double o = objective(t);
        if (o > best) { best = o; best_t = t; }
    }
    if (best_t == 0.0) return 0.0;
    double a = best_t * std::exp(-(lhi - llo) / coarse);
    double b = best_t * std::exp((lhi - llo) / coarse);
    const double phi = 0.6180339887498949;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = objective(x1), f2 = objective(x2);
    for (int it = 0; it < 80; ++it) {
        if (f1 < f2) { a = x1; x1 = x2; f1 = f2; x2 = a + phi * (b - a); f2 = objective(x2); }
        else         { b = x2; x2 = x1; f2 = f1; x1 = b - phi * (b - a); f1 = objective(x1); }
    }
    return std::max(best, std::max(f1, f2));
}

} // namespace

ScalarFunction conjugate_scalar(const ScalarFunction& m) {
    if (m.is_power()) {
        double q = m.exponent(), kappa = m.scale();
        if (q <= 1.0 + 1e-9)
            throw std::runtime_error("conjugate_scalar: sublinear growth, conjugate degenerate");
        double qc = q / (q - 1.0);
        double scale = (q - 1.0) / q * std::pow(kappa * q, -1.0 / (q - 1.0));
        return ScalarFunction::power(qc, scale);
    }
    double qup = m.growth_exponent_at_infinity();
    if (qup <= 1.0 + 1e-9)
        throw std::runtime_error("conjugate_scalar: sublinear growth, conjugate degenerate");

    const auto& ts = m.abscissae();
    double tlo = ts.front() / 10.0, thi = ts.back() * 10.0;
    double slo = m.derivative(ts.front());
    double shi = m.derivative(ts.back());
    if (!(slo > 0.0)) slo = m.value(ts.front()) / ts.front();
    if (!(shi > slo)) shi = slo * 1e6;
    auto sgrid = log_grid(slo, shi, 200);
    std::vector<double> vals(sgrid.size());
    for (size_t i = 0; i < sgrid.size(); ++i) {
        double v = legendre_sup(m, sgrid[i], tlo, thi);
        if (!(v > 0.0)) v = i > 0 ? vals[i - 1] : 1e-300;
        vals[i] = v;
    }
    for (size_t i = 1; i < vals.size(); ++i) vals[i] = std::max(vals[i], vals[i - 1]);
    // strictly positive and nondecreasing now; fit end exponents from the data
    double ql = fit_end_slope(sgrid, vals, true);
    double qu = fit_end_slope(sgrid, vals, false);
    return ScalarFunction::table(std::move(sgrid), std::move(vals), ql, qu);
}

} // namespace anisompa

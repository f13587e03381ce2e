#include "anisompa/conjugation.hpp"

#include "anisompa/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace anisompa {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// log of f(t) computed without leaving log space, so astronomically large
// radii stay comparable. LogLog tables extrapolate linearly in log-log.
double log_scalar_value(const ScalarFunction& f, double log_t) {
    if (f.is_power()) return std::log(f.scale()) + f.exponent() * log_t;
    const auto& ts = f.abscissae();
    const auto& vs = f.values();
    if (f.interp() == ScalarFunction::Interp::Step) {
        double v = f.value(std::exp(log_t));
        return v > 0.0 ? std::log(v) : -kInf;
    }
    double l0 = std::log(ts.front()), l1 = std::log(ts.back());
    if (log_t < l0) {
        auto q = f.lower_exponent();
        if (!q) throw std::runtime_error("log_scalar_value: below table range");
        return std::log(vs.front()) + *q * (log_t - l0);
    }
    if (log_t > l1) {
        auto q = f.upper_exponent();
        if (!q) throw std::runtime_error("log_scalar_value: above table range");
        return std::log(vs.back()) + *q * (log_t - l1);
    }
    double v = f.value(std::exp(log_t));
    return v > 0.0 ? std::log(v) : -kInf;
}

} // namespace

IntegrabilityReport check_integrability(const ScalarFunction& phi_circ, int n) {
    if (n < 2) throw std::invalid_argument("check_integrability: n >= 2");
    IntegrabilityReport rep;
    rep.exponent_at_zero = phi_circ.growth_exponent_at_zero();
    rep.exponent_at_infinity = phi_circ.growth_exponent_at_infinity();
    rep.phi0 = rep.exponent_at_zero < n - 1e-9 ? Verdict::Pass : Verdict::Fail;
    rep.phi1 = rep.exponent_at_infinity <= n + 1e-9 ? Verdict::Pass : Verdict::Fail;
    if (rep.phi0 == Verdict::Pass) {
        HTransform h(phi_circ, n);
        rep.origin_integral = h.cumulative(1.0);
    } else {
        rep.origin_integral = kInf;
    }
    return rep;
}

HTransform::HTransform(const ScalarFunction& phi_circ, int n) : n_(n) {
    if (n < 2) throw std::invalid_argument("HTransform: n >= 2");
    double nm1 = static_cast<double>(n) - 1.0;

    std::vector<double> ts, vs;
    double q_lo, q_up;
    if (phi_circ.is_power()) {
        // single global power piece; synthesize a two-knot table
        ts = {1.0, 10.0};
        vs = {phi_circ.value(1.0), phi_circ.value(10.0)};
        q_lo = q_up = phi_circ.exponent();
    } else {
        if (phi_circ.interp() == ScalarFunction::Interp::Step)
            throw std::invalid_argument("HTransform: step tables are not integrable profiles");
        ts = phi_circ.abscissae();
        vs = phi_circ.values();
        q_lo = phi_circ.growth_exponent_at_zero();
        q_up = phi_circ.growth_exponent_at_infinity();
    }
    head_exponent_ = q_lo;
    if (q_lo >= n - 1e-12)
        throw std::runtime_error("HTransform: origin integral diverges (growth exponent at zero >= n)");

    size_t m = ts.size();
    knots_ = ts;
    coef_.resize(m);  // per segment i: [knots_[i], knots_[i+1]); last entry = tail piece
    beta_.resize(m);
    prefix_.assign(m, 0.0);

    // head piece on (0, t_0]: interpolant v0 (t/t0)^{q_lo}
    double beta_head = (1.0 - q_lo) / nm1;
    double coef_head = std::pow(std::pow(ts[0], q_lo) / vs[0], 1.0 / nm1);
    prefix_[0] = coef_head * std::pow(ts[0], beta_head + 1.0) / (beta_head + 1.0);

    for (size_t i = 0; i + 1 < m; ++i) {
        double q = (std::log(vs[i + 1]) - std::log(vs[i])) / (std::log(ts[i + 1]) - std::log(ts[i]));
        beta_[i] = (1.0 - q) / nm1;
        coef_[i] = std::pow(std::pow(ts[i], q) / vs[i], 1.0 / nm1);
        double seg;
        if (std::abs(beta_[i] + 1.0) < 1e-12)
            seg = coef_[i] * std::log(ts[i + 1] / ts[i]);
        else
            seg = coef_[i] * (std::pow(ts[i + 1], beta_[i] + 1.0) - std::pow(ts[i], beta_[i] + 1.0)) /
                  (beta_[i] + 1.0);
        prefix_[i + 1] = prefix_[i] + seg;
    }
    // tail piece beyond the last knot, from the upper extrapolation exponent
    beta_[m - 1] = (1.0 - q_up) / nm1;
    coef_[m - 1] = std::pow(std::pow(ts[m - 1], q_up) / vs[m - 1], 1.0 / nm1);
}

double HTransform::cumulative(double s) const {
    if (!(s >= 0.0)) throw std::invalid_argument("HTransform: s must be >= 0");
    if (s == 0.0) return 0.0;
    double nm1 = static_cast<double>(n_) - 1.0;
    if (s <= knots_.front()) {
        double beta_head = (1.0 - head_exponent_) / nm1;
        return prefix_.front() * std::pow(s / knots_.front(), beta_head + 1.0);
    }
    auto it = std::upper_bound(knots_.begin(), knots_.end(), s);
    size_t i = static_cast<size_t>(it - knots_.begin()) - 1;
    double base = prefix_[i];
    double seg;
    if (std::abs(beta_[i] + 1.0) < 1e-12)
        seg = coef_[i] * std::log(s / knots_[i]);
    else
        seg = coef_[i] * (std::pow(s, beta_[i] + 1.0) - std::pow(knots_[i], beta_[i] + 1.0)) /
              (beta_[i] + 1.0);
    return base + seg;
}

double HTransform::operator()(double s) const {
    double c = cumulative(s);
    return std::pow(c, (static_cast<double>(n_) - 1.0) / static_cast<double>(n_));
}

double HTransform::inverse(double r) const {
    if (!(r >= 0.0) || !std::isfinite(r)) throw std::invalid_argument("HTransform::inverse: bad input");
    if (r == 0.0) return 0.0;
    double lo = knots_.front() * 1e-12, hi = knots_.back() * 1e6;
    int guard = 0;
    while ((*this)(lo) > r) {
        lo *= 1e-6;
        if (lo < 1e-290 || ++guard > 100)
            throw std::runtime_error("HTransform::inverse: target below range");
    }
    guard = 0;
    while ((*this)(hi) < r) {
        hi *= 1e6;
        if (!std::isfinite(hi) || ++guard > 100)
            throw std::runtime_error("HTransform::inverse: target above range (H bounded?)");
    }
    double llo = std::log(lo), lhi = std::log(hi);
    for (int it = 0; it < 200 && lhi - llo > 1e-12; ++it) {
        double mid = 0.5 * (llo + lhi);
        ((*this)(std::exp(mid)) < r ? llo : lhi) = mid;
    }
    return std::exp(0.5 * (llo + lhi));
}

double compute_H(const ScalarFunction& phi_circ, int n, double s) {
    return HTransform(phi_circ, n)(s);
}

ScalarFunction compute_phi_n(const ScalarFunction& phi_circ, int n, const PhiNGrid& grid) {
    auto integ = check_integrability(phi_circ, n);
    if (integ.phi0 != Verdict::Pass)
        throw std::runtime_error("compute_phi_n: origin integrability fails, conjugate undefined");
    if (integ.phi1 != Verdict::Pass)
        throw std::runtime_error("compute_phi_n: growth at infinity too fast, conjugate degenerate");
    HTransform h(phi_circ, n);
    auto rs = log_grid(grid.r_min, grid.r_max, grid.count);
    std::vector<double> vals(rs.size());
    for (size_t i = 0; i < rs.size(); ++i)
        vals[i] = phi_circ.value(h.inverse(rs[i]));
    for (size_t i = 1; i < vals.size(); ++i) vals[i] = std::max(vals[i], vals[i - 1]);
    double qlo = fit_end_slope(rs, vals, true);
    double qup = fit_end_slope(rs, vals, false);
    return ScalarFunction::table(std::move(rs), std::move(vals), qlo, qup);
}

namespace {

struct LogSamples {
    std::vector<double> log_r;                // shared radii
    std::vector<std::vector<double>> log_a;   // per direction
    std::vector<std::vector<double>> dirs;    // unit vectors (empty for scalar)
};

double logsumexp_power_sum(const GFunction& g, const std::vector<double>& dir, double log_r) {
    const auto& p = g.exponents();
    const auto& a = g.coefficients();
    double best = -kInf;
    std::vector<double> terms;
    terms.reserve(p.size());
    for (size_t i = 0; i < p.size(); ++i) {
        double ad = std::abs(dir[i]);
        if (ad == 0.0) continue;
        double t = std::log(a[i]) + p[i] * (log_r + std::log(ad));
        terms.push_back(t);
        best = std::max(best, t);
    }
    if (terms.empty()) return -kInf;
    double s = 0.0;
    for (double t : terms) s += std::exp(t - best);
    return best + std::log(s);
}

double log_gfunction_value(const GFunction& g, const std::vector<double>& dir, double log_r) {
    if (g.is_power_sum()) return logsumexp_power_sum(g, dir, log_r);
    if (log_r > 690.0) throw std::runtime_error("check_dominates: callable kind beyond double range");
    std::vector<double> v(dir.size());
    double r = std::exp(log_r);
    for (size_t i = 0; i < dir.size(); ++i) v[i] = r * dir[i];
    double val = g.value(v);
    if (val == 0.0) return -kInf;
    return std::log(val); // +inf propagates as an unbounded sample
}

double fit_slope_top_decade(const std::vector<double>& log_r, const std::vector<double>& log_v) {
    double cutoff = log_r.back() - std::log(10.0);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (size_t i = 0; i < log_r.size(); ++i) {
        if (log_r[i] < cutoff || !std::isfinite(log_v[i])) continue;
        sx += log_r[i]; sy += log_v[i]; sxx += log_r[i] * log_r[i]; sxy += log_r[i] * log_v[i];
        ++cnt;
    }
    if (cnt < 2) return kInf; // unbounded samples at the top: treat as runaway growth
    double denom = cnt * sxx - sx * sx;
    return (cnt * sxy - sx * sy) / denom;
}

using LogB = std::function<double(double)>; // log B at given log t

DominationVerdict decide_domination(const LogSamples& samples, const LogB& log_b,
                                    double slope_b) {
    DominationVerdict out;
    out.slope_b = slope_b;

    size_t best_dir = 0;
    double max_slope = -kInf;
    for (size_t d = 0; d < samples.log_a.size(); ++d) {
        double s = fit_slope_top_decade(samples.log_r, samples.log_a[d]);
        if (s > max_slope) { max_slope = s; best_dir = d; }
    }
    out.slope_a = max_slope;

    constexpr double slope_margin = 0.02;
    if (max_slope > slope_b + slope_margin) {
        // growth-rate win for A. First-guess witness radius from the fitted
        // slopes, far enough out to clear B(1024 r); the caller verifies it
        // against the actual evaluators and steps outward if needed.
        out.relation = DominationVerdict::Relation::Fails;
        double log_cmax = std::log(1024.0);
        double log_r = samples.log_r.back();
        const auto& la = samples.log_a[best_dir];
        double gap = la.back() == kInf ? 1.0 : la.back() - log_b(log_cmax + log_r);
        if (std::isfinite(max_slope) && std::isfinite(gap) && gap <= 0.0) {
            double growth = max_slope - slope_b;
            log_r += (-gap + 10.0) / growth;
        }
        out.threshold_radius = std::exp(std::min(log_r, std::log(1e60)));
        return out;
    }

    // pointwise search: smallest C (then smallest onset radius) with
    // log A(r d) <= log B(C r) + slack for every sample beyond the onset
    const auto& lr = samples.log_r;
    std::vector<double> cgrid;
    for (int e = -4; e <= 10; ++e) cgrid.push_back(std::pow(2.0, e));
    double r_cap = lr.back() - std::log(10.0); // onset must leave a decade of evidence
    for (double c : cgrid) {
        double log_c = std::log(c);
        for (size_t onset = 0; onset < lr.size() && lr[onset] <= r_cap; ++onset) {
            bool holds = true;
            for (size_t ri = onset; ri < lr.size() && holds; ++ri) {
                double lb = log_b(log_c + lr[ri]);
                double slack = 1e-9 * (1.0 + std::abs(lb));
                for (const auto& la : samples.log_a) {
                    if (la[ri] > lb + slack) { holds = false; break; }
                }
            }
            if (holds) {
                out.relation = DominationVerdict::Relation::Dominates;
                out.constant = c;
                out.threshold_radius = std::exp(lr[onset]);
                return out;
            }
        }
    }
    out.relation = DominationVerdict::Relation::Inconclusive;
    return out;
}

} // namespace

DominationVerdict check_dominates(const GFunction& a, const ScalarFunction& b,
                                  const SamplePlan& plan) {
    auto radii = plan.radii();
    auto dirs = sample_directions(a.dim(), plan);
    LogSamples samples;
    samples.log_r.reserve(radii.size());
    for (double r : radii) samples.log_r.push_back(std::log(r));
    samples.dirs = dirs;
    samples.log_a.resize(dirs.size());
    for (size_t d = 0; d < dirs.size(); ++d) {
        samples.log_a[d].resize(radii.size());
        for (size_t ri = 0; ri < radii.size(); ++ri)
            samples.log_a[d][ri] = log_gfunction_value(a, dirs[d], samples.log_r[ri]);
    }
    LogB log_b = [&](double lt) { return log_scalar_value(b, lt); };
    double slope_b = b.is_power() ? b.exponent() : b.growth_exponent_at_infinity();
    auto out = decide_domination(samples, log_b, slope_b);
    if (out.relation == DominationVerdict::Relation::Fails) {
        // materialize the witness point along the steepest direction
        size_t best = 0;
        double ms = -kInf;
        for (size_t d = 0; d < samples.log_a.size(); ++d) {
            double s = fit_slope_top_decade(samples.log_r, samples.log_a[d]);
            if (s > ms) { ms = s; best = d; }
        }
        double log_rw = std::log(out.threshold_radius);
        double log_cmax = std::log(1024.0);
        for (int tries = 0; tries < 12; ++tries) {
            double la = log_gfunction_value(a, dirs[best], log_rw);
            double lb = log_b(log_cmax + log_rw);
            if (la > lb) break;
            log_rw += std::log(10.0);
        }
        out.threshold_radius = std::exp(std::min(log_rw, 690.0));
        std::vector<double> w(dirs[best].size());
        for (size_t i = 0; i < w.size(); ++i) w[i] = out.threshold_radius * dirs[best][i];
        out.witness = std::move(w);
    }
    return out;
}

DominationVerdict check_dominates(const ScalarFunction& a, const ScalarFunction& b,
                                  const SamplePlan& plan) {
    auto radii = plan.radii();
    LogSamples samples;
    for (double r : radii) samples.log_r.push_back(std::log(r));
    samples.log_a.resize(1);
    samples.log_a[0].resize(radii.size());
    for (size_t ri = 0; ri < radii.size(); ++ri)
        samples.log_a[0][ri] = log_scalar_value(a, samples.log_r[ri]);
    LogB log_b = [&](double lt) { return log_scalar_value(b, lt); };
    double slope_b = b.is_power() ? b.exponent() : b.growth_exponent_at_infinity();
    auto out = decide_domination(samples, log_b, slope_b);
    if (out.relation == DominationVerdict::Relation::Fails) {
        double log_rw = std::log(out.threshold_radius);
        double log_cmax = std::log(1024.0);
        for (int tries = 0; tries < 12; ++tries) {
            if (log_scalar_value(a, log_rw) > log_b(log_cmax + log_rw)) break;
            log_rw += std::log(10.0);
        }
        out.threshold_radius = std::exp(std::min(log_rw, 690.0));
        out.witness = std::vector<double>{out.threshold_radius};
    }
    return out;
}

bool equivalent(const ScalarFunction& a, const ScalarFunction& b, const SamplePlan& plan) {
    auto ab = check_dominates(a, b, plan);
    auto ba = check_dominates(b, a, plan);
    return ab.relation == DominationVerdict::Relation::Dominates &&
           ba.relation == DominationVerdict::Relation::Dominates;
}

ConjugateExponents power_sum_conjugate_exponent(const std::vector<double>& p, int n) {
    if (static_cast<int>(p.size()) != n)
        throw std::invalid_argument("power_sum_conjugate_exponent: length(p) must equal n");
    if (n < 2) throw std::invalid_argument("power_sum_conjugate_exponent: n >= 2");
    for (double pi : p)
        if (!(pi > 1.0)) throw std::invalid_argument("power_sum_conjugate_exponent: exponents must exceed 1");

    ConjugateExponents out;
    bool exact = true;
    Rational sigma(0, 1);
    for (double pi : p) {
        auto r = rational_from_double(pi);
        if (!r) { exact = false; break; }
        sigma = sigma + reciprocal(*r);
    }
    double sigma_d = 0.0;
    for (double pi : p) sigma_d += 1.0 / pi;

    if (exact) {
        Rational nn(n, 1);
        Rational pbar = nn / sigma;
        out.p_bar_exact = pbar;
        out.p_bar = pbar.to_double();
        Rational excess = sigma - Rational(1, 1);
        if (excess.num > 0) {
            Rational pstar = nn / excess;
            out.p_bar_star_exact = pstar;
            out.p_bar_star = pstar.to_double();
        } else {
            out.conjugate_infinite = true;
        }
    } else {
        out.p_bar = n / sigma_d;
        if (sigma_d > 1.0 + 1e-12)
            out.p_bar_star = n / (sigma_d - 1.0);
        else
            out.conjugate_infinite = true;
    }
    return out;
}

} // namespace anisompa

#include "anisompa/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace anisompa {

std::vector<double> log_grid(double lo, double hi, int count) {
    if (!(lo > 0.0) || !(hi > lo)) throw std::invalid_argument("log_grid: need 0 < lo < hi");
    if (count < 2) throw std::invalid_argument("log_grid: need count >= 2");
    std::vector<double> g(count);
    double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < count; ++i)
        g[i] = std::exp(llo + (lhi - llo) * i / (count - 1));
    g.front() = lo;
    g.back() = hi;
    return g;
}

double fit_loglog_slope(std::span<const double> ts, std::span<const double> vs) {
    if (ts.size() != vs.size() || ts.size() < 2)
        throw std::invalid_argument("fit_loglog_slope: need matching spans, size >= 2");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    auto n = static_cast<double>(ts.size());
    for (size_t i = 0; i < ts.size(); ++i) {
        if (!(ts[i] > 0.0) || !(vs[i] > 0.0))
            throw std::invalid_argument("fit_loglog_slope: nonpositive data");
        double x = std::log(ts[i]), y = std::log(vs[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    double denom = n * sxx - sx * sx;
    if (denom <= 0.0) throw std::invalid_argument("fit_loglog_slope: degenerate abscissae");
    return (n * sxy - sx * sy) / denom;
}

double fit_end_slope(std::span<const double> ts, std::span<const double> vs,
                     bool lower, int max_points) {
    if (ts.size() != vs.size() || ts.size() < 2)
        throw std::invalid_argument("fit_end_slope: need matching spans, size >= 2");
    std::vector<double> t, v;
    if (lower) {
        double cutoff = ts.front() * 10.0;
        for (size_t i = 0; i < ts.size() && ts[i] <= cutoff; ++i) { t.push_back(ts[i]); v.push_back(vs[i]); }
    } else {
        double cutoff = ts.back() / 10.0;
        for (size_t i = 0; i < ts.size(); ++i)
            if (ts[i] >= cutoff) { t.push_back(ts[i]); v.push_back(vs[i]); }
    }
    if (t.size() < 2) { // table narrower than a decade: use the two end entries
        size_t k = ts.size();
        if (lower) { t = {ts[0], ts[1]}; v = {vs[0], vs[1]}; }
        else       { t = {ts[k - 2], ts[k - 1]}; v = {vs[k - 2], vs[k - 1]}; }
    }
    if (static_cast<int>(t.size()) > max_points) {
        // thin evenly, keeping both end entries of the selected window
        std::vector<double> tt, vv;
        double stride = static_cast<double>(t.size() - 1) / (max_points - 1);
        for (int j = 0; j < max_points; ++j) {
            auto idx = static_cast<size_t>(std::lround(j * stride));
            tt.push_back(t[idx]); vv.push_back(v[idx]);
        }
        t = std::move(tt); v = std::move(vv);
    }
    return fit_loglog_slope(t, v);
}

double round_down_step(double x, double step, double snap_rel) {
    double q = x / step;
    double r = std::round(q);
    double snap = snap_rel * std::max(1.0, std::abs(q));
    if (std::abs(q - r) <= snap) return r * step;
    return std::floor(q) * step;
}

double round_up_step(double x, double step, double snap_rel) {
    double q = x / step;
    double r = std::round(q);
    double snap = snap_rel * std::max(1.0, std::abs(q));
    if (std::abs(q - r) <= snap) return r * step;
    return std::ceil(q) * step;
}

} // namespace anisompa

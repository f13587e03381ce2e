#include "anisompa/rearrangement.hpp"

#include "anisompa/numerics.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace anisompa {

double unit_ball_volume(int n) {
    if (n < 1) throw std::invalid_argument("unit_ball_volume: n >= 1");
    return std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0 + 1.0);
}

namespace {

double dirichlet_volume(const GFunction& phi, double t) {
    const auto& p = phi.exponents();
    const auto& a = phi.coefficients();
    double sigma = 0.0;
    for (double pi : p) sigma += 1.0 / pi;
    double d = 1.0;
    for (size_t i = 0; i < p.size(); ++i)
        d *= 2.0 * std::tgamma(1.0 + 1.0 / p[i]) * std::pow(a[i], -1.0 / p[i]);
    d /= std::tgamma(1.0 + sigma);
    return d * std::pow(t, sigma);
}

// axis intercept b_i with Phi(b_i e_i) = t, by doubling plus bisection
double axis_intercept(const GFunction& phi, int axis, double t) {
    std::vector<double> v(static_cast<size_t>(phi.dim()), 0.0);
    auto val = [&](double b) {
        v[static_cast<size_t>(axis)] = b;
        return phi.value(v);
    };
    double hi = 1.0;
    int guard = 0;
    while (val(hi) < t) {
        hi *= 2.0;
        if (++guard > 2000) throw std::runtime_error("level_set_volume: axis intercept not bracketable");
    }
    double lo = 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
        double mid = 0.5 * (lo + hi);
        (val(mid) < t ? lo : hi) = mid;
    }
    return hi;
}

VolumeEstimate monte_carlo_volume(const GFunction& phi, double t, const VolumeModel& model) {
    int n = phi.dim();
    std::vector<double> box(static_cast<size_t>(n));
    double box_volume = 1.0;
    for (int i = 0; i < n; ++i) {
        box[static_cast<size_t>(i)] = axis_intercept(phi, i, t) * model.box_inflation;
        box_volume *= 2.0 * box[static_cast<size_t>(i)];
    }
    std::mt19937_64 rng(model.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<double> v(static_cast<size_t>(n));
    std::int64_t inside = 0;
    for (std::int64_t s = 0; s < model.samples; ++s) {
        for (int i = 0; i < n; ++i) v[static_cast<size_t>(i)] = box[static_cast<size_t>(i)] * unit(rng);
        if (phi.value(v) <= t) ++inside;
    }
    double frac = static_cast<double>(inside) / static_cast<double>(model.samples);
    VolumeEstimate est;
    est.volume = frac * box_volume;
    est.std_error = box_volume * std::sqrt(std::max(0.0, frac * (1.0 - frac)) /
                                           static_cast<double>(model.samples));
    return est;
}

} // namespace

VolumeEstimate level_set_volume(const GFunction& phi, double t, const VolumeModel& model) {
    if (!(t >= 0.0) || !std::isfinite(t))
        throw std::invalid_argument("level_set_volume: level t must be nonnegative finite");
    if (t == 0.0) return {0.0, 0.0}; // the sublevel set degenerates to the origin
    if (model.method == VolumeModel::Method::ExactDirichlet) {
        if (!phi.is_power_sum())
            throw std::invalid_argument("level_set_volume: exact method needs power-sum kind");
        return {dirichlet_volume(phi, t), 0.0};
    }
    if (model.samples < 1) throw std::invalid_argument("level_set_volume: samples >= 1");
    return monte_carlo_volume(phi, t, model);
}

ScalarFunction compute_phi_circ(const GFunction& phi, const PhiCircGrid& grid,
                                const VolumeModel& model) {
    if (grid.count < 8) throw std::invalid_argument("compute_phi_circ: grid too small");
    auto radii = log_grid(grid.r_min, grid.r_max, grid.count);
    double omega = unit_ball_volume(phi.dim());
    auto vol = [&](double t) { return level_set_volume(phi, t, model).volume; };

    std::vector<double> ts, vs;
    ts.reserve(radii.size());
    vs.reserve(radii.size());
    double prev = 0.0;
    for (double r : radii) {
        double target = omega * std::pow(r, phi.dim());
        double hi = prev > 0.0 ? prev : 1.0;
        int guard = 0;
        while (vol(hi) < target) {
            hi *= 4.0;
            if (!std::isfinite(hi) || ++guard > 600)
                throw std::runtime_error("compute_phi_circ: volume level not bracketable");
        }
        double lo = 0.0;
        for (int it = 0; it < 200 && hi - lo > 1e-8 * hi; ++it) {
            double mid = 0.5 * (lo + hi);
            (vol(mid) < target ? lo : hi) = mid;
        }
        // keep the table strictly increasing; drop entries the bisection noise
        // failed to separate
        if (hi > prev) {
            ts.push_back(r);
            vs.push_back(hi);
            prev = hi;
        }
    }
    if (ts.size() < 8) throw std::runtime_error("compute_phi_circ: too few distinct table entries");
    double qlo = fit_end_slope(ts, vs, true);
    double qup = fit_end_slope(ts, vs, false);
    return ScalarFunction::table(std::move(ts), std::move(vs), qlo, qup);
}

} // namespace anisompa

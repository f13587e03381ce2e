#include "anisompa/solver.hpp"

#include "anisompa/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace anisompa {

namespace {

// V is sampled raw on every node; the boundary clamp applies to u, not to V
Field sample_potential(const DomainSpec& d, const Potential& pot) {
    DomainSpec raw = d;
    raw.boundary = BoundaryRule::Periodic; // avoid clamping V itself
    Field v = Field::from_function(raw, pot.eval);
    Field out(d);
    std::copy(v.values().begin(), v.values().end(), out.values().begin());
    return out;
}

} // namespace

ProblemOperator::ProblemOperator(const ProblemSpec& spec)
    : spec_(&spec),
      v_(sample_potential(spec.domain, spec.potential)),
      n_conj_(conjugate_scalar(spec.n_func)) {
    spec.validate();
}

double ProblemOperator::energy(const Field& u) const {
    const auto& d = u.domain();
    if (!(d == spec_->domain)) throw std::invalid_argument("energy: domain mismatch");
    auto grad = gradient_field(u);
    double bulk = 0.0;
    for (std::int64_t j = 0; j < d.node_count(); ++j)
        bulk += spec_->phi.value(grad.at(j));
    double zero_order = 0.0;
    auto uv = u.values();
    auto vv = v_.values();
    for (size_t j = 0; j < uv.size(); ++j) {
        zero_order += vv[j] * spec_->n_func.value(std::abs(uv[j]));
        zero_order -= spec_->nonlinearity.antiderivative(uv[j]);
    }
    return (bulk + zero_order) * d.cell_measure();
}

Field ProblemOperator::gradient(const Field& u) const {
    const auto& d = u.domain();
    if (!(d == spec_->domain)) throw std::invalid_argument("gradient: domain mismatch");
    auto grad = gradient_field(u);
    VectorField flux(d);
    for (std::int64_t j = 0; j < d.node_count(); ++j)
        spec_->phi.gradient(grad.at(j), flux.at(j));
    Field g = divergence_adjoint(flux);
    auto uv = u.values();
    auto vv = v_.values();
    auto gv = g.values();
    for (size_t j = 0; j < uv.size(); ++j) {
        double au = std::abs(uv[j]);
        gv[j] += vv[j] * spec_->n_func.derivative(au) * sign_of(uv[j]);
        gv[j] -= spec_->nonlinearity.f(uv[j]);
    }
    g.apply_boundary();
    return g;
}

double ProblemOperator::derivative_dot(const Field& u, const Field& v) const {
    return dot_h(gradient(u), v);
}

double ProblemOperator::coercive_part(const Field& u) const {
    auto grad = gradient_field(u);
    double bulk = modular(spec_->phi, grad);
    double zero_order = 0.0;
    auto uv = u.values();
    auto vv = v_.values();
    for (size_t j = 0; j < uv.size(); ++j)
        zero_order += vv[j] * spec_->n_func.value(std::abs(uv[j]));
    return bulk + zero_order * u.domain().cell_measure();
}

double ProblemOperator::residual_dual_norm(const Field& u) const {
    return 2.0 * luxemburg_norm(n_conj_, gradient(u));
}

double energy(const ProblemSpec& spec, const Field& u) {
    return ProblemOperator(spec).energy(u);
}

Field energy_gradient(const ProblemSpec& spec, const Field& u) {
    return ProblemOperator(spec).gradient(u);
}

namespace {

Field valley_from_operator(const ProblemOperator& op, const Field& seed, int max_doublings) {
    if (seed.max_abs() == 0.0) throw std::invalid_argument("find_valley_point: zero seed");
    if (op.energy(seed) < 0.0) return seed;
    double t = 1.0;
    for (int k = 0; k < max_doublings; ++k) {
        t *= 2.0;
        Field cand = scale(t, seed);
        if (op.energy(cand) < 0.0) return cand;
    }
    throw std::runtime_error("find_valley_point: no valley within doubling budget; "
                             "superquadratic growth of the source term absent");
}

} // namespace

Field find_valley_point(const ProblemSpec& spec, const Field& seed, int max_doublings) {
    ProblemOperator op(spec);
    return valley_from_operator(op, seed, max_doublings);
}

std::string to_string(MPVerdict v) {
    switch (v) {
        case MPVerdict::Converged: return "converged";
        case MPVerdict::MaxIter: return "max_iter";
        default: return "degenerate_to_zero";
    }
}

namespace {

double path_metric(const ProblemSpec& spec, const Field& a, const Field& b) {
    Field diff = axpy(-1.0, b, a);
    return sobolev_norm(spec.phi, spec.n_func, diff).total;
}

struct PathState {
    std::vector<Field> z;
    std::vector<double> energy;
    std::vector<double> seg; // seg[k] = metric between z[k] and z[k+1]
};

// Piecewise-linear re-equidistribution by arc length, separately on the two
// blocks around the pinned index, so the current maximizer stays put.
void equidistribute_block(const ProblemSpec& spec, const ProblemOperator& op, PathState& ps,
                          size_t lo, size_t hi) {
    if (hi - lo < 2) return;
    std::vector<double> arc(hi - lo + 1, 0.0);
    for (size_t k = lo; k < hi; ++k) arc[k - lo + 1] = arc[k - lo] + ps.seg[k];
    double total = arc.back();
    if (!(total > 0.0)) return;
    std::vector<Field> fresh;
    fresh.reserve(hi - lo - 1);
    for (size_t j = 1; j < hi - lo; ++j) {
        double target = total * static_cast<double>(j) / static_cast<double>(hi - lo);
        size_t i = 0;
        while (i + 1 < arc.size() - 1 && arc[i + 1] < target) ++i;
        double span = arc[i + 1] - arc[i];
        double w = span > 0.0 ? (target - arc[i]) / span : 0.0;
        Field p = axpy(1.0 - w, ps.z[lo + i], scale(w, ps.z[lo + i + 1]));
        fresh.push_back(std::move(p));
    }
    for (size_t j = 1; j < hi - lo; ++j) {
        ps.z[lo + j] = std::move(fresh[j - 1]);
        ps.energy[lo + j] = op.energy(ps.z[lo + j]);
    }
    for (size_t k = lo; k < hi; ++k) ps.seg[k] = path_metric(spec, ps.z[k], ps.z[k + 1]);
}

// MINRES for a symmetric (possibly indefinite) operator in the h-weighted
// inner product, starting from zero. Stops when the residual estimate drops
// under rel_tol times the initial one.
Field minres_solve(const std::function<Field(const Field&)>& apply, const Field& b,
                   double rel_tol, int max_it) {
    Field x(b.domain());
    double beta1 = l2_norm_h(b);
    if (!(beta1 > 0.0)) return x;
    Field v_old(b.domain());
    Field v = scale(1.0 / beta1, b);
    Field w0(b.domain()), w1(b.domain());
    double beta = beta1;
    double eta = beta1;
    double gamma1 = 1.0, gamma0 = 1.0;
    double sigma1 = 0.0, sigma0 = 0.0;
    for (int k = 0; k < max_it; ++k) {
        Field av = apply(v);
        double alpha = dot_h(v, av);
        Field r3 = axpy(-alpha, v, axpy(-beta, v_old, av));
        double beta_next = l2_norm_h(r3);
        double delta = gamma1 * alpha - gamma0 * sigma1 * beta;
        double rho1 = std::sqrt(delta * delta + beta_next * beta_next);
        double rho2 = sigma1 * alpha + gamma0 * gamma1 * beta;
        double rho3 = sigma0 * beta;
        if (!(rho1 > 0.0) || !std::isfinite(rho1)) break;
        double gamma_next = delta / rho1;
        double sigma_next = beta_next / rho1;
        Field wn = scale(1.0 / rho1, axpy(-rho3, w0, axpy(-rho2, w1, v)));
        x = axpy(gamma_next * eta, wn, x);
        eta = -sigma_next * eta;
        if (std::abs(eta) <= rel_tol * beta1 || beta_next < 1e-300) break;
        v_old = std::move(v);
        v = scale(1.0 / beta_next, r3);
        beta = beta_next;
        w0 = std::move(w1);
        w1 = std::move(wn);
        gamma0 = gamma1;
        gamma1 = gamma_next;
        sigma0 = sigma1;
        sigma1 = sigma_next;
    }
    return x;
}

} // namespace

MPResult mountain_pass_solve(const ProblemSpec& spec, const MPOptions& opts) {
    if (opts.path_points < 5) throw std::invalid_argument("mountain_pass_solve: path_points >= 5");
    if (!(opts.descent_step > 0.0)) throw std::invalid_argument("mountain_pass_solve: descent_step > 0");
    if (!(opts.tol > 0.0)) throw std::invalid_argument("mountain_pass_solve: tol > 0");
    if (opts.max_iter < 1) throw std::invalid_argument("mountain_pass_solve: max_iter >= 1");

    ProblemOperator op(spec);
    const auto& d = spec.domain;
    std::vector<double> origin(static_cast<size_t>(d.n), 0.0);
    Field seed = gaussian_bump(d, origin, d.half_width / 5.0, 1.0);
    Field e = valley_from_operator(op, seed, 60);

    size_t pcount = static_cast<size_t>(opts.path_points);
    PathState ps;
    ps.z.reserve(pcount);
    for (size_t k = 0; k < pcount; ++k)
        ps.z.push_back(scale(static_cast<double>(k) / static_cast<double>(pcount - 1), e));
    ps.energy.resize(pcount);
    for (size_t k = 0; k < pcount; ++k) ps.energy[k] = op.energy(ps.z[k]);
    ps.seg.resize(pcount - 1);
    for (size_t k = 0; k + 1 < pcount; ++k) ps.seg[k] = path_metric(spec, ps.z[k], ps.z[k + 1]);

    MPResult out;
    int iter = 0;
    bool done = false;

    // Phase 1: deformation descent on the path. The maximizer cannot settle
    // closer to the critical point than the segment resolution allows, so the
    // loop hands over to a local polish once its residual stops improving.
    double best_res = std::numeric_limits<double>::infinity();
    int best_res_iter = 0;
    constexpr int stall_window = 100;
    bool polish = false;
    size_t kstar = 1;

    while (iter < opts.max_iter && !done && !polish) {
        ++iter;
        kstar = 1;
        for (size_t k = 2; k + 1 < pcount; ++k)
            if (ps.energy[k] > ps.energy[kstar]) kstar = k;

        Field g = op.gradient(ps.z[kstar]);
        double res = 2.0 * luxemburg_norm(op.n_conjugate(), g);
        out.history.push_back({iter, ps.energy[kstar], res});
        if (opts.snapshot_stride > 0 && (iter - 1) % opts.snapshot_stride == 0)
            out.snapshots.push_back(ps.z[kstar]);
        if (res < 0.995 * best_res) { best_res = res; best_res_iter = iter; }

        if (res <= opts.tol) {
            out.verdict = MPVerdict::Converged;
            out.u_star = ps.z[kstar];
            out.c_est = ps.energy[kstar];
            out.residual = res;
            done = true;
            break;
        }
        if (op.coercive_part(ps.z[kstar]) < 1e-10) {
            out.verdict = MPVerdict::DegenerateToZero;
            out.u_star = ps.z[kstar];
            out.c_est = ps.energy[kstar];
            out.residual = res;
            out.note = "path maximum collapsed to zero";
            done = true;
            break;
        }
        if (iter - best_res_iter >= stall_window || iter >= opts.max_iter / 2) {
            polish = true; // path resolution exhausted
            break;
        }

        double gnorm = l2_norm_h(g);
        if (!(gnorm > 0.0)) {
            polish = true;
            break;
        }
        Field dir = scale(1.0 / gnorm, g);

        double eta = opts.descent_step;
        bool accepted = false;
        Field cand;
        double cand_energy = 0.0;
        for (int bt = 0; bt < 60; ++bt) {
            cand = axpy(-eta, dir, ps.z[kstar]);
            cand_energy = op.energy(cand);
            if (cand_energy <= ps.energy[kstar] - 1e-12 * (1.0 + std::abs(ps.energy[kstar]))) {
                accepted = true;
                break;
            }
            eta *= 0.5;
        }
        if (!accepted) {
            polish = true; // the maximizer sits as deep as the path metric allows
            break;
        }
        ps.z[kstar] = std::move(cand);
        ps.energy[kstar] = cand_energy;
        ps.seg[kstar - 1] = path_metric(spec, ps.z[kstar - 1], ps.z[kstar]);
        ps.seg[kstar] = path_metric(spec, ps.z[kstar], ps.z[kstar + 1]);

        // Re-sample both blocks around the pinned maximizer every iteration.
        // Interpolated points landing on a ridge-crossing segment may raise
        // the interior maximum again: that is the honest pass level, and
        // skipping the re-sampling lets the path tunnel under the ridge.
        equidistribute_block(spec, op, ps, 0, kstar);
        equidistribute_block(spec, op, ps, kstar, pcount - 1);
    }

    // Phase 2: inexact Newton on grad J(u) = 0 from the top of the path.
    // Hessian action by central differences of the gradient, the indefinite
    // Newton system solved with MINRES, damping by Armijo on 1/2 |grad J|^2
    // (the inexact Newton direction is a descent direction for it).
    if (polish && iter < opts.max_iter) {
        kstar = 1;
        for (size_t k = 2; k + 1 < pcount; ++k)
            if (ps.energy[k] > ps.energy[kstar]) kstar = k;
        Field u = ps.z[kstar];
        Field g = op.gradient(u);
        Field best_u = u;
        double best_polish = std::numeric_limits<double>::infinity();

        auto hess_vec = [&](const Field& uu, const Field& vv) {
            double vmax = vv.max_abs();
            if (vmax == 0.0) return Field(uu.domain());
            double eps = 1e-6 * (1.0 + uu.max_abs()) / vmax;
            Field fp = op.gradient(axpy(eps, vv, uu));
            Field fm = op.gradient(axpy(-eps, vv, uu));
            return scale(1.0 / (2.0 * eps), axpy(-1.0, fm, fp));
        };

        while (iter < opts.max_iter && !done) {
            ++iter;
            double res = 2.0 * luxemburg_norm(op.n_conjugate(), g);
            double en = op.energy(u);
            out.history.push_back({iter, en, res});
            if (opts.snapshot_stride > 0 && (iter - 1) % opts.snapshot_stride == 0)
                out.snapshots.push_back(u);
            if (res < best_polish) { best_polish = res; best_u = u; }

            if (res <= opts.tol) {
                out.verdict = MPVerdict::Converged;
                out.u_star = u;
                out.c_est = en;
                out.residual = res;
                done = true;
                break;
            }
            if (op.coercive_part(u) < 1e-10) {
                out.verdict = MPVerdict::DegenerateToZero;
                out.u_star = u;
                out.c_est = en;
                out.residual = res;
                out.note = "residual descent collapsed to zero";
                done = true;
                break;
            }

            Field delta = minres_solve(
                [&](const Field& vv) { return hess_vec(u, vv); }, scale(-1.0, g),
                std::min(0.1, std::sqrt(res)), 300);

            double r0 = 0.5 * dot_h(g, g);
            double slope = dot_h(delta, hess_vec(u, g)); // delta . grad r
            if (!(slope < 0.0)) {
                delta = scale(-1.0, g); // fall back to steepest descent on r
                slope = -2.0 * r0;
            }
            double tau = 1.0;
            bool stepped = false;
            for (int bt = 0; bt < 40; ++bt) {
                Field cand = axpy(tau, delta, u);
                Field gc = op.gradient(cand);
                double rc = 0.5 * dot_h(gc, gc);
                if (std::isfinite(rc) && rc <= r0 + 1e-4 * tau * slope) {
                    u = std::move(cand);
                    g = std::move(gc);
                    stepped = true;
                    break;
                }
                tau *= 0.5;
            }
            if (!stepped) {
                out.verdict = MPVerdict::MaxIter;
                out.u_star = best_u;
                out.c_est = op.energy(best_u);
                out.residual = best_polish;
                out.note = "residual line search stalled";
                done = true;
                break;
            }
        }
        if (!done) {
            out.verdict = MPVerdict::MaxIter;
            out.u_star = best_u;
            out.c_est = op.energy(best_u);
            out.residual = best_polish;
            out.note = "iteration budget exhausted";
            done = true;
        }
    }

    if (!done) {
        kstar = 1;
        for (size_t k = 2; k + 1 < pcount; ++k)
            if (ps.energy[k] > ps.energy[kstar]) kstar = k;
        out.verdict = MPVerdict::MaxIter;
        out.u_star = ps.z[kstar];
        out.c_est = ps.energy[kstar];
        out.residual = out.history.empty() ? std::numeric_limits<double>::infinity()
                                           : out.history.back().residual;
        out.note = "iteration budget exhausted";
    }
    if (out.verdict == MPVerdict::Converged && !(out.c_est > 0.0)) {
        out.verdict = MPVerdict::DegenerateToZero;
        out.note = "residual tolerance reached at nonpositive level";
    }
    out.iterations = iter;
    out.snapshots.push_back(out.u_star);
    return out;
}

std::vector<PSEntry> ps_monitor(const ProblemSpec& spec, std::span<const Field> iterates,
                                const GrowthIndices& phi_indices) {
    double theta = spec.nonlinearity.theta;
    double s_phi = phi_indices.s;
    if (!(theta > s_phi))
        throw std::invalid_argument("ps_monitor: theta must exceed the upper growth index of Phi");
    ProblemOperator op(spec);
    std::vector<PSEntry> out;
    out.reserve(iterates.size());
    for (const auto& v : iterates) {
        PSEntry e;
        e.energy = op.energy(v);
        e.residual = op.residual_dual_norm(v);
        e.lhs = (theta - s_phi) / theta * op.coercive_part(v);
        e.rhs = e.energy - op.derivative_dot(v, v) / theta;
        e.bound_ok = e.lhs <= e.rhs + 1e-9 * (1.0 + std::abs(e.rhs));
        out.push_back(e);
    }
    return out;
}

ConcentrationResult concentration_functional(const Field& u, double r,
                                             const ScalarFunction& n_func) {
    const auto& d = u.domain();
    if (!(r > 0.0)) throw std::invalid_argument("concentration_functional: r > 0");
    if (d.boundary == BoundaryRule::Periodic && r > d.half_width)
        throw std::invalid_argument("concentration_functional: r exceeds half the period box");
    double h = d.spacing();
    int reach = static_cast<int>(std::floor(r / h + 1e-9));
    int m = d.points_per_axis;
    if (d.boundary == BoundaryRule::Periodic && 2 * reach + 1 > m)
        throw std::invalid_argument("concentration_functional: ball does not fit the periodic box");

    // stencil of integer offsets inside the ball
    std::vector<std::vector<int>> stencil;
    std::vector<int> off(static_cast<size_t>(d.n), -reach);
    while (true) {
        double dist2 = 0.0;
        for (int a = 0; a < d.n; ++a) {
            double da = off[static_cast<size_t>(a)] * h;
            dist2 += da * da;
        }
        if (dist2 <= r * r * (1.0 + 1e-12)) stencil.push_back(off);
        int a = d.n - 1;
        while (a >= 0) {
            if (++off[static_cast<size_t>(a)] <= reach) break;
            off[static_cast<size_t>(a)] = -reach;
            --a;
        }
        if (a < 0) break;
    }

    // nodal mass N(|u|) h^n
    std::vector<double> mass(static_cast<size_t>(d.node_count()));
    auto uv = u.values();
    double meas = d.cell_measure();
    for (size_t j = 0; j < mass.size(); ++j) mass[j] = n_func.value(std::abs(uv[j])) * meas;

    auto strides = [&] {
        std::vector<std::int64_t> s(static_cast<size_t>(d.n), 1);
        for (int a = d.n - 2; a >= 0; --a) s[static_cast<size_t>(a)] = s[static_cast<size_t>(a) + 1] * m;
        return s;
    }();

    bool periodic = d.boundary == BoundaryRule::Periodic;
    double best = -1.0;
    std::int64_t best_center = 0;
    std::vector<int> c(static_cast<size_t>(d.n), 0);
    for (std::int64_t j = 0; j < d.node_count(); ++j) {
        double s = 0.0;
        for (const auto& ofs : stencil) {
            std::int64_t flat = 0;
            bool outside = false;
            for (int a = 0; a < d.n; ++a) {
                int idx = c[static_cast<size_t>(a)] + ofs[static_cast<size_t>(a)];
                if (periodic) {
                    idx %= m;
                    if (idx < 0) idx += m;
                } else if (idx < 0 || idx >= m) {
                    outside = true;
                    break;
                }
                flat += idx * strides[static_cast<size_t>(a)];
            }
            if (!outside) s += mass[static_cast<size_t>(flat)];
        }
        if (s > best) { best = s; best_center = j; }
        for (int a = d.n - 1; a >= 0; --a) {
            if (++c[static_cast<size_t>(a)] < m) break;
            c[static_cast<size_t>(a)] = 0;
        }
    }

    ConcentrationResult out;
    out.value = best;
    out.center.resize(static_cast<size_t>(d.n));
    std::vector<int> cc(static_cast<size_t>(d.n));
    d.coords_of(best_center, cc);
    for (int a = 0; a < d.n; ++a) out.center[static_cast<size_t>(a)] = d.axis_coord(cc[static_cast<size_t>(a)]);
    return out;
}

Field recenter(const Field& u, std::span<const double> shift,
               std::span<const double> lattice_period) {
    const auto& d = u.domain();
    if (d.boundary != BoundaryRule::Periodic)
        throw std::invalid_argument("recenter: periodic boundary required");
    if (static_cast<int>(shift.size()) != d.n)
        throw std::invalid_argument("recenter: shift dimension mismatch");
    double h = d.spacing();
    std::vector<int> steps(static_cast<size_t>(d.n));
    for (int a = 0; a < d.n; ++a) {
        double q = shift[static_cast<size_t>(a)] / h;
        double rq = std::round(q);
        if (std::abs(q - rq) > 1e-9 * std::max(1.0, std::abs(q)))
            throw std::invalid_argument("recenter: shift must be a multiple of the grid spacing");
        steps[static_cast<size_t>(a)] = static_cast<int>(rq);
        if (!lattice_period.empty()) {
            double lp = lattice_period[static_cast<size_t>(a)];
            double ql = shift[static_cast<size_t>(a)] / lp;
            if (std::abs(ql - std::round(ql)) > 1e-9 * std::max(1.0, std::abs(ql)))
                throw std::invalid_argument("recenter: shift must sit on the declared lattice");
        }
    }
    Field w(d);
    int m = d.points_per_axis;
    std::vector<int> c(static_cast<size_t>(d.n), 0);
    std::vector<int> src(static_cast<size_t>(d.n));
    for (std::int64_t j = 0; j < d.node_count(); ++j) {
        for (int a = 0; a < d.n; ++a) {
            int idx = (c[static_cast<size_t>(a)] + steps[static_cast<size_t>(a)]) % m;
            if (idx < 0) idx += m;
            src[static_cast<size_t>(a)] = idx;
        }
        w[j] = u[d.flat_of(src)];
        for (int a = d.n - 1; a >= 0; --a) {
            if (++c[static_cast<size_t>(a)] < m) break;
            c[static_cast<size_t>(a)] = 0;
        }
    }
    return w;
}

} // namespace anisompa

#include "anisompa/problem.hpp"

#include "anisompa/numerics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace anisompa {

void ProblemSpec::validate() const {
    domain.validate();
    if (phi.dim() != domain.n)
        throw std::invalid_argument("ProblemSpec: phi dimension must match domain dimension");
    if (!potential.eval) throw std::invalid_argument("ProblemSpec: potential evaluator required");
    if (!potential.period.empty() && static_cast<int>(potential.period.size()) != domain.n)
        throw std::invalid_argument("ProblemSpec: potential period length must match dimension");
    for (double p : potential.period)
        if (!(p > 0.0)) throw std::invalid_argument("ProblemSpec: potential periods must be positive");
    if (!nonlinearity.f || !nonlinearity.antiderivative)
        throw std::invalid_argument("ProblemSpec: nonlinearity f and antiderivative required");
    if (!(nonlinearity.theta > 1.0))
        throw std::invalid_argument("ProblemSpec: theta must exceed 1");

    // sampled spot checks
    std::vector<double> x(static_cast<size_t>(domain.n), 0.0);
    double hp = 0.9 * domain.half_width;
    const double probes[] = {0.0, 0.37 * hp, -0.61 * hp, hp};
    for (double p0 : probes) {
        for (int a = 0; a < domain.n; ++a) x[static_cast<size_t>(a)] = p0 * (a % 2 == 0 ? 1.0 : -0.7);
        double v = potential.eval(x);
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument("ProblemSpec: potential must be positive on the box");
    }
    double f0 = nonlinearity.antiderivative(0.0);
    if (std::abs(f0) > 1e-14)
        throw std::invalid_argument("ProblemSpec: antiderivative must vanish at 0");
    for (double t : {0.5, 1.0, 2.0, -1.5}) {
        double h = 1e-5 * (1.0 + std::abs(t));
        double fd = (nonlinearity.antiderivative(t + h) - nonlinearity.antiderivative(t - h)) / (2.0 * h);
        double f = nonlinearity.f(t);
        if (std::abs(fd - f) > 1e-4 * (1.0 + std::abs(f)))
            throw std::invalid_argument("ProblemSpec: antiderivative does not match f");
    }
}

namespace {

HypothesisReport make_report(std::string name, Verdict v,
                             std::vector<std::pair<std::string, double>> evidence,
                             std::string note = {}) {
    HypothesisReport rep;
    rep.name = std::move(name);
    rep.verdict = v;
    rep.evidence = std::move(evidence);
    rep.note = std::move(note);
    return rep;
}

// slope of log ratio(t) over a log grid; nullopt when the ratio vanishes
// identically (vacuously small source term)
std::optional<double> ratio_slope(const std::function<double(double)>& ratio,
                                  double lo, double hi) {
    auto ts = log_grid(lo, hi, 41);
    std::vector<double> t_ok, r_ok;
    for (double t : ts) {
        double r = ratio(t);
        if (std::isfinite(r) && r > 0.0) { t_ok.push_back(t); r_ok.push_back(r); }
    }
    if (t_ok.size() < 5) return std::nullopt;
    return fit_loglog_slope(t_ok, r_ok);
}

} // namespace

std::vector<HypothesisReport> audit_assumptions(const ProblemSpec& spec,
                                                const ScalarFunction& phi_circ,
                                                const std::optional<ScalarFunction>& phi_n,
                                                const SamplePlan& plan) {
    spec.validate();
    std::vector<HypothesisReport> out;
    int n = spec.domain.n;

    auto integ = check_integrability(phi_circ, n);
    out.push_back(make_report("Phi0", integ.phi0,
                              {{"exponent_at_zero", integ.exponent_at_zero},
                               {"dimension", static_cast<double>(n)},
                               {"origin_integral", integ.origin_integral}}));
    out.push_back(make_report("Phi1", integ.phi1,
                              {{"exponent_at_infinity", integ.exponent_at_infinity},
                               {"dimension", static_cast<double>(n)}}));

    if (phi_n) {
        auto dom = check_dominates(spec.phi, *phi_n, plan);
        Verdict v = dom.relation == DominationVerdict::Relation::Dominates ? Verdict::Pass
                  : dom.relation == DominationVerdict::Relation::Fails     ? Verdict::Fail
                                                                           : Verdict::Inconclusive;
        std::vector<std::pair<std::string, double>> ev = {{"slope_phi", dom.slope_a},
                                                          {"slope_phi_n", dom.slope_b}};
        if (dom.constant) ev.emplace_back("constant", *dom.constant);
        if (dom.relation != DominationVerdict::Relation::Inconclusive)
            ev.emplace_back("threshold_radius", dom.threshold_radius);
        out.push_back(make_report("Phi2", v, std::move(ev),
                                  v == Verdict::Fail ? "growth of Phi overtakes the Sobolev conjugate" : ""));
    } else {
        out.push_back(make_report("Phi2", Verdict::Inconclusive, {},
                                  "Sobolev conjugate unavailable (integrability failed)"));
    }

    auto doubling = check_delta2_nabla2(spec.phi, plan);
    Verdict dv;
    if (doubling.delta2 == Verdict::Pass && doubling.nabla2 == Verdict::Pass) dv = Verdict::Pass;
    else if (doubling.delta2 == Verdict::Fail || doubling.nabla2 == Verdict::Fail) dv = Verdict::Fail;
    else dv = Verdict::Inconclusive;
    out.push_back(make_report("Delta", dv,
                              {{"k1", doubling.k1}, {"k2", doubling.k2}}, doubling.note));

    auto idx_phi = growth_indices(spec.phi, plan);
    auto idx_n = growth_indices(spec.n_func, plan);
    {
        bool equiv = equivalent(spec.n_func, phi_circ, plan);
        bool idx_ok = idx_n.i > 1.0 && std::isfinite(idx_n.s) && idx_n.s <= idx_phi.s + 1e-9;
        Verdict v = equiv && idx_ok ? Verdict::Pass : Verdict::Fail;
        out.push_back(make_report("N1", v,
                                  {{"i_n", idx_n.i},
                                   {"s_n", idx_n.s},
                                   {"i_phi", idx_phi.i},
                                   {"s_phi", idx_phi.s},
                                   {"equivalent", equiv ? 1.0 : 0.0}},
                                  equiv ? "" : "N not equivalent to the radial profile"));
    }

    {
        auto slope = ratio_slope([&](double t) {
            return spec.nonlinearity.f(t) * t / spec.n_func.value(t);
        }, 1e-4, 1.0);
        Verdict v;
        std::vector<std::pair<std::string, double>> ev;
        std::string note;
        if (!slope) { v = Verdict::Pass; note = "source term vanishes near zero"; }
        else {
            ev.emplace_back("ratio_slope_at_zero", *slope);
            v = *slope >= 0.1 ? Verdict::Pass : Verdict::Fail;
        }
        out.push_back(make_report("f1", v, std::move(ev), std::move(note)));
    }

    if (phi_n) {
        auto slope = ratio_slope([&](double t) {
            return spec.nonlinearity.f(t) * t / phi_n->value(t);
        }, 1.0, 1e4);
        Verdict v;
        std::vector<std::pair<std::string, double>> ev;
        std::string note;
        if (!slope) { v = Verdict::Pass; note = "source term vanishes at infinity"; }
        else {
            ev.emplace_back("ratio_slope_at_infinity", *slope);
            v = *slope <= -0.1 ? Verdict::Pass : Verdict::Fail;
        }
        out.push_back(make_report("f2", v, std::move(ev), std::move(note)));
    } else {
        out.push_back(make_report("f2", Verdict::Inconclusive, {},
                                  "Sobolev conjugate unavailable (integrability failed)"));
    }

    {
        double theta = spec.nonlinearity.theta;
        bool theta_ok = theta > idx_phi.s + 1e-12;
        bool ar_ok = true, positive_ok = true;
        double worst = 0.0;
        for (double t : log_grid(1e-4, 1e4, 65)) {
            for (double s : {t, -t}) {
                double ff = spec.nonlinearity.antiderivative(s);
                double tf = s * spec.nonlinearity.f(s);
                if (!(ff > 0.0)) positive_ok = false;
                double gap = theta * ff - tf;
                worst = std::max(worst, gap / (1.0 + std::abs(tf)));
                if (gap > 1e-10 * (1.0 + std::abs(tf))) ar_ok = false;
            }
        }
        Verdict v = theta_ok && ar_ok && positive_ok ? Verdict::Pass : Verdict::Fail;
        std::string note;
        if (!theta_ok) note = "theta does not exceed the upper growth index of Phi";
        else if (!positive_ok) note = "antiderivative not positive away from zero";
        else if (!ar_ok) note = "theta F(t) exceeds t f(t)";
        out.push_back(make_report("f3", v,
                                  {{"theta", theta},
                                   {"s_phi", idx_phi.s},
                                   {"max_relative_gap", worst}},
                                  std::move(note)));
    }

    {
        // sample V over one lattice cell (or the box when no lattice declared)
        std::vector<double> widths(static_cast<size_t>(n));
        for (int a = 0; a < n; ++a)
            widths[static_cast<size_t>(a)] = spec.potential.period.empty()
                                                 ? 2.0 * spec.domain.half_width
                                                 : spec.potential.period[static_cast<size_t>(a)];
        const int per_axis = 8;
        std::int64_t total = 1;
        for (int a = 0; a < n; ++a) total *= per_axis;
        double vmin = std::numeric_limits<double>::infinity();
        std::vector<double> x(static_cast<size_t>(n));
        for (std::int64_t j = 0; j < total; ++j) {
            std::int64_t rem = j;
            for (int a = 0; a < n; ++a) {
                int idx = static_cast<int>(rem % per_axis);
                rem /= per_axis;
                x[static_cast<size_t>(a)] = widths[static_cast<size_t>(a)] * idx / per_axis;
            }
            vmin = std::min(vmin, spec.potential.eval(x));
        }
        out.push_back(make_report("V1", vmin > 0.0 ? Verdict::Pass : Verdict::Fail,
                                  {{"v0", vmin}}));

        if (spec.potential.period.empty()) {
            out.push_back(make_report("V2", Verdict::Inconclusive, {}, "no declared lattice"));
        } else {
            double worst = 0.0;
            std::vector<double> y(static_cast<size_t>(n));
            auto probe = [&](std::span<const double> base, int axis, double steps) {
                for (int a = 0; a < n; ++a) y[static_cast<size_t>(a)] = base[static_cast<size_t>(a)];
                double v0 = spec.potential.eval(y);
                y[static_cast<size_t>(axis)] += steps * spec.potential.period[static_cast<size_t>(axis)];
                double v1 = spec.potential.eval(y);
                worst = std::max(worst, std::abs(v1 - v0) / (1.0 + std::abs(v0)));
            };
            for (double base : {-0.77, -0.21, 0.0, 0.4, 0.93}) {
                for (int a = 0; a < n; ++a) x[static_cast<size_t>(a)] = base * spec.domain.half_width * (1.0 - 0.1 * a);
                for (int a = 0; a < n; ++a) { probe(x, a, 1.0); probe(x, a, -2.0); }
            }
            out.push_back(make_report("V2", worst <= 1e-12 ? Verdict::Pass : Verdict::Fail,
                                      {{"max_residual", worst}}));
        }
    }

    return out;
}

bool audit_all_pass(const std::vector<HypothesisReport>& reports) {
    for (const auto& r : reports)
        if (r.verdict != Verdict::Pass) return false;
    return true;
}

} // namespace anisompa

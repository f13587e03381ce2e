#pragma once

#include <functional>
#include <optional>
#include <vector>

namespace anisompa {

// Nondecreasing scalar function on [0, inf), either an exact power law
// kappa * t^q or a sampled table. Tables interpolate log-log by default
// (piecewise power segments) and extrapolate with power laws whose exponents
// are stored alongside the nodes; Step mode gives the left-continuous
// staircase taking the value of the largest node <= t.
class ScalarFunction {
public:
    enum class Kind { Power, Table };
    enum class Interp { LogLog, Step };

    static ScalarFunction power(double exponent, double scale = 1.0);
    static ScalarFunction table(std::vector<double> abscissae, std::vector<double> values,
                                std::optional<double> lower_exponent,
                                std::optional<double> upper_exponent,
                                Interp interp = Interp::LogLog);

    Kind kind() const { return kind_; }
    Interp interp() const { return interp_; }
    bool is_power() const { return kind_ == Kind::Power; }

    double value(double t) const;
    double derivative(double t) const;
    // Least t >= 0 with value(t) >= y (left-continuous inverse).
    double inverse(double y) const;

    double exponent() const;     // Power only
    double scale() const;        // Power only
    const std::vector<double>& abscissae() const { return ts_; }
    const std::vector<double>& values() const { return vs_; }
    std::optional<double> lower_exponent() const { return lower_exp_; }
    std::optional<double> upper_exponent() const { return upper_exp_; }

    // Exponent estimates usable for either kind: exact for Power, the stored
    // (or end-fitted) extrapolation exponents for tables.
    double growth_exponent_at_zero() const;
    double growth_exponent_at_infinity() const;

private:
    ScalarFunction() = default;
    Kind kind_ = Kind::Power;
    Interp interp_ = Interp::LogLog;
    double exp_ = 2.0, scale_ = 1.0;
    std::vector<double> ts_, vs_;
    std::optional<double> lower_exp_, upper_exp_;

    double table_value(double t) const;
    size_t segment_of(double t) const; // greatest i with ts_[i] <= t, interior use
};

// Sample fn on a log grid and wrap as a LogLog table with end exponents
// fitted from the sampled decades.
ScalarFunction tabulate_loglog(const std::function<double(double)>& fn,
                               double lo, double hi, int count);

// Left-continuous generalized inverse, exposed as a free function.
double left_cont_inverse(const ScalarFunction& f, double y);

// Legendre transform M~(s) = sup_t { s t - M(t) }. Power laws map to the
// closed-form conjugate power; tables are conjugated numerically on a log
// grid of slopes. Throws when M grows sublinearly (conjugate degenerate).
ScalarFunction conjugate_scalar(const ScalarFunction& m);

} // namespace anisompa

#include "anisompa/config.hpp"

#include "anisompa/conjugation.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace anisompa {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& where, const std::string& msg) {
    throw ConfigError(where + ": " + msg);
}

double parse_double(const std::string& where, const std::string& v) {
    char* end = nullptr;
    double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0' || !std::isfinite(x))
        fail(where, "expected a finite number, got '" + v + "'");
    return x;
}

int parse_int(const std::string& where, const std::string& v) {
    double x = parse_double(where, v);
    if (x != std::floor(x) || std::abs(x) > 2e9) fail(where, "expected an integer, got '" + v + "'");
    return static_cast<int>(x);
}

std::uint64_t parse_u64(const std::string& where, const std::string& v) {
    char* end = nullptr;
    unsigned long long x = std::strtoull(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0') fail(where, "expected an unsigned integer, got '" + v + "'");
    return x;
}

bool parse_bool(const std::string& where, const std::string& v) {
    if (v == "true") return true;
    if (v == "false") return false;
    fail(where, "expected true/false, got '" + v + "'");
}

std::vector<double> parse_list(const std::string& where, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) fail(where, "empty list entry");
        out.push_back(parse_double(where, item));
    }
    if (out.empty()) fail(where, "empty list");
    return out;
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

struct KeyValue {
    std::string section, key, value, where;
};

std::vector<KeyValue> tokenize(const std::string& text) {
    std::vector<KeyValue> out;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        std::string where = "line " + std::to_string(lineno);
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos) fail(where, "expected 'section.key = value'");
        std::string lhs = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        size_t dot = lhs.find('.');
        if (dot == std::string::npos || lhs.find('.', dot + 1) != std::string::npos)
            fail(where, "expected 'section.key' on the left of '='");
        KeyValue kv;
        kv.section = trim(lhs.substr(0, dot));
        kv.key = trim(lhs.substr(dot + 1));
        kv.value = value;
        kv.where = where;
        if (kv.section.empty() || kv.key.empty() || kv.value.empty())
            fail(where, "empty section, key, or value");
        out.push_back(std::move(kv));
    }
    return out;
}

void apply(ParsedProblem& p, const KeyValue& kv, bool allow_repeat,
           std::vector<std::string>& seen) {
    std::string full = kv.section + "." + kv.key;
    if (!allow_repeat) {
        for (const auto& s : seen)
            if (s == full) fail(kv.where, "duplicate key '" + full + "'");
        seen.push_back(full);
    }
    const std::string& w = kv.where;
    const std::string& v = kv.value;

    if (kv.section == "phi") {
        p.phi_present = true;
        if (kv.key == "kind") {
            if (v != "power_sum") fail(w, "phi.kind must be power_sum");
            p.phi.kind = v;
        } else if (kv.key == "exponents") p.phi.exponents = parse_list(w, v);
        else if (kv.key == "coefficients") p.phi.coefficients = parse_list(w, v);
        else fail(w, "unknown key 'phi." + kv.key + "'");
    } else if (kv.section == "n_func") {
        p.n_func.present = true;
        if (kv.key == "exponent") {
            if (v == "pbar") p.n_func.pbar = true;
            else { p.n_func.pbar = false; p.n_func.exponent = parse_double(w, v); }
        } else if (kv.key == "kind") {
            if (v != "power") fail(w, "n_func.kind must be power");
        } else if (kv.key == "scale") p.n_func.scale = parse_double(w, v);
        else fail(w, "unknown key 'n_func." + kv.key + "'");
    } else if (kv.section == "f") {
        p.f.present = true;
        if (kv.key == "kind") {
            if (v != "odd_power" && v != "zero") fail(w, "f.kind must be odd_power or zero");
            p.f.kind = v;
        } else if (kv.key == "strength") p.f.strength = parse_double(w, v);
        else if (kv.key == "exponent") p.f.exponent = parse_double(w, v);
        else if (kv.key == "theta") p.f.theta = parse_double(w, v);
        else fail(w, "unknown key 'f." + kv.key + "'");
    } else if (kv.section == "v") {
        p.v.present = true;
        if (kv.key == "kind") {
            if (v != "constant" && v != "cosine_product")
                fail(w, "v.kind must be constant or cosine_product");
            p.v.kind = v;
        } else if (kv.key == "value") p.v.value = parse_double(w, v);
        else if (kv.key == "base") p.v.base = parse_double(w, v);
        else if (kv.key == "amplitude") p.v.amplitude = parse_double(w, v);
        else if (kv.key == "period") p.v.period = parse_double(w, v);
        else fail(w, "unknown key 'v." + kv.key + "'");
    } else if (kv.section == "domain") {
        if (kv.key == "n") p.domain.n = parse_int(w, v);
        else if (kv.key == "half_width") p.domain.half_width = parse_double(w, v);
        else if (kv.key == "points") p.domain.points = parse_int(w, v);
        else if (kv.key == "boundary") {
            if (v != "periodic" && v != "zero_dirichlet")
                fail(w, "domain.boundary must be periodic or zero_dirichlet");
            p.domain.boundary = v;
        } else fail(w, "unknown key 'domain." + kv.key + "'");
    } else if (kv.section == "solver") {
        if (kv.key == "path_points") p.solver.path_points = parse_int(w, v);
        else if (kv.key == "descent_step") p.solver.descent_step = parse_double(w, v);
        else if (kv.key == "tol") p.solver.tol = parse_double(w, v);
        else if (kv.key == "max_iter") p.solver.max_iter = parse_int(w, v);
        else if (kv.key == "seed") p.solver.seed = parse_u64(w, v);
        else if (kv.key == "snapshot_stride") p.solver.snapshot_stride = parse_int(w, v);
        else if (kv.key == "concentration_radius") p.solver.concentration_radius = parse_double(w, v);
        else if (kv.key == "write_snapshots") p.solver.write_snapshots = parse_bool(w, v);
        else fail(w, "unknown key 'solver." + kv.key + "'");
    } else {
        fail(w, "unknown section '" + kv.section + "'");
    }
}

} // namespace

ParsedProblem parse_problem_text(const std::string& text,
                                 std::span<const std::string> overrides) {
    ParsedProblem p;
    std::vector<std::string> seen;
    for (const auto& kv : tokenize(text)) apply(p, kv, /*allow_repeat=*/false, seen);
    for (const auto& ov : overrides) {
        auto kvs = tokenize(ov);
        if (kvs.size() != 1) throw ConfigError("override '" + ov + "': expected one section.key=value");
        kvs[0].where = "override '" + ov + "'";
        apply(p, kvs[0], /*allow_repeat=*/true, seen);
    }
    return p;
}

ParsedProblem parse_problem_file(const std::string& path,
                                 std::span<const std::string> overrides) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open problem file '" + path + "'");
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_problem_text(ss.str(), overrides);
}

int ParsedProblem::dimension() const {
    if (!phi_present || phi.exponents.empty())
        throw ConfigError("phi section with exponents is required");
    int n = static_cast<int>(phi.exponents.size());
    if (n < 2) throw ConfigError("phi.exponents: need at least two entries");
    if (domain.n && *domain.n != n)
        throw ConfigError("domain.n = " + std::to_string(*domain.n) +
                          " contradicts phi.exponents length " + std::to_string(n));
    return n;
}

GFunction ParsedProblem::build_phi() const {
    int n = dimension();
    (void)n;
    for (double e : phi.exponents)
        if (!(e > 1.0)) throw ConfigError("phi.exponents must all exceed 1");
    if (!phi.coefficients.empty()) {
        if (phi.coefficients.size() != phi.exponents.size())
            throw ConfigError("phi.coefficients length must match phi.exponents");
        for (double a : phi.coefficients)
            if (!(a > 0.0)) throw ConfigError("phi.coefficients must all be positive");
    }
    return GFunction::power_sum(phi.exponents, phi.coefficients);
}

ScalarFunction ParsedProblem::build_n() const {
    if (!n_func.present) throw ConfigError("n_func section is required");
    double ex = n_func.exponent;
    if (n_func.pbar) {
        auto ce = power_sum_conjugate_exponent(phi.exponents, dimension());
        ex = ce.p_bar;
    }
    if (!(ex > 1.0)) throw ConfigError("n_func.exponent must exceed 1");
    if (!(n_func.scale > 0.0)) throw ConfigError("n_func.scale must be positive");
    return ScalarFunction::power(ex, n_func.scale);
}

DomainSpec ParsedProblem::build_domain() const {
    DomainSpec d;
    d.n = dimension();
    d.half_width = domain.half_width;
    if (domain.points) d.points_per_axis = *domain.points;
    else d.points_per_axis = d.n == 2 ? 64 : (d.n == 3 ? 32 : 16);
    d.boundary = domain.boundary == "periodic" ? BoundaryRule::Periodic
                                               : BoundaryRule::ZeroDirichlet;
    try {
        d.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("domain: ") + e.what());
    }
    return d;
}

ProblemSpec ParsedProblem::build_problem() const {
    if (!f.present) throw ConfigError("f section is required");
    if (!v.present) throw ConfigError("v section is required");
    ProblemSpec spec{build_phi(), build_n(), Potential{}, Nonlinearity{}, build_domain()};

    if (v.kind == "constant") {
        if (!(v.value > 0.0)) throw ConfigError("v.value must be positive (V bounded below by V0 > 0)");
        double val = v.value;
        spec.potential.eval = [val](std::span<const double>) { return val; };
    } else {
        if (!(v.base - std::abs(v.amplitude) > 0.0))
            throw ConfigError("v.base - |v.amplitude| must stay positive (V bounded below by V0 > 0)");
        if (!(v.period > 0.0)) throw ConfigError("v.period must be positive");
        double base = v.base, amp = v.amplitude, per = v.period;
        spec.potential.eval = [base, amp, per](std::span<const double> x) {
            double prod = 1.0;
            for (double xi : x) prod *= std::cos(2.0 * std::numbers::pi * xi / per);
            return base + amp * prod;
        };
    }
    if (!(v.period > 0.0)) throw ConfigError("v.period must be positive");
    spec.potential.period.assign(static_cast<size_t>(spec.domain.n), v.period);

    if (f.kind == "zero") {
        spec.nonlinearity.f = [](double) { return 0.0; };
        spec.nonlinearity.antiderivative = [](double) { return 0.0; };
        spec.nonlinearity.theta = f.theta.value_or(2.0);
    } else {
        double q = f.exponent, c = f.strength;
        if (!(q > 1.0)) throw ConfigError("f.exponent must exceed 1");
        if (!(c > 0.0)) throw ConfigError("f.strength must be positive");
        spec.nonlinearity.f = [q, c](double t) {
            return t == 0.0 ? 0.0 : c * std::pow(std::abs(t), q - 1.0) * t;
        };
        spec.nonlinearity.antiderivative = [q, c](double t) {
            return c * std::pow(std::abs(t), q + 1.0) / (q + 1.0);
        };
        spec.nonlinearity.theta = f.theta.value_or(q + 1.0);
    }
    if (!(spec.nonlinearity.theta > 1.0)) throw ConfigError("f.theta must exceed 1");
    return spec;
}

MPOptions ParsedProblem::solver_options() const {
    MPOptions o;
    o.path_points = solver.path_points;
    o.descent_step = solver.descent_step;
    o.tol = solver.tol;
    o.max_iter = solver.max_iter;
    o.snapshot_stride = solver.snapshot_stride;
    return o;
}

std::string ParsedProblem::canonical_text() const {
    std::string out;
    auto kv = [&out](const std::string& k, const std::string& v) {
        out += k;
        out += " = ";
        out += v;
        out += "\n";
    };
    if (phi_present) {
        kv("phi.kind", phi.kind);
        std::string list;
        for (size_t i = 0; i < phi.exponents.size(); ++i) {
            if (i) list += ", ";
            list += fmt(phi.exponents[i]);
        }
        kv("phi.exponents", list);
        if (!phi.coefficients.empty()) {
            list.clear();
            for (size_t i = 0; i < phi.coefficients.size(); ++i) {
                if (i) list += ", ";
                list += fmt(phi.coefficients[i]);
            }
            kv("phi.coefficients", list);
        }
    }
    if (n_func.present) {
        kv("n_func.kind", "power");
        kv("n_func.exponent", n_func.pbar ? "pbar" : fmt(n_func.exponent));
        kv("n_func.scale", fmt(n_func.scale));
    }
    if (f.present) {
        kv("f.kind", f.kind);
        if (f.kind == "odd_power") {
            kv("f.strength", fmt(f.strength));
            kv("f.exponent", fmt(f.exponent));
        }
        if (f.theta) kv("f.theta", fmt(*f.theta));
    }
    if (v.present) {
        kv("v.kind", v.kind);
        if (v.kind == "constant") kv("v.value", fmt(v.value));
        else {
            kv("v.base", fmt(v.base));
            kv("v.amplitude", fmt(v.amplitude));
        }
        kv("v.period", fmt(v.period));
    }
    if (domain.n) kv("domain.n", std::to_string(*domain.n));
    kv("domain.half_width", fmt(domain.half_width));
    if (domain.points) kv("domain.points", std::to_string(*domain.points));
    kv("domain.boundary", domain.boundary);
    kv("solver.path_points", std::to_string(solver.path_points));
    kv("solver.descent_step", fmt(solver.descent_step));
    kv("solver.tol", fmt(solver.tol));
    kv("solver.max_iter", std::to_string(solver.max_iter));
    kv("solver.seed", std::to_string(solver.seed));
    kv("solver.snapshot_stride", std::to_string(solver.snapshot_stride));
    kv("solver.concentration_radius", fmt(solver.concentration_radius));
    kv("solver.write_snapshots", solver.write_snapshots ? "true" : "false");
    return out;
}

} // namespace anisompa

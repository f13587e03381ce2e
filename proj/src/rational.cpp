#include "anisompa/rational.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace anisompa {

namespace {

Rational make_normalized(__int128 n, __int128 d) {
    if (d == 0) throw std::invalid_argument("Rational: zero denominator");
    if (d < 0) { n = -n; d = -d; }
    __int128 a = n < 0 ? -n : n;
    __int128 g = d;
    while (a != 0) { __int128 t = a; a = g % a; g = t; }
    if (g != 0) { n /= g; d /= g; }
    constexpr __int128 lim = INT64_MAX;
    if (n > lim || n < -lim || d > lim)
        throw std::overflow_error("Rational: overflow during normalization");
    return Rational(static_cast<std::int64_t>(n), static_cast<std::int64_t>(d));
}

} // namespace

Rational::Rational(std::int64_t n, std::int64_t d) : num(n), den(d) {
    if (d == 0) throw std::invalid_argument("Rational: zero denominator");
    if (den < 0) { num = -num; den = -den; }
    std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) { num /= g; den /= g; }
}

std::string Rational::str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
}

Rational operator+(const Rational& a, const Rational& b) {
    return make_normalized(static_cast<__int128>(a.num) * b.den + static_cast<__int128>(b.num) * a.den,
                           static_cast<__int128>(a.den) * b.den);
}

Rational operator-(const Rational& a, const Rational& b) {
    return make_normalized(static_cast<__int128>(a.num) * b.den - static_cast<__int128>(b.num) * a.den,
                           static_cast<__int128>(a.den) * b.den);
}

Rational operator*(const Rational& a, const Rational& b) {
    return make_normalized(static_cast<__int128>(a.num) * b.num,
                           static_cast<__int128>(a.den) * b.den);
}

Rational operator/(const Rational& a, const Rational& b) {
    if (b.num == 0) throw std::invalid_argument("Rational: division by zero");
    return make_normalized(static_cast<__int128>(a.num) * b.den,
                           static_cast<__int128>(a.den) * b.num);
}

Rational reciprocal(const Rational& r) {
    if (r.num == 0) throw std::invalid_argument("Rational: reciprocal of zero");
    return Rational(r.den, r.num);
}

std::optional<Rational> rational_from_double(double x, std::int64_t max_den) {
    if (!std::isfinite(x)) return std::nullopt;

    // Continued-fraction convergents p/q of x; stop once p/q reproduces x
    // to within 4 ulps or the denominator budget runs out.
    double tol = 4.0 * std::abs(x) * 2.220446049250313e-16 + 1e-300;
    std::int64_t p0 = 1, q0 = 0, p1 = 0, q1 = 1; // convergents p1/q1 trail p/q
    double frac = x;
    for (int iter = 0; iter < 64; ++iter) {
        double fl = std::floor(frac);
        if (fl > 9.2e18 || fl < -9.2e18) return std::nullopt;
        auto a = static_cast<std::int64_t>(fl);
        __int128 p = static_cast<__int128>(a) * p0 + p1;
        __int128 q = static_cast<__int128>(a) * q0 + q1;
        if (q > max_den) return std::nullopt;
        p1 = p0; q1 = q0;
        p0 = static_cast<std::int64_t>(p);
        q0 = static_cast<std::int64_t>(q);
        double approx = static_cast<double>(p0) / static_cast<double>(q0);
        if (std::abs(approx - x) <= tol) return Rational(p0, q0);
        double rem = frac - fl;
        if (rem < 1e-18) break;
        frac = 1.0 / rem;
    }
    return std::nullopt;
}

} // namespace anisompa

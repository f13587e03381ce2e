#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace anisompa {

// Exact fraction with normalized sign (den > 0, gcd(num, den) = 1).
// Used for conjugate-exponent bookkeeping where decimal exponents from a
// problem file (1.8, 2.2, ...) stand for exact rationals.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n, std::int64_t d);

    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
    bool is_integer() const { return den == 1; }
    std::string str() const;

    friend Rational operator+(const Rational& a, const Rational& b);
    friend Rational operator-(const Rational& a, const Rational& b);
    friend Rational operator*(const Rational& a, const Rational& b);
    friend Rational operator/(const Rational& a, const Rational& b);
    friend bool operator==(const Rational& a, const Rational& b) = default;
};

Rational reciprocal(const Rational& r);

// Continued-fraction reconstruction of the rational a double most plausibly
// encodes. Fails (nullopt) when no fraction with denominator <= max_den
// matches x to within a few ulps.
std::optional<Rational> rational_from_double(double x, std::int64_t max_den = 1'000'000);

} // namespace anisompa

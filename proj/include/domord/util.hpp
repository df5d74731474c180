#pragma once

#include <numeric>
#include <stdexcept>
#include <string>

namespace domord {

// Input problems: bad CSV, bad config, unresolvable names.
class input_error : public std::runtime_error {
public:
    explicit input_error(const std::string& msg) : std::runtime_error(msg) {}
};

class parse_error : public input_error {
public:
    parse_error(const std::string& msg, long line)
        : input_error(msg + " (line " + std::to_string(line) + ")"), line_(line) {}
    long line() const { return line_; }

private:
    long line_;
};

class config_error : public input_error {
public:
    explicit config_error(const std::string& msg) : input_error(msg) {}
};

// Violated precondition of an operation (caller bug, not data).
class contract_error : public std::logic_error {
public:
    explicit contract_error(const std::string& msg) : std::logic_error(msg) {}
};

// Exact nonnegative rational, normalized. Scores stay within [0,1] but sums
// over many partition groups need 128-bit intermediates before reduction.
struct Rational {
    long long num = 0;
    long long den = 1;

    Rational() = default;
    Rational(long long n, long long d) : num(n), den(d) { normalize(); }

    void normalize() {
        if (den < 0) {
            num = -num;
            den = -den;
        }
        long long g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
        if (num == 0) den = 1;
    }

    static Rational from_i128(__int128 n, __int128 d) {
        __int128 g = gcd128(n < 0 ? -n : n, d < 0 ? -d : d);
        if (g > 1) {
            n /= g;
            d /= g;
        }
        Rational r;
        r.num = static_cast<long long>(n);
        r.den = static_cast<long long>(d);
        r.normalize();
        return r;
    }

    Rational operator+(const Rational& o) const {
        return from_i128(static_cast<__int128>(num) * o.den + static_cast<__int128>(o.num) * den,
                         static_cast<__int128>(den) * o.den);
    }

    Rational operator/(long long k) const {
        return from_i128(num, static_cast<__int128>(den) * k);
    }

    bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
    bool operator<(const Rational& o) const {
        return static_cast<__int128>(num) * o.den < static_cast<__int128>(o.num) * den;
    }

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }

    // Fixed six fractional digits, round half up. Deterministic across platforms.
    std::string to_decimal6() const {
        __int128 scaled = (static_cast<__int128>(num) * 1000000 + den / 2) / den;
        long long whole = static_cast<long long>(scaled / 1000000);
        long long frac = static_cast<long long>(scaled % 1000000);
        std::string f = std::to_string(frac);
        return std::to_string(whole) + "." + std::string(6 - f.size(), '0') + f;
    }

private:
    static __int128 gcd128(__int128 a, __int128 b) {
        while (b != 0) {
            __int128 t = a % b;
            a = b;
            b = t;
        }
        return a == 0 ? 1 : a;
    }
};

}  // namespace domord

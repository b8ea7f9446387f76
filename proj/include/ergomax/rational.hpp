#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

#include "ergomax/errors.hpp"

namespace ergomax {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

// A rational point a/q of the circle group T ~ [0,1), kept in lowest terms
// with 0 <= a < q. Exact arithmetic throughout.
class ReducedFraction {
public:
    ReducedFraction() : num_(0), den_(1) {}

    ReducedFraction(BigInt num, BigInt den) {
        if (den <= 0) throw ParameterError("fraction denominator must be positive");
        num %= den;
        if (num < 0) num += den;
        BigInt g = boost::multiprecision::gcd(num, den);
        num_ = num / g;
        den_ = den / g;
    }

    static ReducedFraction from_string(const std::string& s) {
        auto slash = s.find('/');
        try {
            if (slash == std::string::npos) return ReducedFraction(BigInt(s), 1);
            return ReducedFraction(BigInt(s.substr(0, slash)), BigInt(s.substr(slash + 1)));
        } catch (const std::exception&) {
            throw ParameterError("cannot parse fraction '" + s + "'");
        }
    }

    const BigInt& num() const noexcept { return num_; }
    const BigInt& den() const noexcept { return den_; }
    bool is_zero() const noexcept { return num_ == 0; }

    BigRat rat() const { return BigRat(num_, den_); }
    double value() const { return rat().convert_to<double>(); }

    std::string str() const { return num_.str() + "/" + den_.str(); }

    friend bool operator==(const ReducedFraction& a, const ReducedFraction& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const ReducedFraction& a, const ReducedFraction& b) {
        return !(a == b);
    }
    friend bool operator<(const ReducedFraction& a, const ReducedFraction& b) {
        return a.num_ * b.den_ < b.num_ * a.den_;
    }

private:
    BigInt num_;
    BigInt den_;
};

// Exact distance on the circle: min(|a-b|, 1-|a-b|).
inline BigRat circle_distance(const ReducedFraction& a, const ReducedFraction& b) {
    BigRat d = a.rat() - b.rat();
    if (d < 0) d = -d;
    BigRat w = 1 - d;
    return d < w ? d : w;
}

// Representative of theta in [-1/2, 1/2).
inline double wrap_half(double theta) {
    double w = theta - std::floor(theta);
    if (w >= 0.5) w -= 1.0;
    return w;
}

// Representative of theta in [0, 1).
inline double wrap_unit(double theta) {
    double w = theta - std::floor(theta);
    if (w >= 1.0) w -= 1.0;
    return w;
}

}  // namespace ergomax

#ifndef BARYSKEL_RATIONAL_HPP
#define BARYSKEL_RATIONAL_HPP

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Dense>

#include <string>
#include <string_view>
#include <vector>

namespace baryskel {

/// Exact rational scalar, GMP-backed and always canonical (lowest terms,
/// positive denominator). Expression templates are off so the type plays
/// well inside Eigen expressions.
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                              boost::multiprecision::et_off>;

using RVector = Eigen::Matrix<Rational, Eigen::Dynamic, 1>;
using RMatrix = Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic>;
using Index = Eigen::Index;

/// Canonical serialization: "p/q", or just "p" when q == 1. No whitespace.
std::string to_string(const Rational& value);

/// Parses the canonical form (also accepts non-lowest terms and a negative
/// denominator, which are normalized). Throws InputError on anything else.
Rational parse_rational(std::string_view text);

/// Comma-separated rationals, e.g. "1/4,1/3,0" -> vector of length 3.
RVector parse_rational_vector(std::string_view text);

std::vector<std::string> to_strings(const RVector& v);

inline RVector make_rvector(std::initializer_list<Rational> entries) {
    RVector v(static_cast<Index>(entries.size()));
    Index i = 0;
    for (const auto& e : entries) v(i++) = e;
    return v;
}

/// Exact squared Euclidean norm (rationals have no exact square root).
inline Rational squared_norm(const RVector& v) {
    Rational s = 0;
    for (Index i = 0; i < v.size(); ++i) s += v(i) * v(i);
    return s;
}

} // namespace baryskel

#endif

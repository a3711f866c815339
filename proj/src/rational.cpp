#include "baryskel/rational.hpp"
#include "baryskel/errors.hpp"

namespace baryskel {

std::string to_string(const Rational& value) {
    const Integer num = numerator(value);
    const Integer den = denominator(value);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    return true;
}

Integer parse_integer(std::string_view text) {
    bool negative = false;
    std::string_view digits = text;
    if (!digits.empty() && (digits.front() == '-' || digits.front() == '+')) {
        negative = digits.front() == '-';
        digits.remove_prefix(1);
    }
    if (!all_digits(digits))
        throw InputError("not an integer: '" + std::string(text) + "'");
    Integer value{std::string(digits)};
    return negative ? Integer(-value) : value;
}

} // namespace

Rational parse_rational(std::string_view text) {
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) return Rational(parse_integer(text));
    const Integer num = parse_integer(text.substr(0, slash));
    const Integer den = parse_integer(text.substr(slash + 1));
    if (den == 0) throw InputError("zero denominator in '" + std::string(text) + "'");
    return Rational(num) / Rational(den);
}

RVector parse_rational_vector(std::string_view text) {
    std::vector<Rational> entries;
    size_t start = 0;
    while (true) {
        const auto comma = text.find(',', start);
        const auto piece = comma == std::string_view::npos
                               ? text.substr(start)
                               : text.substr(start, comma - start);
        entries.push_back(parse_rational(piece));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    RVector v(static_cast<Index>(entries.size()));
    for (Index i = 0; i < v.size(); ++i) v(i) = entries[static_cast<size_t>(i)];
    return v;
}

std::vector<std::string> to_strings(const RVector& v) {
    std::vector<std::string> out;
    out.reserve(static_cast<size_t>(v.size()));
    for (Index i = 0; i < v.size(); ++i) out.push_back(to_string(v(i)));
    return out;
}

} // namespace baryskel

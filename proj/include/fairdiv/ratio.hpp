#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <string>
#include <string_view>

#include "errors.hpp"

namespace fairdiv {

/// Exact rational scalar used for every quantity in the library.
/// Kept in lowest terms with a positive denominator, so equality and ordering
/// are exact; there is no floating point anywhere in the core.
using Ratio = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Parse "p/q" or plain integer text. Accepted grammar: -?digits(/digits)?
/// with a positive denominator; anything else (spaces, '+', "1/0", "1/-2",
/// floats) is a ParseError. The result is canonicalized, e.g. "2/4" -> 1/2.
inline Ratio parse_ratio(std::string_view text) {
    const auto fail = [&] {
        throw ParseError("malformed rational: '" + std::string(text) + "'");
    };
    std::size_t pos = 0;
    const auto digits = [&](std::string& out) {
        const std::size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
            out.push_back(text[pos++]);
        if (pos == start) fail();
    };

    std::string num;
    if (pos < text.size() && text[pos] == '-') num.push_back(text[pos++]);
    digits(num);
    std::string den = "1";
    if (pos < text.size() && text[pos] == '/') {
        ++pos;
        den.clear();
        digits(den);
    }
    if (pos != text.size()) fail();

    const BigInt d(den);
    if (d == 0) fail();
    return Ratio(BigInt(num), d);
}

/// Canonical text form: "p" when the denominator is 1, else "p/q".
/// parse_ratio(ratio_to_string(r)) == r for every value.
inline std::string ratio_to_string(const Ratio& r) {
    std::string out = numerator(r).str();
    if (denominator(r) != 1) {
        out.push_back('/');
        out += denominator(r).str();
    }
    return out;
}

} // namespace fairdiv

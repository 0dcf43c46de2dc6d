#include "maxvar/rational.hpp"

namespace maxvar {

Rational make_rational(const Integer& num, const Integer& den) {
    if (den == 0) throw ParseError("zero denominator");
    Rational r(num);
    r /= Rational(den);
    return r;
}

namespace {

Integer parse_integer(const std::string& text) {
    if (text.empty()) throw ParseError("empty number");
    std::size_t i = (text[0] == '-' || text[0] == '+') ? 1 : 0;
    if (i == text.size()) throw ParseError("bad number: '" + text + "'");
    for (; i < text.size(); ++i) {
        if (text[i] < '0' || text[i] > '9') throw ParseError("bad number: '" + text + "'");
    }
    return Integer(text);
}

}  // namespace

Rational rat_parse(const std::string& text) {
    auto slash = text.find('/');
    if (slash == std::string::npos) return Rational(parse_integer(text));
    Integer num = parse_integer(text.substr(0, slash));
    Integer den = parse_integer(text.substr(slash + 1));
    return make_rational(num, den);
}

std::string rat_str(const Rational& value) {
    Integer num = boost::multiprecision::numerator(value);
    Integer den = boost::multiprecision::denominator(value);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

Integer rat_floor(const Rational& x) {
    Integer num = boost::multiprecision::numerator(x);
    Integer den = boost::multiprecision::denominator(x);
    Integer q = num / den;  // truncates toward zero
    if (num < 0 && q * den != num) --q;
    return q;
}

Rational rat_pow2(long e) {
    if (e >= 0) return Rational(Integer(1) << e);
    return make_rational(1, Integer(1) << (-e));
}

}  // namespace maxvar

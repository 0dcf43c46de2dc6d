#ifndef MAXVAR_RATIONAL_HPP
#define MAXVAR_RATIONAL_HPP

#include <boost/multiprecision/gmp.hpp>

#include <stdexcept>
#include <string>

namespace maxvar {

using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                               boost::multiprecision::et_off>;
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : Error { using Error::Error; };
struct LengthMismatch : Error { using Error::Error; };
struct NonMonotonicBreakpoints : Error { using Error::Error; };
struct EmptyInterval : Error { using Error::Error; };
struct NonPositiveRadius : Error { using Error::Error; };
struct NotAttained : Error { using Error::Error; };
struct UnsortedPoints : Error { using Error::Error; };
struct PreconditionViolated : Error { using Error::Error; };
struct HypothesisViolated : Error { using Error::Error; };
struct InvalidWitness : Error { using Error::Error; };
struct EmptyInput : Error { using Error::Error; };
struct WitnessInvalid : Error { using Error::Error; };
struct ClassEmpty : Error { using Error::Error; };
struct InvalidSignal : Error { using Error::Error; };
struct ConfigInvalid : Error { using Error::Error; };

// A condition the underlying argument proves impossible was observed anyway.
struct InternalCheckFailed : Error { using Error::Error; };
struct ConstructionFailed : InternalCheckFailed { using InternalCheckFailed::InternalCheckFailed; };
struct DegenerateCrossing : InternalCheckFailed { using InternalCheckFailed::InternalCheckFailed; };

Rational make_rational(const Integer& num, const Integer& den);

// Accepts "p/q" or a plain integer string; exact, no floating point.
Rational rat_parse(const std::string& text);
std::string rat_str(const Rational& value);

inline Rational rat_abs(const Rational& x) { return x < 0 ? Rational(-x) : x; }
inline int rat_sign(const Rational& x) { return x < 0 ? -1 : (x > 0 ? 1 : 0); }
inline const Rational& rat_min(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline const Rational& rat_max(const Rational& a, const Rational& b) { return a < b ? b : a; }

Integer rat_floor(const Rational& x);

// 2^e for any integer e.
Rational rat_pow2(long e);

}  // namespace maxvar

#endif

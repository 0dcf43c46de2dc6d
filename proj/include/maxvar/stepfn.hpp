#ifndef MAXVAR_STEPFN_HPP
#define MAXVAR_STEPFN_HPP

#include "maxvar/rational.hpp"

#include <cstddef>
#include <utility>
#include <vector>

namespace maxvar {

// Piecewise-constant function on the real line with constant tails:
// values[0] on (-inf, breakpoints[0]), values[i] on (breakpoints[i-1],
// breakpoints[i]), values[N] on (breakpoints[N-1], +inf).  Canonical form:
// breakpoints strictly increasing, no two adjacent values equal.
struct StepFunction {
    std::vector<Rational> breakpoints;
    std::vector<Rational> values;

    std::size_t piece_count() const { return values.size(); }
    bool operator==(const StepFunction&) const = default;
};

StepFunction make_step(std::vector<Rational> breakpoints, std::vector<Rational> values);

// Value at x; at a breakpoint, the larger of the two one-sided limits.
Rational eval_point(const StepFunction& f, const Rational& x);

// One-sided limits (f(x-), f(x+)).
std::pair<Rational, Rational> side_limits(const StepFunction& f, const Rational& x);

// (1/(b-a)) * integral of f over (a,b); exact.
Rational average(const StepFunction& f, const Rational& a, const Rational& b);

// Sum of jump sizes.
Rational variation(const StepFunction& f);

StepFunction absolute(const StepFunction& f);

// Equals f on (a,b), zero outside.
StepFunction restrict_to(const StepFunction& f, const Rational& a, const Rational& b);

// Largest piece value among pieces meeting the open interval (a,b).
Rational sup_on(const StepFunction& f, const Rational& a, const Rational& b);
Rational inf_on(const StepFunction& f, const Rational& a, const Rational& b);

// A point t strictly inside (a,b) with f(t) >= average(f,a,b) (midpoint of a
// maximal piece's overlap), and the dual with <=.
Rational point_above_average(const StepFunction& f, const Rational& a, const Rational& b);
Rational point_below_average(const StepFunction& f, const Rational& a, const Rational& b);

// Exact antiderivative lookups for repeated integration against one function.
class PrefixIntegral {
  public:
    explicit PrefixIntegral(const StepFunction& f);

    // integral of f over [origin, x]; origin is breakpoints[0] (or 0 for a
    // constant function), so differences give every finite integral exactly.
    Rational antiderivative(const Rational& x) const;

    Rational integral(const Rational& a, const Rational& b) const;
    Rational average(const Rational& a, const Rational& b) const;

    const StepFunction& function() const { return *f_; }

  private:
    const StepFunction* f_;
    std::vector<Rational> cumulative_;  // cumulative_[i] = int_{bp0}^{bp_i} f
};

}  // namespace maxvar

#endif

#ifndef MAXVAR_MAXOP_HPP
#define MAXVAR_MAXOP_HPP

#include "maxvar/stepfn.hpp"

#include <optional>
#include <vector>

namespace maxvar {

// One admissible window in a pointwise supremum.  Kink candidates carry the
// radius (and, for interval-based operators, the window itself); the two
// limit kinds record the value the averages approach.
struct RadiusCandidate {
    enum class Kind { Kink, ZeroLimit, InfinityLimit };
    Kind kind = Kind::ZeroLimit;
    Rational radius;  // meaningful for Kink only
    Rational value;
    std::optional<std::pair<Rational, Rational>> window;
};

struct MaxEval {
    Rational value;
    RadiusCandidate achieved_by;
    std::vector<RadiusCandidate> all_candidates;
};

// Centered Hardy-Littlewood maximal function of |f| at x.
//
// A(r) = int_{x-r}^{x+r} |f| is piecewise linear in r with kinks exactly at
// the radii |x - b| over breakpoints b, so A(r)/(2r) is a Mobius function of
// r between consecutive kinks, hence monotone there.  The supremum over
// r > 0 is therefore the maximum over kink radii plus the r->0+ and r->inf
// limits; the enumeration below is exact, not an approximation.
MaxEval centered_max(const StepFunction& f, const Rational& x);

// Non-centered variant: supremum over all intervals containing x.
MaxEval noncentered_max(const StepFunction& f, const Rational& x);

// Supremum restricted to radii >= r.
MaxEval truncated_max(const StepFunction& f, const Rational& x, const Rational& r);

// Supremum restricted to radii in (0, d].
MaxEval local_max(const StepFunction& f, const Rational& x, const Rational& d);

// Largest omega > 0 whose symmetric average at x attains m (m must equal
// centered_max(f,x).value).  Throws NotAttained when no finite maximiser
// exists (supremum reached only in a limit, or attained on an unbounded set).
Rational omega_max(const StepFunction& f, const Rational& x, const Rational& m);

}  // namespace maxvar

#endif

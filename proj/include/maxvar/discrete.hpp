#ifndef MAXVAR_DISCRETE_HPP
#define MAXVAR_DISCRETE_HPP

#include "maxvar/rational.hpp"

#include <map>
#include <vector>

namespace maxvar {

// Signal on the integers: explicit values on a contiguous window, constant
// tails outside it.  Canonical form trims window cells equal to the adjacent
// tail constant.
struct DiscreteSignal {
    long lo = 0;                  // index of vals[0]
    std::vector<Rational> vals;   // may be empty (constant tails only)
    Rational left, right;

    Rational at(long n) const;
    bool operator==(const DiscreteSignal&) const = default;
};

// Validates contiguity of the support keys and trims to canonical form.
DiscreteSignal make_discrete(const std::map<long, Rational>& support, const Rational& left,
                             const Rational& right);

// Exact centered maximal value at one integer: max over window radii of the
// (2r+1)-cell averages of |f|.  Radii beyond the support span only dilute
// toward the two-tail mean, so finitely many candidates plus that limit
// suffice.
Rational discrete_max_at(const DiscreteSignal& f, long n);

// Variation-faithful image of the maximal function: exact values of M|f| on
// the support window padded by one cell, with the true n -> +-inf limits as
// tails.  Beyond the padded window M|f| marches monotonically to those
// limits, so discrete_variation of the result equals Var M|f| exactly.
DiscreteSignal discrete_max(const DiscreteSignal& f);

// Sum of |f(n+1) - f(n)| over all integers (tail transitions included).
Rational discrete_variation(const DiscreteSignal& f);

struct DiscreteSweepResult {
    Rational best_ratio;
    DiscreteSignal argmax;
    long signals_tested = 0;
    long signals_skipped = 0;  // zero-variation inputs
};

// Exhaustive Var Mf / Var f maximisation over signals supported on
// [0, max_index] with integer values in {0, ..., value_max} and zero tails.
DiscreteSweepResult discrete_sweep(int max_index, int value_max);

}  // namespace maxvar

#endif

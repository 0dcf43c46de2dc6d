#ifndef MAXVAR_ENVELOPE_HPP
#define MAXVAR_ENVELOPE_HPP

#include "maxvar/algebraic.hpp"
#include "maxvar/stepfn.hpp"

#include <optional>
#include <vector>

namespace maxvar {

// x -> (p x + q) / (s x + t).  Monotone wherever the denominator keeps its
// sign; the direction is the sign of p t - q s.
struct Mobius {
    Rational p, q, s, t;

    Rational eval(const Rational& x) const;
    Rational limit_pos_inf() const;
    Rational limit_neg_inf() const;
    int direction() const { return rat_sign(p * t - q * s); }
    Rational pole() const;  // only meaningful when s != 0
    bool same_function(const Mobius& other) const;

    static Mobius constant(const Rational& c) { return {Rational(0), c, Rational(0), Rational(1)}; }
};

// One source curve of the pointwise supremum: piecewise-Mobius on abutting
// rational intervals.  point_rule says what the curve contributes when a
// single point is evaluated (the limit kinds differ only at breakpoints).
struct CurvePiece {
    // domain (lo, hi); infinite ends flagged
    bool lo_inf = false, hi_inf = false;
    Rational lo, hi;
    Mobius m;
};

struct CandidateCurve {
    enum class PointRule { Continuous, MeanOfLimits, MaxOfLimits, ExcludedAtPin };
    int id = 0;
    PointRule point_rule = PointRule::Continuous;
    Rational pin;  // for ExcludedAtPin
    std::vector<CurvePiece> pieces;

    // candidate value contributed at a single rational point, if any
    std::optional<Rational> value_at(const Rational& x) const;
};

// Window-average curves whose pointwise maximum is the centered maximal
// function of |f|: for every breakpoint b one curve per side (windows pinned
// at b), the small-radius limit curve, and the constant large-radius limit.
std::vector<CandidateCurve> candidate_curves(const StepFunction& f);

// Same idea for the non-centered operator: interval averages with one
// endpoint sliding, constant averages over breakpoint pairs (restricted to
// their own interval), the one-sided shrink limits, and the two tail values.
std::vector<CandidateCurve> noncentered_candidate_curves(const StepFunction& f);

struct EnvelopePiece {
    Abscissa lo, hi;
    Mobius m;
    int source = -1;
};

// Jump bookkeeping at a piece junction; only rational junctions can carry a
// jump, and the point value there is the exact pointwise supremum.
struct EnvelopeBoundary {
    Abscissa at;
    bool has_point_data = false;
    Rational left_limit, point_value, right_limit;
};

struct Envelope {
    std::vector<EnvelopePiece> pieces;
    std::vector<EnvelopeBoundary> boundaries;  // boundaries[i] sits between pieces[i], pieces[i+1]
};

Envelope upper_envelope(const std::vector<CandidateCurve>& curves);

Envelope centered_envelope(const StepFunction& f);
Envelope noncentered_envelope(const StepFunction& f);

// Exact envelope value at a rational point (piece evaluation, or the stored
// point value on a junction).
Rational envelope_value(const Envelope& env, const Rational& x);

struct VariationEnclosure {
    Rational lo, hi;
};

// Certified interval containing the total variation of the envelope over the
// whole line, of width at most eps.  Monotone stretches are telescoped so
// the result is exact whenever every turning point is rational.
VariationEnclosure variation_enclosure(const Envelope& env, const Rational& eps);

// Sum of |Mf(p_{j+1}) - Mf(p_j)| over the given points: a certified lower
// bound for Var Mf computed through the pointwise operator only.
Rational grid_lower_bound(const StepFunction& f, std::vector<Rational> points);

}  // namespace maxvar

#endif

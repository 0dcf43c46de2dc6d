#include "maxvar/envelope.hpp"

#include "maxvar/maxop.hpp"

#include <algorithm>
#include <cstddef>

namespace maxvar {

Rational Mobius::eval(const Rational& x) const {
    Rational den = s * x + t;
    if (den == 0) throw InternalCheckFailed("Mobius evaluated at its pole");
    return (p * x + q) / den;
}

Rational Mobius::limit_pos_inf() const {
    if (s != 0) return p / s;
    if (p != 0) throw InternalCheckFailed("unbounded Mobius limit");
    return q / t;
}

Rational Mobius::limit_neg_inf() const { return limit_pos_inf(); }

Rational Mobius::pole() const { return -t / s; }

bool Mobius::same_function(const Mobius& other) const {
    // (p,q,s,t) and lambda*(p,q,s,t) describe the same map
    return p * other.q == q * other.p && p * other.s == s * other.p &&
           p * other.t == t * other.p && q * other.s == s * other.q &&
           q * other.t == t * other.q && s * other.t == t * other.s;
}

std::optional<Rational> CandidateCurve::value_at(const Rational& x) const {
    if (point_rule == PointRule::ExcludedAtPin && x == pin) return std::nullopt;
    // locate a piece whose closure contains x
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        const CurvePiece& pc = pieces[i];
        bool left_ok = pc.lo_inf || pc.lo <= x;
        bool right_ok = pc.hi_inf || x <= pc.hi;
        if (!left_ok || !right_ok) continue;
        bool interior = (pc.lo_inf || pc.lo < x) && (pc.hi_inf || x < pc.hi);
        if (interior) return pc.m.eval(x);
        // junction of two pieces (or domain edge)
        if (point_rule == PointRule::Continuous || point_rule == PointRule::ExcludedAtPin) {
            // continuous across junctions: evaluate whichever side is defined
            Rational den = pc.m.s * x + pc.m.t;
            if (den != 0) return pc.m.eval(x);
            continue;  // pole at a domain edge: the abutting piece handles it
        }
        // step-type curves: combine the one-sided limits
        Rational left = !pc.lo_inf && pc.lo == x && i > 0 ? pieces[i - 1].m.eval(x) : pc.m.eval(x);
        Rational right = !pc.hi_inf && pc.hi == x && i + 1 < pieces.size() ? pieces[i + 1].m.eval(x)
                                                                           : pc.m.eval(x);
        if (point_rule == PointRule::MeanOfLimits) return (left + right) / 2;
        return rat_max(left, right);
    }
    return std::nullopt;
}

namespace {

// P(y) = alpha_j + v_j * y per piece of g, the exact antiderivative pieces.
struct Antider {
    std::vector<Rational> alpha;  // per piece j = 0..N
    const StepFunction* g;

    explicit Antider(const StepFunction& gg, const PrefixIntegral& pre) : g(&gg) {
        std::size_t n = gg.breakpoints.size();
        alpha.resize(n + 1);
        if (n == 0) {
            alpha[0] = 0;
            return;
        }
        for (std::size_t j = 0; j <= n; ++j) {
            Rational at = j == 0 ? gg.breakpoints[0] : gg.breakpoints[j - 1];
            alpha[j] = pre.antiderivative(at) - gg.values[j] * at;
        }
    }
};

void append_piece(std::vector<CurvePiece>& out, bool lo_inf, Rational lo, bool hi_inf, Rational hi,
                  Mobius m) {
    // skip empty domains produced at range edges
    if (!lo_inf && !hi_inf && !(lo < hi)) return;
    CurvePiece pc;
    pc.lo_inf = lo_inf;
    pc.hi_inf = hi_inf;
    pc.lo = std::move(lo);
    pc.hi = std::move(hi);
    pc.m = std::move(m);
    out.push_back(pc);
}

}  // namespace

std::vector<CandidateCurve> candidate_curves(const StepFunction& f) {
    StepFunction g = absolute(f);
    PrefixIntegral pre(g);
    Antider anti(g, pre);
    const auto& bp = g.breakpoints;
    std::size_t n = bp.size();

    std::vector<CandidateCurve> curves;
    int next_id = 0;

    for (std::size_t i = 0; i < n; ++i) {
        const Rational& b = bp[i];
        Rational Pb = pre.antiderivative(b);

        // windows (2x - b, b), x < b: average = (P(b) - P(2x-b)) / (2(b-x))
        CandidateCurve left;
        left.id = next_id++;
        left.point_rule = CandidateCurve::PointRule::ExcludedAtPin;
        left.pin = b;
        for (std::size_t j = 0; j <= n; ++j) {
            // 2x-b in piece j  <=>  x in ((bp[j-1]+b)/2, (bp[j]+b)/2)
            bool lo_inf = j == 0;
            bool hi_inf = j == n;
            Rational lo = lo_inf ? Rational(0) : (bp[j - 1] + b) / 2;
            Rational hi = hi_inf ? Rational(0) : (bp[j] + b) / 2;
            if (!hi_inf && hi > b) hi = b;
            if (hi_inf) hi = b;
            hi_inf = false;  // the domain stops at the pin
            if (!lo_inf && !(lo < hi)) continue;
            Mobius m{-2 * g.values[j], Pb - anti.alpha[j] + g.values[j] * b, Rational(-2), 2 * b};
            append_piece(left.pieces, lo_inf, lo, hi_inf, hi, m);
        }
        curves.push_back(std::move(left));

        // windows (b, 2x - b), x > b: average = (P(2x-b) - P(b)) / (2(x-b))
        CandidateCurve right;
        right.id = next_id++;
        right.point_rule = CandidateCurve::PointRule::ExcludedAtPin;
        right.pin = b;
        for (std::size_t j = 0; j <= n; ++j) {
            bool lo_inf = j == 0;
            bool hi_inf = j == n;
            Rational lo = lo_inf ? Rational(0) : (bp[j - 1] + b) / 2;
            Rational hi = hi_inf ? Rational(0) : (bp[j] + b) / 2;
            if (lo_inf) lo = b;
            lo_inf = false;
            if (!lo_inf && lo < b) lo = b;
            if (!hi_inf && !(lo < hi)) continue;
            Mobius m{2 * g.values[j], anti.alpha[j] - g.values[j] * b - Pb, Rational(2), -2 * b};
            append_piece(right.pieces, lo_inf, lo, hi_inf, hi, m);
        }
        curves.push_back(std::move(right));
    }

    // small-radius limit: the step curve itself, mean of limits at breakpoints
    CandidateCurve h0;
    h0.id = next_id++;
    h0.point_rule = CandidateCurve::PointRule::MeanOfLimits;
    for (std::size_t j = 0; j <= n; ++j) {
        bool lo_inf = j == 0, hi_inf = j == n;
        Rational lo = lo_inf ? Rational(0) : bp[j - 1];
        Rational hi = hi_inf ? Rational(0) : bp[j];
        append_piece(h0.pieces, lo_inf, lo, hi_inf, hi, Mobius::constant(g.values[j]));
    }
    curves.push_back(std::move(h0));

    // large-radius limit
    CandidateCurve hinf;
    hinf.id = next_id++;
    hinf.point_rule = CandidateCurve::PointRule::Continuous;
    append_piece(hinf.pieces, true, Rational(0), true, Rational(0),
                 Mobius::constant((g.values.front() + g.values.back()) / 2));
    curves.push_back(std::move(hinf));
    return curves;
}

std::vector<CandidateCurve> noncentered_candidate_curves(const StepFunction& f) {
    StepFunction g = absolute(f);
    PrefixIntegral pre(g);
    Antider anti(g, pre);
    const auto& bp = g.breakpoints;
    std::size_t n = bp.size();

    std::vector<CandidateCurve> curves;
    int next_id = 0;

    for (std::size_t i = 0; i < n; ++i) {
        const Rational& a = bp[i];
        Rational Pa = pre.antiderivative(a);

        // averages over (a, x) for x > a: (P(x) - P(a)) / (x - a)
        CandidateCurve grow;
        grow.id = next_id++;
        grow.point_rule = CandidateCurve::PointRule::ExcludedAtPin;
        grow.pin = a;
        for (std::size_t j = 0; j <= n; ++j) {
            bool lo_inf = j == 0, hi_inf = j == n;
            Rational lo = lo_inf ? a : rat_max(a, bp[j - 1]);
            Rational hi = hi_inf ? Rational(0) : bp[j];
            if (!hi_inf && !(lo < hi)) continue;
            Mobius m{g.values[j], anti.alpha[j] - Pa, Rational(1), -a};
            append_piece(grow.pieces, false, lo, hi_inf, hi, m);
        }
        curves.push_back(std::move(grow));

        // averages over (x, a) for x < a: (P(a) - P(x)) / (a - x)
        CandidateCurve shrink;
        shrink.id = next_id++;
        shrink.point_rule = CandidateCurve::PointRule::ExcludedAtPin;
        shrink.pin = a;
        for (std::size_t j = 0; j <= n; ++j) {
            bool lo_inf = j == 0, hi_inf = j == n;
            Rational lo = lo_inf ? Rational(0) : bp[j - 1];
            Rational hi = hi_inf ? a : rat_min(a, bp[j]);
            if (!lo_inf && !(lo < hi)) continue;
            Mobius m{-g.values[j], Pa - anti.alpha[j], Rational(-1), a};
            append_piece(shrink.pieces, lo_inf, lo, false, hi, m);
        }
        curves.push_back(std::move(shrink));
    }

    // constant averages over breakpoint pairs, valid on their own interval
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            CandidateCurve pair;
            pair.id = next_id++;
            pair.point_rule = CandidateCurve::PointRule::Continuous;
            append_piece(pair.pieces, false, bp[i], false, bp[j],
                         Mobius::constant(pre.average(bp[i], bp[j])));
            curves.push_back(std::move(pair));
        }
    }

    // one-sided shrink limits: the step curve with max-of-limits point rule
    CandidateCurve steps;
    steps.id = next_id++;
    steps.point_rule = CandidateCurve::PointRule::MaxOfLimits;
    for (std::size_t j = 0; j <= n; ++j) {
        bool lo_inf = j == 0, hi_inf = j == n;
        Rational lo = lo_inf ? Rational(0) : bp[j - 1];
        Rational hi = hi_inf ? Rational(0) : bp[j];
        append_piece(steps.pieces, lo_inf, lo, hi_inf, hi, Mobius::constant(g.values[j]));
    }
    curves.push_back(std::move(steps));

    for (const Rational& tail : {g.values.front(), g.values.back()}) {
        CandidateCurve t;
        t.id = next_id++;
        t.point_rule = CandidateCurve::PointRule::Continuous;
        append_piece(t.pieces, true, Rational(0), true, Rational(0), Mobius::constant(tail));
        curves.push_back(std::move(t));
    }
    return curves;
}

namespace {

struct SubPiece {
    Abscissa lo, hi;
    Mobius m;
    int source;
};

// Mobius representation of curve `c` on the open elementary interval
// (lo, hi), where `probe` is any rational inside; nullopt when the curve's
// domain does not cover the interval.
std::optional<Mobius> curve_on(const CandidateCurve& c, const Rational& probe) {
    for (const auto& pc : c.pieces) {
        bool left_ok = pc.lo_inf || pc.lo < probe;
        bool right_ok = pc.hi_inf || probe < pc.hi;
        if (left_ok && right_ok) return pc.m;
    }
    return std::nullopt;
}

// sign of (challenger - incumbent) at a rational point where both are defined
int diff_sign_at(const Mobius& ch, const Mobius& inc, const Rational& x) {
    Rational dch = ch.s * x + ch.t;
    Rational dinc = inc.s * x + inc.t;
    Rational num = (ch.p * x + ch.q) * dinc - (inc.p * x + inc.q) * dch;
    int sgn = rat_sign(num);
    if (rat_sign(dch) * rat_sign(dinc) < 0) sgn = -sgn;
    return sgn;
}

// Insert `ch` into the dominance partition of one elementary interval.
void insert_curve(std::vector<SubPiece>& parts, const Mobius& ch, int ch_source) {
    std::vector<SubPiece> out;
    out.reserve(parts.size() + 2);
    for (auto& part : parts) {
        // crossings of challenger and incumbent inside this part
        Rational A = ch.p * part.m.s - part.m.p * ch.s;
        Rational B = ch.p * part.m.t + ch.q * part.m.s - part.m.p * ch.t - part.m.q * ch.s;
        Rational C = ch.q * part.m.t - part.m.q * ch.t;
        if (A == 0 && B == 0 && C == 0) {
            out.push_back(part);  // identical functions: incumbent keeps the part
            continue;
        }
        std::vector<Abscissa> cuts;
        for (auto& root : solve_quadratic(A, B, C))
            if (cmp(part.lo, root) < 0 && cmp(root, part.hi) < 0) cuts.push_back(root);

        Abscissa prev = part.lo;
        for (std::size_t k = 0; k <= cuts.size(); ++k) {
            Abscissa next = k < cuts.size() ? cuts[k] : part.hi;
            Rational sample = rational_between(prev, next);
            int sgn = diff_sign_at(ch, part.m, sample);
            if (sgn == 0) throw DegenerateCrossing("sign vanishes off the crossing set");
            SubPiece sp;
            sp.lo = prev;
            sp.hi = next;
            sp.m = sgn > 0 ? ch : part.m;
            sp.source = sgn > 0 ? ch_source : part.source;
            out.push_back(std::move(sp));
            prev = next;
        }
    }
    parts = std::move(out);
}

}  // namespace

Envelope upper_envelope(const std::vector<CandidateCurve>& curves) {
    // elementary boundaries: every finite endpoint of every curve piece
    std::vector<Rational> bounds;
    for (const auto& c : curves) {
        for (const auto& pc : c.pieces) {
            if (!pc.lo_inf) bounds.push_back(pc.lo);
            if (!pc.hi_inf) bounds.push_back(pc.hi);
        }
    }
    std::sort(bounds.begin(), bounds.end());
    bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());

    std::vector<SubPiece> all;
    std::size_t intervals = bounds.size() + 1;
    for (std::size_t k = 0; k < intervals; ++k) {
        Abscissa lo = k == 0 ? Abscissa::neg_inf() : Abscissa::of(bounds[k - 1]);
        Abscissa hi = k == bounds.size() ? Abscissa::pos_inf() : Abscissa::of(bounds[k]);
        Rational probe = rational_between(lo, hi);

        std::vector<SubPiece> parts;
        for (const auto& c : curves) {
            auto m = curve_on(c, probe);
            if (!m) continue;
            if (parts.empty()) {
                parts.push_back({lo, hi, *m, c.id});
            } else {
                insert_curve(parts, *m, c.id);
            }
        }
        if (parts.empty()) throw InternalCheckFailed("no curve defined on an elementary interval");
        for (auto& p : parts) all.push_back(std::move(p));
    }

    // merge neighbours describing the same function
    std::vector<EnvelopePiece> pieces;
    for (auto& sp : all) {
        if (!pieces.empty() && pieces.back().m.same_function(sp.m)) {
            pieces.back().hi = sp.hi;
            continue;
        }
        EnvelopePiece ep;
        ep.lo = sp.lo;
        ep.hi = sp.hi;
        ep.m = sp.m;
        ep.source = sp.source;
        pieces.push_back(std::move(ep));
    }

    Envelope env;
    env.boundaries.reserve(pieces.size() > 0 ? pieces.size() - 1 : 0);
    for (std::size_t i = 0; i + 1 < pieces.size(); ++i) {
        EnvelopeBoundary eb;
        eb.at = pieces[i].hi;
        if (eb.at.is_rational()) {
            const Rational& x = eb.at.rational();
            eb.has_point_data = true;
            eb.left_limit = pieces[i].m.eval(x);
            eb.right_limit = pieces[i + 1].m.eval(x);
            bool any = false;
            Rational best;
            for (const auto& c : curves) {
                auto v = c.value_at(x);
                if (!v) continue;
                if (!any || *v > best) best = *v;
                any = true;
            }
            if (!any) throw InternalCheckFailed("no candidate value at a rational boundary");
            eb.point_value = best;
        }
        env.boundaries.push_back(std::move(eb));
    }
    env.pieces = std::move(pieces);
    return env;
}

Envelope centered_envelope(const StepFunction& f) { return upper_envelope(candidate_curves(f)); }

Envelope noncentered_envelope(const StepFunction& f) {
    return upper_envelope(noncentered_candidate_curves(f));
}

Rational envelope_value(const Envelope& env, const Rational& x) {
    for (std::size_t i = 0; i < env.pieces.size(); ++i) {
        int against_hi = cmp(env.pieces[i].hi, x);
        if (against_hi == 0) {
            if (!env.boundaries[i].has_point_data)
                throw InternalCheckFailed("rational point matched an irrational boundary");
            return env.boundaries[i].point_value;
        }
        if (against_hi > 0) return env.pieces[i].m.eval(x);
    }
    throw InternalCheckFailed("point not covered by envelope pieces");
}

namespace {

struct ValueInterval {
    Rational lo, hi;
    bool exact() const { return lo == hi; }
};

// |b - a| in interval arithmetic
ValueInterval abs_diff(const ValueInterval& a, const ValueInterval& b) {
    Rational lo = rat_max(Rational(0), rat_max(a.lo - b.hi, b.lo - a.hi));
    Rational hi = rat_max(rat_abs(a.hi - b.lo), rat_abs(b.hi - a.lo));
    return {lo, hi};
}

// piece endpoint value as a certified interval; pole-free by refinement
ValueInterval endpoint_value(const EnvelopePiece& pc, const Abscissa& at) {
    switch (at.kind()) {
        case Abscissa::Kind::NegInf: {
            Rational v = pc.m.limit_neg_inf();
            return {v, v};
        }
        case Abscissa::Kind::PosInf: {
            Rational v = pc.m.limit_pos_inf();
            return {v, v};
        }
        case Abscissa::Kind::Finite: {
            Rational v = pc.m.eval(at.rational());
            return {v, v};
        }
        default: {
            const QuadRoot& r = at.root();
            if (pc.m.s != 0) {
                Rational pole = pc.m.pole();
                // the root is not the pole (the curve is defined there)
                if (cmp(at, pole) < 0)
                    r.refine_below(pole);
                else
                    r.refine_above(pole);
            }
            Rational a = pc.m.eval(r.lo);
            Rational b = pc.m.eval(r.hi);
            return a <= b ? ValueInterval{a, b} : ValueInterval{b, a};
        }
    }
}

}  // namespace

VariationEnclosure variation_enclosure(const Envelope& env, const Rational& eps) {
    if (!(eps > 0)) throw EmptyInterval("enclosure width must be positive");
    const auto& pieces = env.pieces;
    const auto& bounds = env.boundaries;

    while (true) {
        Rational lo_sum = 0, hi_sum = 0;

        // telescoped monotone runs between discontinuities / turning points
        ValueInterval run_start = endpoint_value(pieces[0], pieces[0].lo);
        int run_dir = pieces[0].m.direction();
        for (std::size_t i = 0; i < pieces.size(); ++i) {
            bool close_run = false;
            bool jump_here = false;
            if (i + 1 == pieces.size()) {
                close_run = true;
            } else {
                const auto& eb = bounds[i];
                jump_here = eb.has_point_data && !(eb.left_limit == eb.point_value &&
                                                   eb.right_limit == eb.point_value);
                int next_dir = pieces[i + 1].m.direction();
                bool reverses = run_dir != 0 && next_dir != 0 && next_dir != run_dir;
                close_run = jump_here || reverses;
                if (!close_run && run_dir == 0) run_dir = next_dir;
            }
            if (close_run) {
                ValueInterval run_end = endpoint_value(pieces[i], pieces[i].hi);
                ValueInterval d = abs_diff(run_start, run_end);
                lo_sum += d.lo;
                hi_sum += d.hi;
                if (i + 1 < pieces.size()) {
                    if (jump_here) {
                        const auto& eb = bounds[i];
                        lo_sum += rat_abs(eb.point_value - eb.left_limit) +
                                  rat_abs(eb.right_limit - eb.point_value);
                        hi_sum += rat_abs(eb.point_value - eb.left_limit) +
                                  rat_abs(eb.right_limit - eb.point_value);
                    }
                    run_start = endpoint_value(pieces[i + 1], pieces[i + 1].lo);
                    run_dir = pieces[i + 1].m.direction();
                }
            }
        }

        if (hi_sum - lo_sum <= eps) return {lo_sum, hi_sum};
        // refine every algebraic junction and retry; each pass halves the
        // isolating intervals, so the gap contracts geometrically
        for (const auto& pc : pieces) {
            if (pc.lo.kind() == Abscissa::Kind::Root) pc.lo.root().refine();
            if (pc.hi.kind() == Abscissa::Kind::Root) pc.hi.root().refine();
        }
    }
}

Rational grid_lower_bound(const StepFunction& f, std::vector<Rational> points) {
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    Rational total = 0;
    if (points.empty()) return total;
    Rational prev = centered_max(f, points[0]).value;
    for (std::size_t i = 1; i < points.size(); ++i) {
        Rational cur = centered_max(f, points[i]).value;
        total += rat_abs(cur - prev);
        prev = cur;
    }
    return total;
}

}  // namespace maxvar

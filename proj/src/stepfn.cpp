#include "maxvar/stepfn.hpp"

#include <algorithm>

namespace maxvar {

StepFunction make_step(std::vector<Rational> breakpoints, std::vector<Rational> values) {
    if (values.size() != breakpoints.size() + 1)
        throw LengthMismatch("need len(values) == len(breakpoints) + 1");
    for (std::size_t i = 1; i < breakpoints.size(); ++i) {
        if (!(breakpoints[i - 1] < breakpoints[i]))
            throw NonMonotonicBreakpoints("breakpoints must be strictly increasing");
    }
    StepFunction f;
    f.values.push_back(values[0]);
    for (std::size_t i = 0; i < breakpoints.size(); ++i) {
        if (values[i + 1] == f.values.back()) continue;  // merge equal neighbours
        f.breakpoints.push_back(breakpoints[i]);
        f.values.push_back(values[i + 1]);
    }
    return f;
}

namespace {

// Index j such that x lies in piece j = (bp[j-1], bp[j]); if x hits a
// breakpoint, returns the piece to its right and sets *at_break.
std::size_t piece_index(const StepFunction& f, const Rational& x, bool* at_break = nullptr) {
    auto it = std::upper_bound(f.breakpoints.begin(), f.breakpoints.end(), x);
    std::size_t j = static_cast<std::size_t>(it - f.breakpoints.begin());
    bool hit = j > 0 && f.breakpoints[j - 1] == x;
    if (at_break) *at_break = hit;
    return j;
}

}  // namespace

Rational eval_point(const StepFunction& f, const Rational& x) {
    bool hit = false;
    std::size_t j = piece_index(f, x, &hit);
    if (hit) return rat_max(f.values[j - 1], f.values[j]);
    return f.values[j];
}

std::pair<Rational, Rational> side_limits(const StepFunction& f, const Rational& x) {
    bool hit = false;
    std::size_t j = piece_index(f, x, &hit);
    if (hit) return {f.values[j - 1], f.values[j]};
    return {f.values[j], f.values[j]};
}

Rational variation(const StepFunction& f) {
    Rational total = 0;
    for (std::size_t i = 1; i < f.values.size(); ++i) total += rat_abs(f.values[i] - f.values[i - 1]);
    return total;
}

StepFunction absolute(const StepFunction& f) {
    std::vector<Rational> vals;
    vals.reserve(f.values.size());
    for (const auto& v : f.values) vals.push_back(rat_abs(v));
    return make_step(f.breakpoints, std::move(vals));
}

StepFunction restrict_to(const StepFunction& f, const Rational& a, const Rational& b) {
    if (!(a < b)) throw EmptyInterval("restrict needs a < b");
    std::vector<Rational> bps{a};
    std::vector<Rational> vals{Rational(0)};
    vals.push_back(f.values[piece_index(f, a)]);  // value just right of a
    for (std::size_t i = 0; i < f.breakpoints.size(); ++i) {
        if (f.breakpoints[i] <= a) continue;
        if (f.breakpoints[i] >= b) break;
        bps.push_back(f.breakpoints[i]);
        vals.push_back(f.values[i + 1]);
    }
    bps.push_back(b);
    vals.push_back(Rational(0));
    return make_step(std::move(bps), std::move(vals));
}

Rational average(const StepFunction& f, const Rational& a, const Rational& b) {
    return PrefixIntegral(f).average(a, b);
}

namespace {

// Piece values of f over pieces intersecting the open interval (a,b),
// reported as [first_piece, last_piece] index range.
std::pair<std::size_t, std::size_t> overlapping_pieces(const StepFunction& f, const Rational& a,
                                                       const Rational& b) {
    if (!(a < b)) throw EmptyInterval("need a < b");
    // piece j = (bp[j-1], bp[j]) meets (a,b) iff bp[j-1] < b and bp[j] > a
    auto lo = std::upper_bound(f.breakpoints.begin(), f.breakpoints.end(), a);
    std::size_t first = static_cast<std::size_t>(lo - f.breakpoints.begin());
    auto hi = std::lower_bound(f.breakpoints.begin(), f.breakpoints.end(), b);
    std::size_t last = static_cast<std::size_t>(hi - f.breakpoints.begin());
    return {first, last};
}

Rational piece_overlap_midpoint(const StepFunction& f, std::size_t j, const Rational& a,
                                const Rational& b) {
    Rational lo = j == 0 ? a : rat_max(a, f.breakpoints[j - 1]);
    Rational hi = j == f.breakpoints.size() ? b : rat_min(b, f.breakpoints[j]);
    return (lo + hi) / 2;
}

}  // namespace

Rational sup_on(const StepFunction& f, const Rational& a, const Rational& b) {
    auto [first, last] = overlapping_pieces(f, a, b);
    Rational best = f.values[first];
    for (std::size_t j = first + 1; j <= last; ++j) best = rat_max(best, f.values[j]);
    return best;
}

Rational inf_on(const StepFunction& f, const Rational& a, const Rational& b) {
    auto [first, last] = overlapping_pieces(f, a, b);
    Rational best = f.values[first];
    for (std::size_t j = first + 1; j <= last; ++j) best = rat_min(best, f.values[j]);
    return best;
}

Rational point_above_average(const StepFunction& f, const Rational& a, const Rational& b) {
    auto [first, last] = overlapping_pieces(f, a, b);
    std::size_t arg = first;
    for (std::size_t j = first + 1; j <= last; ++j)
        if (f.values[j] > f.values[arg]) arg = j;
    return piece_overlap_midpoint(f, arg, a, b);
}

Rational point_below_average(const StepFunction& f, const Rational& a, const Rational& b) {
    auto [first, last] = overlapping_pieces(f, a, b);
    std::size_t arg = first;
    for (std::size_t j = first + 1; j <= last; ++j)
        if (f.values[j] < f.values[arg]) arg = j;
    return piece_overlap_midpoint(f, arg, a, b);
}

PrefixIntegral::PrefixIntegral(const StepFunction& f) : f_(&f) {
    cumulative_.reserve(f.breakpoints.size());
    Rational acc = 0;
    cumulative_.push_back(acc);
    for (std::size_t i = 1; i < f.breakpoints.size(); ++i) {
        acc += f.values[i] * (f.breakpoints[i] - f.breakpoints[i - 1]);
        cumulative_.push_back(acc);
    }
}

Rational PrefixIntegral::antiderivative(const Rational& x) const {
    const auto& f = *f_;
    if (f.breakpoints.empty()) return f.values[0] * x;
    if (x <= f.breakpoints.front()) return f.values.front() * (x - f.breakpoints.front());
    if (x >= f.breakpoints.back())
        return cumulative_.back() + f.values.back() * (x - f.breakpoints.back());
    std::size_t j = piece_index(f, x);
    return cumulative_[j - 1] + f.values[j] * (x - f.breakpoints[j - 1]);
}

Rational PrefixIntegral::integral(const Rational& a, const Rational& b) const {
    return antiderivative(b) - antiderivative(a);
}

Rational PrefixIntegral::average(const Rational& a, const Rational& b) const {
    if (!(a < b)) throw EmptyInterval("average needs a < b");
    return integral(a, b) / (b - a);
}

}  // namespace maxvar

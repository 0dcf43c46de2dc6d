#include "maxvar/maxop.hpp"

#include <algorithm>

namespace maxvar {

namespace {

std::vector<Rational> kink_radii(const StepFunction& g, const Rational& x) {
    std::vector<Rational> radii;
    radii.reserve(g.breakpoints.size());
    for (const auto& b : g.breakpoints) {
        Rational r = rat_abs(x - b);
        if (r > 0) radii.push_back(r);
    }
    std::sort(radii.begin(), radii.end());
    radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
    return radii;
}

MaxEval finish(std::vector<RadiusCandidate> candidates) {
    MaxEval out;
    out.value = candidates.front().value;
    std::size_t arg = 0;
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        if (candidates[i].value > out.value) {
            out.value = candidates[i].value;
            arg = i;
        }
    }
    out.achieved_by = candidates[arg];
    out.all_candidates = std::move(candidates);
    return out;
}

RadiusCandidate kink(const Rational& r, const Rational& value, Rational wl, Rational wr) {
    RadiusCandidate c;
    c.kind = RadiusCandidate::Kind::Kink;
    c.radius = r;
    c.value = value;
    c.window = {std::move(wl), std::move(wr)};
    return c;
}

RadiusCandidate limit_candidate(RadiusCandidate::Kind kind, const Rational& value) {
    RadiusCandidate c;
    c.kind = kind;
    c.value = value;
    return c;
}

}  // namespace

MaxEval centered_max(const StepFunction& f, const Rational& x) {
    StepFunction g = absolute(f);
    PrefixIntegral pre(g);
    auto [vl, vr] = side_limits(g, x);

    std::vector<RadiusCandidate> candidates;
    candidates.push_back(limit_candidate(RadiusCandidate::Kind::ZeroLimit, (vl + vr) / 2));
    for (const auto& r : kink_radii(g, x))
        candidates.push_back(kink(r, pre.average(x - r, x + r), x - r, x + r));
    candidates.push_back(limit_candidate(RadiusCandidate::Kind::InfinityLimit,
                                         (g.values.front() + g.values.back()) / 2));
    return finish(std::move(candidates));
}

MaxEval noncentered_max(const StepFunction& f, const Rational& x) {
    StepFunction g = absolute(f);
    PrefixIntegral pre(g);
    auto [vl, vr] = side_limits(g, x);

    std::vector<RadiusCandidate> candidates;
    candidates.push_back(limit_candidate(RadiusCandidate::Kind::ZeroLimit, vl));
    candidates.push_back(limit_candidate(RadiusCandidate::Kind::ZeroLimit, vr));

    std::vector<Rational> endpoints = g.breakpoints;
    endpoints.push_back(x);
    std::sort(endpoints.begin(), endpoints.end());
    endpoints.erase(std::unique(endpoints.begin(), endpoints.end()), endpoints.end());
    for (std::size_t i = 0; i < endpoints.size(); ++i) {
        if (endpoints[i] > x) break;
        for (std::size_t j = i + 1; j < endpoints.size(); ++j) {
            if (endpoints[j] < x) continue;
            candidates.push_back(kink((endpoints[j] - endpoints[i]) / 2,
                                      pre.average(endpoints[i], endpoints[j]), endpoints[i],
                                      endpoints[j]));
        }
    }
    candidates.push_back(
        limit_candidate(RadiusCandidate::Kind::InfinityLimit, g.values.front()));
    candidates.push_back(
        limit_candidate(RadiusCandidate::Kind::InfinityLimit, g.values.back()));
    return finish(std::move(candidates));
}

MaxEval truncated_max(const StepFunction& f, const Rational& x, const Rational& r) {
    if (!(r > 0)) throw NonPositiveRadius("truncated_max needs r > 0");
    StepFunction g = absolute(f);
    PrefixIntegral pre(g);

    std::vector<RadiusCandidate> candidates;
    candidates.push_back(kink(r, pre.average(x - r, x + r), x - r, x + r));
    for (const auto& rho : kink_radii(g, x))
        if (rho > r) candidates.push_back(kink(rho, pre.average(x - rho, x + rho), x - rho, x + rho));
    candidates.push_back(limit_candidate(RadiusCandidate::Kind::InfinityLimit,
                                         (g.values.front() + g.values.back()) / 2));
    return finish(std::move(candidates));
}

MaxEval local_max(const StepFunction& f, const Rational& x, const Rational& d) {
    if (!(d > 0)) throw NonPositiveRadius("local_max needs d > 0");
    StepFunction g = absolute(f);
    PrefixIntegral pre(g);
    auto [vl, vr] = side_limits(g, x);

    std::vector<RadiusCandidate> candidates;
    candidates.push_back(limit_candidate(RadiusCandidate::Kind::ZeroLimit, (vl + vr) / 2));
    for (const auto& rho : kink_radii(g, x))
        if (rho < d) candidates.push_back(kink(rho, pre.average(x - rho, x + rho), x - rho, x + rho));
    candidates.push_back(kink(d, pre.average(x - d, x + d), x - d, x + d));
    return finish(std::move(candidates));
}

Rational omega_max(const StepFunction& f, const Rational& x, const Rational& m) {
    StepFunction g = absolute(f);
    if (centered_max(g, x).value != m)
        throw PreconditionViolated("omega_max: m is not the centered maximal value at x");
    PrefixIntegral pre(g);
    auto radii = kink_radii(g, x);

    // A(w) = int_{x-w}^{x+w} g is linear on each segment between kinks; solve
    // A(w) = 2 m w per segment, right to left, and return the largest root.
    auto segment_solution = [&](const Rational& lo, const Rational* hi) -> std::optional<Rational> {
        // probe radius is interior to the segment, so both window ends sit
        // strictly inside pieces of g and the slope of A is their value sum
        Rational probe = hi ? (lo + *hi) / 2 : lo + 1;
        Rational slope = eval_point(g, x + probe) + eval_point(g, x - probe);
        Rational A_lo = pre.integral(x - lo, x + lo);
        Rational coeff = 2 * m - slope;  // solve coeff * w = A_lo - slope * lo
        Rational rhs = A_lo - slope * lo;
        if (coeff == 0) {
            if (rhs != 0) return std::nullopt;  // parallel, never equal
            // averages identically m on the whole segment
            if (!hi) throw NotAttained("average equals the maximum on an unbounded set");
            return *hi;
        }
        Rational w = rhs / coeff;
        if (w <= 0 || w < lo) return std::nullopt;
        if (hi && w > *hi) return std::nullopt;
        return w;
    };

    if (radii.empty()) {
        // constant |f|: every window averages to m
        throw NotAttained("average equals the maximum on an unbounded set");
    }
    if (auto w = segment_solution(radii.back(), nullptr)) return *w;
    for (std::size_t i = radii.size(); i-- > 0;) {
        Rational lo = i == 0 ? Rational(0) : radii[i - 1];
        if (auto w = segment_solution(lo, &radii[i])) return *w;
    }
    throw NotAttained("no window attains the supremum");
}

}  // namespace maxvar

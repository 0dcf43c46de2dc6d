#include "maxvar/proofpipe.hpp"

#include "maxvar/envelope.hpp"
#include "maxvar/maxop.hpp"

#include <algorithm>
#include <set>

namespace maxvar {

namespace {

void require(bool cond, const char* what) {
    if (!cond) throw ConstructionFailed(std::string("internal check failed: ") + what);
}

void hyp(bool cond, const char* what) {
    if (!cond) throw HypothesisViolated(what);
}

Integer mod_floor(const Integer& a, long m) {
    Integer r = a % m;
    if (r < 0) r += m;
    return r;
}

// largest integer == K (mod 200) not exceeding bound
Integer largest_cong_leq(const Rational& bound, int K) {
    Integer q = rat_floor(bound);
    return q - mod_floor(q - K, 200);
}

// smallest integer == K (mod 200) not below bound
Integer smallest_cong_geq(const Rational& bound, int K) {
    Integer q = -rat_floor(-bound);  // ceiling
    return q + mod_floor(Integer(K) - q, 200);
}

StageRecord stage_le(std::string name, const Rational& achieved, const Rational& bound,
                     std::string note = {}) {
    StageRecord r;
    r.stage = std::move(name);
    r.required = bound;
    r.achieved = achieved;
    r.margin = bound - achieved;
    r.ok = r.margin >= 0;
    r.note = std::move(note);
    return r;
}

StageRecord stage_ge(std::string name, const Rational& achieved, const Rational& bound,
                     std::string note = {}) {
    StageRecord r;
    r.stage = std::move(name);
    r.required = bound;
    r.achieved = achieved;
    r.margin = achieved - bound;
    r.ok = r.margin >= 0;
    r.note = std::move(note);
    return r;
}

}  // namespace

bool ChainReport::all_ok() const {
    for (const auto& s : stages)
        if (!s.ok) return false;
    return true;
}

PeakExtraction extract_peaks(const std::vector<MPoint>& samples) {
    for (std::size_t i = 1; i < samples.size(); ++i)
        if (!(samples[i - 1].x < samples[i].x)) throw UnsortedPoints("points must strictly increase");

    PeakExtraction out;
    out.boundary_left = 0;
    out.boundary_right = 0;
    out.total_abs_delta = 0;
    for (std::size_t i = 1; i < samples.size(); ++i)
        out.total_abs_delta += rat_abs(samples[i].m - samples[i - 1].m);

    // keep only strict local extrema (plateaus collapse to their first point)
    std::vector<MPoint> ext;
    for (const auto& pt : samples) {
        if (!ext.empty() && ext.back().m == pt.m) continue;
        while (ext.size() >= 2) {
            const MPoint& a = ext[ext.size() - 2];
            const MPoint& b = ext.back();
            if ((a.m < b.m && b.m < pt.m) || (a.m > b.m && b.m > pt.m))
                ext.pop_back();
            else
                break;
        }
        ext.push_back(pt);
    }
    if (ext.size() < 2) return out;

    bool first_is_max = ext[0].m > ext[1].m;
    bool last_is_max = ext[ext.size() - 1].m > ext[ext.size() - 2].m;
    if (first_is_max) out.boundary_left = ext[0].m - ext[1].m;
    if (last_is_max) out.boundary_right = ext.back().m - ext[ext.size() - 2].m;
    for (std::size_t j = 1; j + 1 < ext.size(); ++j) {
        bool is_max = ext[j].m > ext[j - 1].m && ext[j].m > ext[j + 1].m;
        if (!is_max) continue;
        Peak pk;
        pk.p = ext[j - 1].x;
        pk.r = ext[j].x;
        pk.q = ext[j + 1].x;
        pk.mp = ext[j - 1].m;
        pk.mr = ext[j].m;
        pk.mq = ext[j + 1].m;
        out.peaks.push_back(std::move(pk));
    }

    Rational check = out.boundary_left + out.boundary_right;
    for (const auto& pk : out.peaks) check += pk.var();
    require(check == out.total_abs_delta, "peak extraction must preserve the |delta| sum");
    return out;
}

EssentialSplit essential_filter(const StepFunction& f, const std::vector<Peak>& peaks) {
    StepFunction g = absolute(f);
    EssentialSplit out;
    for (const auto& pk : peaks) {
        hyp(pk.p < pk.r && pk.r < pk.q && pk.mp < pk.mr && pk.mq < pk.mr,
            "essential_filter: not a peak");
        Rational sup = sup_on(g, pk.p, pk.q);
        Rational threshold = pk.mr - pk.var() / 4;
        if (sup <= threshold) {
            Rational omega;
            try {
                omega = omega_max(g, pk.r, pk.mr);
            } catch (const NotAttained&) {
                // the window lemma proves attainment for essential peaks
                throw InternalCheckFailed("omega not attained for an essential peak");
            }
            require(pk.r - omega < pk.p && pk.q < pk.r + omega,
                    "omega window must reach beyond both peak feet");
            out.essential.push_back({pk, omega});
        } else {
            Rational x = point_above_average(g, pk.p, pk.q);
            require(eval_point(g, x) >= threshold, "non-essential witness below threshold");
            out.non_essential.push_back({pk, x});
        }
    }
    return out;
}

namespace {

// Witness t in (2e - (r - omega), r + omega) with f(t) >= Mf(r) and
// f(t) >= Mf(e) + (Mf(r)-Mf(e))/(r-e) * omega, for r - omega < e < r.
Rational lemm0_right(const StepFunction& g, const PrefixIntegral& pre, const Rational& r,
                     const Rational& omega, const Rational& e, const Rational& Me,
                     const Rational& Mr) {
    Rational lo = 2 * e - (r - omega);
    Rational hi = r + omega;
    require(lo < hi, "lemm0 interval must be nonempty");
    Rational t = point_above_average(g, lo, hi);
    Rational ft = eval_point(g, t);
    require(ft >= Mr, "lemm0 witness must reach Mf(r)");
    require(ft >= Me + (Mr - Me) / (r - e) * omega, "lemm0 witness slope bound");
    return t;
}

// Mirror image: witness s in (r - omega, 2e - (r + omega)) for r < e < r + omega.
Rational lemm0_left(const StepFunction& g, const PrefixIntegral& pre, const Rational& r,
                    const Rational& omega, const Rational& e, const Rational& Me,
                    const Rational& Mr) {
    Rational lo = r - omega;
    Rational hi = 2 * e - (r + omega);
    require(lo < hi, "lemm0 interval must be nonempty");
    Rational s = point_above_average(g, lo, hi);
    Rational fs = eval_point(g, s);
    require(fs >= Mr, "lemm0 witness must reach Mf(r)");
    require(fs >= Me + (Mr - Me) / (e - r) * omega, "lemm0 witness slope bound");
    return s;
}

}  // namespace

Rational lemm0_witness(const StepFunction& f, const Rational& r, const Rational& omega,
                       const Rational& p) {
    StepFunction g = absolute(f);
    PrefixIntegral pre(g);
    Rational Mr = centered_max(g, r).value;
    if (!(omega > 0 && pre.average(r - omega, r + omega) == Mr))
        throw PreconditionViolated("window average must attain Mf(r)");
    if (!(r - omega < p && p < r)) throw PreconditionViolated("need r - omega < p < r");
    Rational Mp = centered_max(g, p).value;
    if (!(Mp <= Mr)) throw PreconditionViolated("need Mf(p) <= Mf(r)");
    return lemm0_right(g, pre, r, omega, p, Mp, Mr);
}

namespace {

struct SUVT {
    Rational s, u, v, t;
    Rational achieved;
    std::string tag;
};

void check_witness_geometry(const SUVT& w, const Rational& x, const Rational& y,
                            const Rational& L) {
    require(w.s < w.u && w.u < w.v && w.v < w.t, "witness points out of order");
    require(x - 50 * L <= w.s && w.t <= y + 50 * L, "witness outside the 50L window");
    require(w.u - w.s >= 4 * L && w.v - w.u >= L && w.t - w.v >= 4 * L, "witness spacing");
}

// One peak; p and q may stick out of [x,y] but x <= r <= y.
SUVT suvt_single(const StepFunction& g, const PrefixIntegral& pre, const Rational& x,
                 const Rational& y, const Rational& L, const EssentialPeak& ep) {
    const Peak& pk = ep.base;
    const Rational& w = ep.omega;
    Rational t = lemm0_right(g, pre, pk.r, w, pk.p, pk.mp, pk.mr);
    Rational s = lemm0_left(g, pre, pk.r, w, pk.q, pk.mq, pk.mr);
    SUVT out;
    out.s = s;
    out.t = t;
    if (pk.q - pk.p < 10 * L) {
        out.tag = "I.a";
        Rational e = pk.mp <= pk.mq ? pk.p : pk.q;
        Rational me = rat_min(pk.mp, pk.mq);
        out.u = e - L / 2;
        out.v = e + L / 2;
        require(pre.average(out.u, out.v) <= me, "half-L window average exceeds Mf(center)");
    } else {
        out.tag = "I.b";
        // witnesses reach Mf(r) > sup over (p,q), so they sit outside (p,q)
        require(s <= pk.p && pk.q <= t, "witnesses must flank the peak");
        out.u = (pk.p + pk.q - L) / 2;
        out.v = (pk.p + pk.q + L) / 2;
        require(pk.p < out.u && out.v < pk.q, "middle window must fit inside the peak");
    }
    out.achieved = rat_min(eval_point(g, s), eval_point(g, t)) - pre.average(out.u, out.v);
    require(out.achieved >= pk.var() / 4, "single-peak witness must give var/4");
    check_witness_geometry(out, x, y, L);
    return out;
}

// All peaks inside [x,y].
SUVT suvt_inside(const StepFunction& g, const PrefixIntegral& pre, const Rational& x,
                 const Rational& y, const Rational& L, const std::vector<EssentialPeak>& peaks) {
    std::size_t m = peaks.size();
    std::vector<Rational> e(m + 1), Me(m + 1);
    e[0] = peaks[0].base.p;
    Me[0] = peaks[0].base.mp;
    for (std::size_t i = 1; i < m; ++i) {
        // junction between peak i-1 and peak i: keep the lower maximal value
        if (peaks[i].base.mp <= peaks[i - 1].base.mq) {
            e[i] = peaks[i].base.p;
            Me[i] = peaks[i].base.mp;
        } else {
            e[i] = peaks[i - 1].base.q;
            Me[i] = peaks[i - 1].base.mq;
        }
    }
    e[m] = peaks[m - 1].base.q;
    Me[m] = peaks[m - 1].base.mq;

    Rational var_mod = 0, var_orig = 0;
    for (std::size_t i = 0; i < m; ++i) {
        var_mod += (peaks[i].base.mr - Me[i]) + (peaks[i].base.mr - Me[i + 1]);
        var_orig += peaks[i].base.var();
    }
    require(var_mod >= var_orig, "modified system must not lose variation");

    auto right_witness = [&](std::size_t i) {
        Rational t = lemm0_right(g, pre, peaks[i].base.r, peaks[i].omega, e[i], Me[i],
                                 peaks[i].base.mr);
        require(y + 23 * L <= t && t <= y + 50 * L, "t_i must land in the right margin");
        return t;
    };
    auto left_witness = [&](std::size_t i) {
        Rational s = lemm0_left(g, pre, peaks[i].base.r, peaks[i].omega, e[i + 1], Me[i + 1],
                                peaks[i].base.mr);
        require(x - 50 * L <= s && s <= x - 23 * L, "s_i must land in the left margin");
        return s;
    };

    SUVT out;
    Rational diff = Me[m] - Me[0];
    if (2 * rat_abs(diff) > var_mod) {
        out.tag = "II.a";
        if (diff > 0) {
            out.s = left_witness(m - 1);
            out.t = right_witness(m - 1);
            out.u = e[0] - L / 2;
            out.v = e[0] + L / 2;
            require(pre.average(out.u, out.v) <= Me[0], "window average exceeds Mf(e_1)");
        } else {
            out.s = left_witness(0);
            out.t = right_witness(0);
            out.u = e[m] - L / 2;
            out.v = e[m] + L / 2;
            require(pre.average(out.u, out.v) <= Me[m], "window average exceeds Mf(e_{m+1})");
        }
    } else {
        out.tag = "II.b";
        Rational sumD = 0, sumG = 0;
        for (std::size_t i = 0; i < m; ++i) {
            sumD += peaks[i].base.mr - Me[i];
            sumG += peaks[i].base.mr - Me[i + 1];
        }
        require(4 * sumD >= var_mod && 4 * sumG >= var_mod, "gap sums must carry var/4 each");
        std::size_t j = 0, k = 0;
        for (std::size_t i = 1; i < m; ++i) {
            // maximise (mr - Me[i+1])/(e[i+1]-r_i) and (mr - Me[i])/(r_i-e[i])
            const Rational gi = peaks[i].base.mr - Me[i + 1];
            const Rational gj = peaks[j].base.mr - Me[j + 1];
            if (gi * (e[j + 1] - peaks[j].base.r) > gj * (e[i + 1] - peaks[i].base.r)) j = i;
            const Rational di = peaks[i].base.mr - Me[i];
            const Rational dk = peaks[k].base.mr - Me[k];
            if (di * (peaks[k].base.r - e[k]) > dk * (peaks[i].base.r - e[i])) k = i;
        }
        out.s = left_witness(j);
        out.t = right_witness(k);
        require(eval_point(g, out.s) - Me[j + 1] >= Rational(25) / 4 * var_mod,
                "s_j gap must reach 25/4 of the modified variation");
        require(eval_point(g, out.t) - Me[k] >= Rational(25) / 4 * var_mod,
                "t_k gap must reach 25/4 of the modified variation");
        bool pick_j = Me[j + 1] <= Me[k];
        const Rational& epick = pick_j ? e[j + 1] : e[k];
        const Rational& mpick = pick_j ? Me[j + 1] : Me[k];
        out.u = epick - L / 2;
        out.v = epick + L / 2;
        require(pre.average(out.u, out.v) <= mpick, "window average exceeds Mf(e)");
    }
    out.achieved =
        rat_min(eval_point(g, out.s), eval_point(g, out.t)) - pre.average(out.u, out.v);
    require(out.achieved >= var_orig / 4, "inside-case witness must give var/4");
    check_witness_geometry(out, x, y, L);
    return out;
}

}  // namespace

WitnessSUVT lemmsuvt_construct(const StepFunction& f, const Rational& x, const Rational& y,
                               const Rational& L, const std::vector<EssentialPeak>& peaks) {
    hyp(L > 0 && y - x == L, "interval (x,y) must have length L");
    hyp(!peaks.empty(), "non-empty peak system required");
    StepFunction g = absolute(f);
    PrefixIntegral pre(g);
    for (std::size_t i = 0; i < peaks.size(); ++i) {
        const Peak& pk = peaks[i].base;
        hyp(pk.p < pk.r && pk.r < pk.q && pk.mp < pk.mr && pk.mq < pk.mr, "not a peak");
        hyp(25 * L < peaks[i].omega && peaks[i].omega <= 50 * L, "omega outside (25L, 50L]");
        hyp(pre.average(pk.r - peaks[i].omega, pk.r + peaks[i].omega) == pk.mr,
            "omega window must attain Mf(r)");
        hyp(pk.r - peaks[i].omega < pk.p && pk.q < pk.r + peaks[i].omega,
            "omega window must reach beyond both peak feet");
        if (i > 0) hyp(peaks[i - 1].base.q <= pk.p, "peaks must interleave");
    }
    hyp(x <= peaks.front().base.r && peaks.back().base.r <= y, "peak tops must lie in [x,y]");
    Rational var_total = 0;
    for (const auto& ep : peaks) var_total += ep.base.var();

    SUVT got;
    if (peaks.size() == 1) {
        got = suvt_single(g, pre, x, y, L, peaks[0]);
    } else if (x <= peaks.front().base.p && peaks.back().base.q <= y) {
        got = suvt_inside(g, pre, x, y, L, peaks);
    } else {
        // split into (left-overhang, inside, right-overhang) and keep a third
        std::vector<EssentialPeak> inside, left, right;
        for (const auto& ep : peaks) {
            if (ep.base.p < x)
                left.push_back(ep);
            else if (ep.base.q <= y)
                inside.push_back(ep);
            else
                right.push_back(ep);
        }
        require(left.size() <= 1 && right.size() <= 1, "at most one peak may overhang each side");
        auto var_of = [](const std::vector<EssentialPeak>& v) {
            Rational s = 0;
            for (const auto& ep : v) s += ep.base.var();
            return s;
        };
        std::string sub;
        const std::vector<EssentialPeak>* chosen = nullptr;
        if (3 * var_of(left) >= var_total) {
            chosen = &left;
            sub = "III/P1";
        } else if (3 * var_of(inside) >= var_total) {
            chosen = &inside;
            sub = "III/P2";
        } else {
            require(3 * var_of(right) >= var_total, "one third must live in some subsystem");
            chosen = &right;
            sub = "III/P3";
        }
        if (chosen->size() == 1)
            got = suvt_single(g, pre, x, y, L, (*chosen)[0]);
        else
            got = suvt_inside(g, pre, x, y, L, *chosen);
        got.tag = sub + "+" + got.tag;
    }

    WitnessSUVT w;
    w.s = got.s;
    w.u = got.u;
    w.v = got.v;
    w.t = got.t;
    w.lambda = var_total / 12;
    w.achieved = got.achieved;
    w.L = L;
    w.k = 0;
    w.construction_case = got.tag;
    require(w.achieved >= w.lambda, "witness gap below var/12");
    return w;
}

ABWitness claimAB_split(const StepFunction& f, const WitnessSUVT& w) {
    const Rational& L = w.L;
    if (!(L > 0 && w.s < w.u && w.u < w.v && w.v < w.t))
        throw InvalidWitness("witness points out of order");
    if (!(w.u - w.s >= 4 * L && w.v - w.u >= L && w.t - w.v >= 4 * L))
        throw InvalidWitness("witness spacing violated");
    StepFunction g = absolute(f);
    PrefixIntegral pre(g);
    Rational minf = rat_min(eval_point(g, w.s), eval_point(g, w.t));
    Rational avg_uv = pre.average(w.u, w.v);
    if (!(minf - avg_uv >= w.lambda)) throw InvalidWitness("witness gap below lambda");

    Rational alpha = w.u - 3 * L, beta = w.u - 2 * L;
    Rational gamma = w.v + 2 * L, delta = w.v + 3 * L;
    Rational avg_ab = pre.average(alpha, beta);
    Rational avg_gd = pre.average(gamma, delta);
    Rational mid = (minf + avg_uv) / 2;

    ABWitness out;
    out.lambda = w.lambda;
    out.L = L;
    out.k = w.k;
    if (rat_min(avg_ab, avg_gd) >= mid) {
        out.tag = ABWitness::Tag::B;
        out.pts[0] = alpha;
        out.pts[1] = beta;
        out.pts[2] = w.u;
        out.pts[3] = w.v;
        out.pts[4] = gamma;
        out.pts[5] = delta;
        out.guarantee = rat_min(avg_ab, avg_gd) - avg_uv;
    } else {
        out.tag = ABWitness::Tag::A;
        out.pts[0] = w.s;
        out.pts[5] = w.t;
        if (avg_ab <= mid) {
            out.pts[1] = alpha;
            out.pts[2] = beta;
            out.pts[3] = w.u;
            out.pts[4] = w.v;
            out.guarantee = minf - rat_max(avg_ab, avg_uv);
        } else {
            out.pts[1] = w.u;
            out.pts[2] = w.v;
            out.pts[3] = gamma;
            out.pts[4] = delta;
            out.guarantee = minf - rat_max(avg_uv, avg_gd);
        }
        require(out.pts[3] - out.pts[2] == 2 * L, "A-witness needs an exact 2L middle gap");
    }
    for (int i = 1; i < 6; ++i)
        require(out.pts[i] - out.pts[i - 1] >= (out.tag == ABWitness::Tag::A && i == 3
                                                     ? 2 * L
                                                     : L),
                "A/B spacing");
    require(out.guarantee >= w.lambda / 2, "A/B guarantee below lambda/2");
    return out;
}

LambdaGrid dyadic_bucket(const StepFunction& f, const std::vector<EssentialPeak>& peaks) {
    if (peaks.empty()) throw EmptyInput("dyadic_bucket needs at least one essential peak");
    LambdaGrid grid;
    Rational max_omega = peaks[0].omega;
    for (const auto& ep : peaks) max_omega = rat_max(max_omega, ep.omega);
    grid.L0 = max_omega / 50;

    for (const auto& ep : peaks) {
        int n = 0;
        Rational Ln = grid.L0;
        while (!(ep.omega > 25 * Ln)) {
            Ln /= 2;
            ++n;
        }
        require(ep.omega <= 50 * Ln, "omega must land in (25 L_n, 50 L_n]");
        Integer k = rat_floor(ep.base.r / Ln);
        grid.entries[{n, k}].bucket.push_back(ep);
    }
    for (auto& [key, entry] : grid.entries) {
        std::sort(entry.bucket.begin(), entry.bucket.end(),
                  [](const EssentialPeak& a, const EssentialPeak& b) { return a.base.r < b.base.r; });
        Rational var_sum = 0;
        for (const auto& ep : entry.bucket) var_sum += ep.base.var();
        entry.lambda = var_sum / 12;
        Rational Ln = grid.Ln(key.first);
        Rational x = Rational(key.second) * Ln;
        WitnessSUVT w = lemmsuvt_construct(f, x, x + Ln, Ln, entry.bucket);
        w.k = key.second;
        require(w.achieved >= entry.lambda, "bucket witness below lambda");
        entry.witness = std::move(w);
    }
    return grid;
}

void keylemma_verify(const LambdaGrid& grid, const StepFunction& f, const Rational& rho,
                     ChainReport& report) {
    StepFunction g = absolute(f);
    PrefixIntegral pre(g);
    Rational Vg = variation(g);
    bool strict_paper_form = rho == 51;

    Rational lambda_sum = 0;
    Rational min_slack;
    bool have_slack = false;
    std::map<std::pair<int, int>, Rational> residue;
    for (const auto& [key, entry] : grid.entries) {
        if (!entry.witness) throw WitnessInvalid("grid entry lacks a witness");
        const WitnessSUVT& w = *entry.witness;
        Rational Ln = grid.Ln(key.first);
        Rational kL = Rational(key.second) * Ln;
        auto fail = [&](const char* what) {
            throw WitnessInvalid("entry (" + std::to_string(key.first) + "," + key.second.str() +
                                 "): " + what);
        };
        if (w.L != Ln) fail("scale mismatch");
        Rational slack;
        if (strict_paper_form) {
            if (!(kL - 50 * Ln <= w.s)) fail("s below (k-50)L");
            if (!(w.t <= kL + 51 * Ln)) fail("t above (k+51)L");
            if (!(w.u - w.s >= 4 * Ln)) fail("u - s < 4L");
            if (!(w.v - w.u >= Ln)) fail("v - u < L");
            if (!(w.t - w.v >= 4 * Ln)) fail("t - v < 4L");
            slack = rat_min(w.s - (kL - 50 * Ln),
                            rat_min(kL + 51 * Ln - w.t,
                                    rat_min(w.u - w.s - 4 * Ln,
                                            rat_min(w.v - w.u - Ln, w.t - w.v - 4 * Ln))));
        } else {
            if (!(kL - rho * Ln <= w.s)) fail("s below (k-rho)L");
            if (!(w.t <= kL + rho * Ln)) fail("t above (k+rho)L");
            if (!(w.u - w.s >= Ln && w.v - w.u >= Ln && w.t - w.v >= Ln)) fail("spacing below L");
            slack = rat_min(w.s - (kL - rho * Ln),
                            rat_min(kL + rho * Ln - w.t,
                                    rat_min(w.u - w.s - Ln,
                                            rat_min(w.v - w.u - Ln, w.t - w.v - Ln))));
        }
        Rational gap = rat_min(eval_point(g, w.s), eval_point(g, w.t)) - pre.average(w.u, w.v);
        if (!(gap >= entry.lambda)) fail("gap below lambda");
        if (!have_slack || slack < min_slack) min_slack = slack;
        have_slack = true;
        lambda_sum += entry.lambda;
        auto& acc = residue[{key.first % 10, static_cast<int>(mod_floor(key.second, 200))}];
        acc += entry.lambda;
    }

    report.stages.push_back(stage_ge("keylemma-window-hypotheses", have_slack ? min_slack : 0,
                                     Rational(0),
                                     "min slack over " + std::to_string(grid.entries.size()) +
                                         " witnesses"));
    report.stages.push_back(stage_le("keylemma-sum", lambda_sum, 20000 * Vg));
    Rational max_residue = 0;
    for (const auto& [cls, sum] : residue) max_residue = rat_max(max_residue, sum);
    report.stages.push_back(stage_le("residue-class-sums", max_residue, 10 * Vg,
                                     std::to_string(residue.size()) + " occupied classes"));
}

// ---------------------------------------------------------------------------
// Proposition machinery shared by the A and B sides.

namespace {

struct SubIntervalPick {
    Rational U2, V2;
    Integer k;
};

// Subinterval of (U,V) of length >= 5 L_n anchored at a grid line of the
// residue class K, whose average is <= (resp >=) the average over (U,V).
SubIntervalPick pick_subinterval(const PrefixIntegral& pre, const Rational& U, const Rational& V,
                                 const Rational& Ln, int K, bool want_low) {
    require(V - U > 210 * Ln, "interval too short to split");
    Integer gi = largest_cong_leq(U / Ln + 105, K);
    require(Rational(gi - 105) * Ln <= U && U < Rational(gi + 95) * Ln, "g-index window");
    Integer hi = smallest_cong_geq(V / Ln - 105, K);
    require(Rational(hi - 95) * Ln < V && V <= Rational(hi + 105) * Ln, "h-index window");
    require(gi < hi, "need two distinct grid anchors");

    // leftmost part whose average beats the global one (one always exists)
    Rational avg_all = pre.average(U, V);
    SubIntervalPick best;
    bool have = false;
    for (Integer k = gi; k <= hi && !have; k += 200) {
        Rational lo = k == gi ? U : Rational(k - 100) * Ln;
        Rational hi_pt = k == hi ? V : Rational(k + 100) * Ln;
        Rational avg = pre.average(lo, hi_pt);
        if (want_low ? avg <= avg_all : avg >= avg_all) {
            best = {lo, hi_pt, k};
            have = true;
        }
    }
    require(have, "a partition part must beat the global average");
    require(best.V2 - best.U2 >= 5 * Ln, "picked part too short");
    require(best.U2 == Rational(best.k - 100) * Ln || best.V2 == Rational(best.k + 100) * Ln,
            "picked part must touch its anchor line");
    require(Rational(best.k - 105) * Ln <= best.U2 && best.V2 <= Rational(best.k + 105) * Ln,
            "picked part strays from its anchor");
    return best;
}

// dist((c,d), ((l-50)L, (l+51)L)) >= L
bool perp(const Rational& c, const Rational& d, const Integer& l, const Rational& Ln) {
    return d <= Rational(l - 50) * Ln - Ln || c >= Rational(l + 51) * Ln + Ln;
}

}  // namespace

namespace {

struct AWitnessData {
    Integer k;
    Rational lambda;
    Rational s, t;
    Rational a0, b0;  // first candidate pair (alpha, beta)
    Rational a1, b1;  // second candidate pair (gamma, delta)
};

struct AScaleOutcome {
    std::vector<Rational> ys;
    std::vector<std::pair<Rational, Rational>> cd;
    Rational value;
};

Rational a_system_value(const StepFunction& g, const PrefixIntegral& pre,
                        const std::vector<Rational>& ys,
                        const std::vector<std::pair<Rational, Rational>>& cd) {
    Rational v = 0;
    for (std::size_t i = 0; i < cd.size(); ++i)
        v += eval_point(g, ys[i]) + eval_point(g, ys[i + 1]) -
             2 * pre.average(cd[i].first, cd[i].second);
    return v;
}

void a_check_spacing(const std::vector<Rational>& ys,
                     const std::vector<std::pair<Rational, Rational>>& cd, const Rational& Ln) {
    for (std::size_t i = 0; i < cd.size(); ++i) {
        require(cd[i].first - ys[i] >= Ln, "A-system spacing x->u");
        require(cd[i].second - cd[i].first >= Ln, "A-system interval width");
        require(ys[i + 1] - cd[i].second >= Ln, "A-system spacing v->x");
    }
}

}  // namespace

PropASystem propA_build(const StepFunction& f, int N, int K, const LambdaGrid& grid,
                        ChainReport& report) {
    StepFunction g = absolute(f);
    PrefixIntegral pre(g);
    Rational Vg = variation(g);

    std::map<int, std::vector<AWitnessData>> per_scale;
    Rational class_lambda_sum = 0;
    for (const auto& [key, entry] : grid.entries) {
        if (!entry.ab || entry.ab->tag != ABWitness::Tag::A) continue;
        if (key.first % 10 != N || mod_floor(key.second, 200) != K) continue;
        AWitnessData d;
        d.k = key.second;
        d.lambda = entry.lambda;
        d.s = entry.ab->pts[0];
        d.t = entry.ab->pts[5];
        d.a0 = entry.ab->pts[1];
        d.b0 = entry.ab->pts[2];
        d.a1 = entry.ab->pts[3];
        d.b1 = entry.ab->pts[4];
        per_scale[key.first].push_back(d);
        class_lambda_sum += d.lambda;
    }
    if (per_scale.empty()) throw ClassEmpty("no A-entries in this residue class");

    // base point: far left of every window in the class
    int n_first = per_scale.begin()->first;
    Rational L_first = grid.Ln(n_first);
    Rational far_left;
    bool have_far = false;
    for (const auto& [n, ws] : per_scale) {
        Rational Ln = grid.Ln(n);
        for (const auto& w : ws) {
            Rational lo = Rational(w.k - 50) * Ln;
            if (!have_far || lo < far_left) far_left = lo;
            have_far = true;
        }
    }
    std::vector<Rational> ys{far_left - 1000 * L_first};
    std::vector<std::pair<Rational, Rational>> cd;

    for (const auto& [n, witnesses] : per_scale) {
        Rational Ln = grid.Ln(n);
        Rational scale_lambda = 0;
        for (const auto& w : witnesses) scale_lambda += w.lambda;
        Rational old_value = a_system_value(g, pre, ys, cd);

        // per-k pair choice keeping clear of every current point
        std::map<Integer, std::pair<Rational, Rational>> pair_of;
        for (const auto& w : witnesses) {
            auto clear_of_points = [&](const Rational& a, const Rational& b) {
                for (const auto& yv : ys)
                    if (!(yv <= a - Ln || yv >= b + Ln)) return false;
                return true;
            };
            if (clear_of_points(w.a0, w.b0))
                pair_of[w.k] = {w.a0, w.b0};
            else {
                require(clear_of_points(w.a1, w.b1),
                        "one candidate pair must avoid all base points");
                pair_of[w.k] = {w.a1, w.b1};
            }
        }

        std::vector<Integer> class_ks;
        for (const auto& w : witnesses) class_ks.push_back(w.k);
        auto perp_all_but = [&](const Rational& c, const Rational& d, const Integer* skip) {
            for (const auto& l : class_ks) {
                if (skip && l == *skip) continue;
                if (!perp(c, d, l, Ln)) return false;
            }
            return true;
        };
        auto lookup = [&](const Integer& k) -> const AWitnessData& {
            for (const auto& w : witnesses)
                if (w.k == k) return w;
            throw ConstructionFailed("witness lookup failed");
        };

        // rebuild the system interval by interval
        std::vector<Rational> new_ys{ys[0]};
        std::vector<std::pair<Rational, Rational>> new_cd;
        std::set<Integer> used;
        for (std::size_t I = 0; I < cd.size(); ++I) {
            const Rational U = cd[I].first, V = cd[I].second;
            require(V - U >= 1024 * Ln, "previous-scale interval too short");
            auto pick = pick_subinterval(pre, U, V, Ln, K, /*want_low=*/true);
            Rational avg_UV = pre.average(U, V);
            bool is_class_k = std::find(class_ks.begin(), class_ks.end(), pick.k) != class_ks.end();
            if (!is_class_k) {
                require(pre.average(pick.U2, pick.V2) <= avg_UV, "case (i) average");
                require(perp_all_but(pick.U2, pick.V2, nullptr), "case (i) must avoid all windows");
                new_cd.push_back({pick.U2, pick.V2});
            } else {
                const AWitnessData& w = lookup(pick.k);
                const auto& [ak, bk] = pair_of[pick.k];
                Rational lam = w.lambda;
                if (pick.U2 == Rational(pick.k - 100) * Ln) {
                    Rational W = pick.U2 + (pick.V2 - pick.U2) / 5;
                    if (pre.average(W, pick.V2) <= avg_UV - lam / 10) {
                        require(perp_all_but(W, pick.V2, &pick.k), "case (ii) perp");
                        new_cd.push_back({W, pick.V2});
                        used.insert(pick.k);
                    } else {
                        require(pre.average(pick.U2, W) <=
                                    pre.average(pick.U2, pick.V2) + Rational(2, 5) * lam,
                                "one fifth-split side must be light");
                        require(w.s - W >= Ln && ak - w.s >= Ln, "case (iii) ordering");
                        require(eval_point(g, w.s) - pre.average(pick.U2, W) -
                                        pre.average(ak, bk) >=
                                    -avg_UV + lam / 10,
                                "case (iii) inequality");
                        require(perp_all_but(pick.U2, W, &pick.k) && perp_all_but(ak, bk, &pick.k),
                                "case (iii) perp");
                        new_cd.push_back({pick.U2, W});
                        new_ys.push_back(w.s);
                        new_cd.push_back({ak, bk});
                        used.insert(pick.k);
                    }
                } else {
                    Rational W = pick.V2 - (pick.V2 - pick.U2) / 5;
                    if (pre.average(pick.U2, W) <= avg_UV - lam / 10) {
                        require(perp_all_but(pick.U2, W, &pick.k), "case (ii) perp");
                        new_cd.push_back({pick.U2, W});
                        used.insert(pick.k);
                    } else {
                        require(pre.average(W, pick.V2) <=
                                    pre.average(pick.U2, pick.V2) + Rational(2, 5) * lam,
                                "one fifth-split side must be light");
                        require(W - w.t >= Ln && w.t - bk >= Ln, "case (iii) ordering");
                        require(eval_point(g, w.t) - pre.average(ak, bk) -
                                        pre.average(W, pick.V2) >=
                                    -avg_UV + lam / 10,
                                "case (iii) inequality");
                        require(perp_all_but(ak, bk, &pick.k) && perp_all_but(W, pick.V2, &pick.k),
                                "case (iii) perp");
                        new_cd.push_back({ak, bk});
                        new_ys.push_back(w.t);
                        new_cd.push_back({W, pick.V2});
                        used.insert(pick.k);
                    }
                }
            }
            new_ys.push_back(ys[I + 1]);
        }
        ys = std::move(new_ys);
        cd = std::move(new_cd);

        // absorb the remaining windows one at a time
        for (const auto& w : witnesses) {
            if (used.count(w.k)) continue;
            Rational Jlo = Rational(w.k - 50) * Ln;
            Rational Jhi = Rational(w.k + 51) * Ln;
            std::size_t iota = 0;
            for (const auto& [c, d] : cd) {
                require(d <= Jlo - Ln || c >= Jhi + Ln, "window must be clear of all intervals");
                if (d <= Jlo - Ln) ++iota;
            }
            const auto& [ak, bk] = pair_of[w.k];
            const Rational& yi = ys[iota];
            Rational y = (yi <= ak - Ln && eval_point(g, yi) >= eval_point(g, w.s)) ? yi : w.s;
            Rational yp = (yi >= bk + Ln && eval_point(g, yi) >= eval_point(g, w.t)) ? yi : w.t;
            bool left_end = iota == 0;
            bool right_end = iota + 1 == ys.size();
            Rational lhs = (left_end ? 1 : 2) * eval_point(g, y) - 2 * pre.average(ak, bk) +
                           (right_end ? 1 : 2) * eval_point(g, yp);
            Rational rhs = w.lambda / 5;
            if (!(left_end && right_end))
                rhs += ((left_end || right_end) ? 1 : 2) * eval_point(g, yi);
            require(lhs >= rhs, "insertion inequality");
            require(y < ak && bk < yp, "insertion ordering");
            ys[iota] = y;
            ys.insert(ys.begin() + iota + 1, yp);
            cd.insert(cd.begin() + iota, {ak, bk});
        }

        for (std::size_t i = 1; i < ys.size(); ++i) require(ys[i - 1] < ys[i], "points ordered");
        a_check_spacing(ys, cd, Ln);
        Rational new_value = a_system_value(g, pre, ys, cd);
        require(new_value >= old_value + scale_lambda / 5, "scale step must gain lambda/5");
    }

    PropASystem sys;
    sys.xs = ys;
    sys.uv = cd;
    sys.value = a_system_value(g, pre, ys, cd);

    std::string cls = "(" + std::to_string(N) + "," + std::to_string(K) + ")";
    report.stages.push_back(
        stage_ge("propA-fifth-sum" + cls, sys.value, class_lambda_sum / 5));

    // corollary: walk down into each interval and compare against Var f
    Rational chain = 0;
    for (std::size_t i = 0; i < sys.uv.size(); ++i) {
        Rational wpt = point_below_average(g, sys.uv[i].first, sys.uv[i].second);
        require(eval_point(g, wpt) <= pre.average(sys.uv[i].first, sys.uv[i].second),
                "interior point above average");
        chain += rat_abs(eval_point(g, wpt) - eval_point(g, sys.xs[i])) +
                 rat_abs(eval_point(g, sys.xs[i + 1]) - eval_point(g, wpt));
    }
    require(chain <= Vg, "finite system variation exceeds Var f");
    require(chain >= sys.value, "chain must dominate the system value");
    report.stages.push_back(stage_le("corollary-A" + cls, class_lambda_sum, 5 * Vg));
    return sys;
}

// ---------------------------------------------------------------------------
// B side: intervals take the role of points.

namespace {

struct BWitnessData {
    Integer k;
    Rational lambda;
    Rational alpha, beta, u, v, gamma, delta;
};

Rational b_system_value(const PrefixIntegral& pre,
                        const std::vector<std::pair<Rational, Rational>>& mn,
                        const std::vector<std::pair<Rational, Rational>>& cd) {
    Rational val = 0;
    for (std::size_t i = 0; i < cd.size(); ++i)
        val += pre.average(mn[i].first, mn[i].second) +
               pre.average(mn[i + 1].first, mn[i + 1].second) -
               2 * pre.average(cd[i].first, cd[i].second);
    return val;
}

}  // namespace

PropBSystem propB_build(const StepFunction& f, int N, int K, const LambdaGrid& grid,
                        ChainReport& report) {
    StepFunction g = absolute(f);
    PrefixIntegral pre(g);
    Rational Vg = variation(g);

    std::map<int, std::vector<BWitnessData>> per_scale;
    Rational class_lambda_sum = 0;
    for (const auto& [key, entry] : grid.entries) {
        if (!entry.ab || entry.ab->tag != ABWitness::Tag::B) continue;
        if (key.first % 10 != N || mod_floor(key.second, 200) != K) continue;
        BWitnessData d;
        d.k = key.second;
        d.lambda = entry.lambda;
        d.alpha = entry.ab->pts[0];
        d.beta = entry.ab->pts[1];
        d.u = entry.ab->pts[2];
        d.v = entry.ab->pts[3];
        d.gamma = entry.ab->pts[4];
        d.delta = entry.ab->pts[5];
        per_scale[key.first].push_back(d);
        class_lambda_sum += d.lambda;
    }
    if (per_scale.empty()) throw ClassEmpty("no B-entries in this residue class");

    std::vector<std::pair<Rational, Rational>> mn;  // the (mu, nu) intervals
    std::vector<std::pair<Rational, Rational>> cd;  // the (c, d) intervals

    bool first_scale = true;
    for (const auto& [n, witnesses] : per_scale) {
        Rational Ln = grid.Ln(n);
        Rational scale_lambda = 0;
        for (const auto& w : witnesses) scale_lambda += w.lambda;
        Rational old_value = b_system_value(pre, mn, cd);

        std::vector<Integer> class_ks;
        for (const auto& w : witnesses) class_ks.push_back(w.k);
        auto perp_all_but = [&](const Rational& c, const Rational& d, const Integer* skip) {
            for (const auto& l : class_ks) {
                if (skip && l == *skip) continue;
                if (!perp(c, d, l, Ln)) return false;
            }
            return true;
        };
        auto lookup = [&](const Integer& k) -> const BWitnessData& {
            for (const auto& w : witnesses)
                if (w.k == k) return w;
            throw ConstructionFailed("witness lookup failed");
        };

        std::vector<std::pair<Rational, Rational>> new_mn, new_cd;
        std::set<Integer> used;
        if (first_scale || mn.empty()) {
            // fresh seed interval far left of every window of this class
            Rational lo = Rational(witnesses.front().k - 50) * Ln;
            for (const auto& w : witnesses) lo = rat_min(lo, Rational(w.k - 50) * Ln);
            new_mn.push_back({lo - 3 * Ln, lo - 2 * Ln});
        } else {
            // replace every previous interval through the splitting claims
            for (std::size_t I = 0; I + 1 <= mn.size(); ++I) {
                const auto& [Phi, Psi] = mn[I];
                require(Psi - Phi >= 1024 * Ln, "previous-scale interval too short");
                bool strong = I == 0 || I + 1 == mn.size();
                auto pick = pick_subinterval(pre, Phi, Psi, Ln, K, /*want_low=*/false);
                Rational avg_PP = pre.average(Phi, Psi);
                bool is_class_k =
                    std::find(class_ks.begin(), class_ks.end(), pick.k) != class_ks.end();
                if (!is_class_k) {
                    require(pre.average(pick.U2, pick.V2) >= avg_PP, "case (i*) average");
                    require(perp_all_but(pick.U2, pick.V2, nullptr), "case (i*) perp");
                    new_mn.push_back({pick.U2, pick.V2});
                } else {
                    const BWitnessData& w = lookup(pick.k);
                    Rational lam = w.lambda;
                    Rational need = strong ? lam / 5 : lam / 10;
                    Rational slack = strong ? Rational(4, 5) * lam : Rational(2, 5) * lam;
                    if (pick.U2 == Rational(pick.k - 100) * Ln) {
                        Rational Theta = pick.U2 + (pick.V2 - pick.U2) / 5;
                        if (pre.average(Theta, pick.V2) >= avg_PP + need) {
                            require(perp_all_but(Theta, pick.V2, &pick.k), "case (ii*) perp");
                            new_mn.push_back({Theta, pick.V2});
                            used.insert(pick.k);
                        } else {
                            require(pre.average(pick.U2, Theta) >=
                                        pre.average(pick.U2, pick.V2) - slack,
                                    "fifth-split side must be heavy");
                            std::pair<Rational, Rational> mu_nu =
                                pre.average(pick.U2, Theta) >= pre.average(w.alpha, w.beta)
                                    ? std::make_pair(pick.U2, Theta)
                                    : std::make_pair(w.alpha, w.beta);
                            require(w.u - mu_nu.second >= Ln, "case (iii*) ordering");
                            Rational m1 = pre.average(mu_nu.first, mu_nu.second);
                            Rational mc = pre.average(w.u, w.v);
                            Rational m2 = pre.average(w.gamma, w.delta);
                            if (strong) {
                                require(m1 - 2 * mc + 2 * m2 >= avg_PP + need &&
                                            2 * m1 - 2 * mc + m2 >= avg_PP + need,
                                        "case (iii*) strong inequalities");
                            } else {
                                require(m1 - mc + m2 >= avg_PP + need,
                                        "case (iii*) inequality");
                            }
                            require(perp_all_but(mu_nu.first, mu_nu.second, &pick.k) &&
                                        perp_all_but(w.u, w.v, &pick.k) &&
                                        perp_all_but(w.gamma, w.delta, &pick.k),
                                    "case (iii*) perp");
                            new_mn.push_back(mu_nu);
                            new_cd.push_back({w.u, w.v});
                            new_mn.push_back({w.gamma, w.delta});
                            used.insert(pick.k);
                        }
                    } else {
                        Rational Theta = pick.V2 - (pick.V2 - pick.U2) / 5;
                        if (pre.average(pick.U2, Theta) >= avg_PP + need) {
                            require(perp_all_but(pick.U2, Theta, &pick.k), "case (ii*) perp");
                            new_mn.push_back({pick.U2, Theta});
                            used.insert(pick.k);
                        } else {
                            require(pre.average(Theta, pick.V2) >=
                                        pre.average(pick.U2, pick.V2) - slack,
                                    "fifth-split side must be heavy");
                            std::pair<Rational, Rational> mu_nu2 =
                                pre.average(Theta, pick.V2) >= pre.average(w.gamma, w.delta)
                                    ? std::make_pair(Theta, pick.V2)
                                    : std::make_pair(w.gamma, w.delta);
                            require(mu_nu2.first - w.v >= Ln, "case (iii*) ordering");
                            Rational m1 = pre.average(w.alpha, w.beta);
                            Rational mc = pre.average(w.u, w.v);
                            Rational m2 = pre.average(mu_nu2.first, mu_nu2.second);
                            if (strong) {
                                require(m1 - 2 * mc + 2 * m2 >= avg_PP + need &&
                                            2 * m1 - 2 * mc + m2 >= avg_PP + need,
                                        "case (iii*) strong inequalities");
                            } else {
                                require(m1 - mc + m2 >= avg_PP + need,
                                        "case (iii*) inequality");
                            }
                            require(perp_all_but(w.alpha, w.beta, &pick.k) &&
                                        perp_all_but(w.u, w.v, &pick.k) &&
                                        perp_all_but(mu_nu2.first, mu_nu2.second, &pick.k),
                                    "case (iii*) perp");
                            new_mn.push_back({w.alpha, w.beta});
                            new_cd.push_back({w.u, w.v});
                            new_mn.push_back(mu_nu2);
                            used.insert(pick.k);
                        }
                    }
                }
                if (I < cd.size()) {
                    const auto& [S, T] = cd[I];
                    require(T - S >= 1024 * Ln, "previous-scale gap interval too short");
                    auto spick = pick_subinterval(pre, S, T, Ln, K, /*want_low=*/true);
                    Rational avg_ST = pre.average(S, T);
                    bool sk = std::find(class_ks.begin(), class_ks.end(), spick.k) !=
                              class_ks.end();
                    if (!sk) {
                        require(pre.average(spick.U2, spick.V2) <= avg_ST, "case (i) average");
                        require(perp_all_but(spick.U2, spick.V2, nullptr), "case (i) perp");
                        new_cd.push_back({spick.U2, spick.V2});
                    } else {
                        const BWitnessData& w = lookup(spick.k);
                        Rational lam = w.lambda;
                        if (spick.U2 == Rational(spick.k - 100) * Ln) {
                            Rational W = spick.U2 + (spick.V2 - spick.U2) / 5;
                            if (pre.average(W, spick.V2) <= avg_ST - lam / 10) {
                                require(perp_all_but(W, spick.V2, &spick.k), "case (ii) perp");
                                new_cd.push_back({W, spick.V2});
                                used.insert(spick.k);
                            } else {
                                require(pre.average(spick.U2, W) <=
                                            pre.average(spick.U2, spick.V2) +
                                                Rational(2, 5) * lam,
                                        "fifth-split side must be light");
                                require(w.alpha - W >= Ln, "case (iii) ordering");
                                require(pre.average(w.alpha, w.beta) -
                                                pre.average(spick.U2, W) -
                                                pre.average(w.u, w.v) >=
                                            -avg_ST + lam / 10,
                                        "case (iii) inequality");
                                require(perp_all_but(spick.U2, W, &spick.k) &&
                                            perp_all_but(w.alpha, w.beta, &spick.k) &&
                                            perp_all_but(w.u, w.v, &spick.k),
                                        "case (iii) perp");
                                new_cd.push_back({spick.U2, W});
                                new_mn.push_back({w.alpha, w.beta});
                                new_cd.push_back({w.u, w.v});
                                used.insert(spick.k);
                            }
                        } else {
                            Rational W = spick.V2 - (spick.V2 - spick.U2) / 5;
                            if (pre.average(spick.U2, W) <= avg_ST - lam / 10) {
                                require(perp_all_but(spick.U2, W, &spick.k), "case (ii) perp");
                                new_cd.push_back({spick.U2, W});
                                used.insert(spick.k);
                            } else {
                                require(pre.average(W, spick.V2) <=
                                            pre.average(spick.U2, spick.V2) +
                                                Rational(2, 5) * lam,
                                        "fifth-split side must be light");
                                require(W - w.delta >= Ln, "case (iii) ordering");
                                require(pre.average(w.gamma, w.delta) -
                                                pre.average(w.u, w.v) -
                                                pre.average(W, spick.V2) >=
                                            -avg_ST + lam / 10,
                                        "case (iii) inequality");
                                require(perp_all_but(w.u, w.v, &spick.k) &&
                                            perp_all_but(w.gamma, w.delta, &spick.k) &&
                                            perp_all_but(W, spick.V2, &spick.k),
                                        "case (iii) perp");
                                new_cd.push_back({w.u, w.v});
                                new_mn.push_back({w.gamma, w.delta});
                                new_cd.push_back({W, spick.V2});
                                used.insert(spick.k);
                            }
                        }
                    }
                }
            }
        }
        mn = std::move(new_mn);
        cd = std::move(new_cd);
        first_scale = false;

        // absorb the remaining windows
        for (const auto& w : witnesses) {
            if (used.count(w.k)) continue;
            Rational Jlo = Rational(w.k - 50) * Ln;
            Rational Jhi = Rational(w.k + 51) * Ln;
            std::size_t iota = 0;
            for (const auto& [c, d] : cd) {
                require(d <= Jlo - Ln || c >= Jhi + Ln, "window must be clear of all gaps");
                if (d <= Jlo - Ln) ++iota;
            }
            const auto& mi = mn[iota];
            Rational avg_mi = pre.average(mi.first, mi.second);
            std::pair<Rational, Rational> left =
                (mi.second <= w.u - Ln && avg_mi >= pre.average(w.alpha, w.beta))
                    ? mi
                    : std::make_pair(w.alpha, w.beta);
            std::pair<Rational, Rational> right =
                (mi.first >= w.v + Ln && avg_mi >= pre.average(w.gamma, w.delta))
                    ? mi
                    : std::make_pair(w.gamma, w.delta);
            bool left_end = iota == 0;
            bool right_end = iota + 1 == mn.size();
            Rational lhs = (left_end ? 1 : 2) * pre.average(left.first, left.second) -
                           2 * pre.average(w.u, w.v) +
                           (right_end ? 1 : 2) * pre.average(right.first, right.second);
            Rational rhs = w.lambda / 5;
            if (!(left_end && right_end)) rhs += ((left_end || right_end) ? 1 : 2) * avg_mi;
            require(lhs >= rhs, "insertion inequality");
            require(left.second < w.u && w.v < right.first, "insertion ordering");
            mn[iota] = left;
            mn.insert(mn.begin() + iota + 1, right);
            cd.insert(cd.begin() + iota, {w.u, w.v});
        }

        // interleaving and spacing
        for (std::size_t i = 0; i < cd.size(); ++i) {
            require(mn[i].second < cd[i].first && cd[i].second < mn[i + 1].first, "interleave");
            require(cd[i].first - mn[i].second >= Ln && mn[i + 1].first - cd[i].second >= Ln,
                    "B-system spacing");
        }
        for (const auto& [a, b] : mn) require(b - a >= Ln, "mu-nu width");
        for (const auto& [a, b] : cd) require(b - a >= Ln, "c-d width");
        Rational new_value = b_system_value(pre, mn, cd);
        require(new_value >= old_value + scale_lambda / 5, "scale step must gain lambda/5");
    }

    PropBSystem sys;
    sys.phipsi = mn;
    sys.st = cd;
    sys.value = b_system_value(pre, mn, cd);

    std::string cls = "(" + std::to_string(N) + "," + std::to_string(K) + ")";
    report.stages.push_back(stage_ge("propB-fifth-sum" + cls, sys.value, class_lambda_sum / 5));

    Rational chain = 0;
    for (std::size_t i = 0; i < sys.st.size(); ++i) {
        Rational z = point_below_average(g, sys.st[i].first, sys.st[i].second);
        Rational th1 = point_above_average(g, sys.phipsi[i].first, sys.phipsi[i].second);
        Rational th2 = point_above_average(g, sys.phipsi[i + 1].first, sys.phipsi[i + 1].second);
        chain += rat_abs(eval_point(g, z) - eval_point(g, th1)) +
                 rat_abs(eval_point(g, th2) - eval_point(g, z));
    }
    require(chain <= Vg, "finite system variation exceeds Var f");
    require(chain >= sys.value, "chain must dominate the system value");
    report.stages.push_back(stage_le("corollary-B" + cls, class_lambda_sum, 5 * Vg));
    return sys;
}

// ---------------------------------------------------------------------------

std::vector<Rational> default_trace_points(const StepFunction& f) {
    Envelope env = centered_envelope(f);
    std::vector<Rational> pts;
    for (const auto& eb : env.boundaries)
        if (eb.at.is_rational()) pts.push_back(eb.at.rational());
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.empty()) return {Rational(0), Rational(1)};
    std::vector<Rational> out;
    out.push_back(pts.front() - 1);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        out.push_back(pts[i]);
        if (i + 1 < pts.size()) out.push_back((pts[i] + pts[i + 1]) / 2);
    }
    out.push_back(pts.back() + 1);
    return out;
}

ChainReport theorem_trace(const StepFunction& f, const std::vector<Rational>& sample_points) {
    StepFunction g = absolute(f);
    Rational Vg = variation(g);
    Rational Vf = variation(f);
    require(Vg <= Vf, "variation may not grow under absolute value");

    ChainReport rep;
    rep.var_f = Vg;

    std::vector<Rational> pts = sample_points;
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    std::vector<MPoint> samples;
    samples.reserve(pts.size());
    for (const auto& x : pts) samples.push_back({x, centered_max(g, x).value});

    PeakExtraction ex = extract_peaks(samples);
    rep.sum_abs_dM = ex.total_abs_delta;
    {
        Rational recon = ex.boundary_left + ex.boundary_right;
        for (const auto& pk : ex.peaks) recon += pk.var();
        StageRecord s = stage_le("peak-extraction-identity", rat_abs(recon - ex.total_abs_delta),
                                 Rational(0), "boundary terms + peak variations reproduce the sum");
        rep.stages.push_back(std::move(s));
    }
    rep.stages.push_back(stage_le("boundary-left", ex.boundary_left, Vg));
    rep.stages.push_back(stage_le("boundary-right", ex.boundary_right, Vg));

    EssentialSplit split = essential_filter(g, ex.peaks);

    // quarter-test and omega-window margins
    {
        bool have = false;
        Rational min_quarter = 0, min_window = 0;
        for (const auto& ep : split.essential) {
            Rational quarter =
                (ep.base.mr - ep.base.var() / 4) - sup_on(g, ep.base.p, ep.base.q);
            Rational window = rat_min(ep.base.p - (ep.base.r - ep.omega),
                                      (ep.base.r + ep.omega) - ep.base.q);
            if (!have) {
                min_quarter = quarter;
                min_window = window;
                have = true;
            } else {
                min_quarter = rat_min(min_quarter, quarter);
                min_window = rat_min(min_window, window);
            }
        }
        rep.stages.push_back(stage_ge("essential-quarter-test", have ? min_quarter : Rational(0),
                                      Rational(0),
                                      std::to_string(split.essential.size()) + " essential peaks"));
        rep.stages.push_back(stage_ge("essential-omega-window", have ? min_window : Rational(0),
                                      Rational(0)));
    }

    // non-essential bound via nearby low points
    {
        Rational sum_ne = 0;
        for (const auto& np : split.non_essential) sum_ne += np.base.var();
        if (!split.non_essential.empty()) {
            // valley points of the alternating system, with their M values
            std::vector<std::pair<Rational, Rational>> valleys;  // (a_i, M(a_i))
            for (std::size_t i = 0; i < ex.peaks.size(); ++i) {
                if (i == 0) valleys.push_back({ex.peaks[i].p, ex.peaks[i].mp});
                valleys.push_back({ex.peaks[i].q, ex.peaks[i].mq});
            }
            // separation: half the least gap between consecutive valleys,
            // witnesses, and the nearest breakpoint on the chosen side
            Rational eps = 1;
            auto shrink = [&eps](const Rational& gap) {
                if (gap > 0 && gap < eps) eps = gap;
            };
            for (std::size_t i = 1; i < valleys.size(); ++i)
                shrink(valleys[i].first - valleys[i - 1].first);
            for (const auto& np : split.non_essential) {
                shrink(rat_abs(np.witness_x - np.base.p));
                shrink(rat_abs(np.base.q - np.witness_x));
            }
            for (const auto& [a, ma] : valleys)
                for (const auto& b : g.breakpoints) shrink(rat_abs(b - a));
            Rational delta = eps / 2;

            std::vector<std::pair<Rational, Rational>> chain_pts;  // (x, f-value)
            std::map<Rational, Rational> y_at;                     // valley -> y point
            for (const auto& [a, ma] : valleys) {
                auto [vl, vr] = side_limits(g, a);
                Rational y = vl <= vr ? a - delta : a + delta;
                require(eval_point(g, y) <= ma, "valley witness must sit below M");
                y_at[a] = y;
                chain_pts.push_back({y, eval_point(g, y)});
            }
            Rational per_peak_sum = 0;
            for (const auto& np : split.non_essential) {
                Rational fx = eval_point(g, np.witness_x);
                Rational y1 = y_at.at(np.base.p), y2 = y_at.at(np.base.q);
                Rational lhs = (fx - eval_point(g, y1)) + (fx - eval_point(g, y2));
                require(lhs >= np.base.var() / 2, "per-peak non-essential inequality");
                per_peak_sum += lhs;
                chain_pts.push_back({np.witness_x, fx});
            }
            std::sort(chain_pts.begin(), chain_pts.end());
            Rational chain = 0;
            for (std::size_t i = 1; i < chain_pts.size(); ++i)
                chain += rat_abs(chain_pts[i].second - chain_pts[i - 1].second);
            require(chain <= Vg, "finite system variation exceeds Var f");
            require(2 * chain >= sum_ne, "chain must certify the non-essential bound");
        }
        rep.stages.push_back(stage_le("non-essential-bound", sum_ne, 2 * Vg));
    }

    Rational lambda_total = 0;
    Rational var_essential = 0;
    for (const auto& ep : split.essential) var_essential += ep.base.var();
    if (!split.essential.empty()) {
        LambdaGrid grid = dyadic_bucket(g, split.essential);
        {
            bool have = false;
            Rational min_gap = 0;
            for (const auto& [key, entry] : grid.entries) {
                Rational gap = entry.witness->achieved - entry.lambda;
                min_gap = have ? rat_min(min_gap, gap) : gap;
                have = true;
                lambda_total += entry.lambda;
            }
            rep.stages.push_back(stage_ge("suvt-witness-gap", min_gap, Rational(0),
                                          std::to_string(grid.entries.size()) + " buckets"));
        }
        {
            bool have = false;
            Rational min_gap = 0;
            for (auto& [key, entry] : grid.entries) {
                ABWitness ab = claimAB_split(g, *entry.witness);
                Rational gap = ab.guarantee - entry.lambda / 2;
                min_gap = have ? rat_min(min_gap, gap) : gap;
                have = true;
                entry.ab = std::move(ab);
            }
            rep.stages.push_back(stage_ge("claimAB-guarantee", min_gap, Rational(0)));
        }
        keylemma_verify(grid, g, Rational(51), rep);

        std::set<std::pair<int, int>> a_classes, b_classes;
        for (const auto& [key, entry] : grid.entries) {
            std::pair<int, int> cls{key.first % 10,
                                    static_cast<int>(mod_floor(key.second, 200))};
            if (entry.ab->tag == ABWitness::Tag::A)
                a_classes.insert(cls);
            else
                b_classes.insert(cls);
        }
        for (const auto& [N, K] : a_classes) propA_build(g, N, K, grid, rep);
        for (const auto& [N, K] : b_classes) propB_build(g, N, K, grid, rep);

        require(var_essential == 12 * lambda_total, "lambda bookkeeping");
    }
    rep.stages.push_back(stage_le("essential-bound", var_essential, 240000 * Vg));
    rep.stages.push_back(stage_le("theorem-total", rep.sum_abs_dM, 240004 * Vf));
    return rep;
}

}  // namespace maxvar

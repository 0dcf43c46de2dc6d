#include "maxvar/search.hpp"

#include "maxvar/envelope.hpp"

#include <algorithm>
#include <sstream>

namespace maxvar {

namespace {

// splitmix64: tiny, fully specified, identical on every platform
struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        state += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    std::uint64_t below(std::uint64_t n) { return next() % n; }
};

Rational random_value(SplitMix64& rng, int value_den) {
    Integer num(static_cast<long>(rng.below(4 * value_den + 1)));
    Integer den(static_cast<long>(rng.below(value_den) + 1));
    return make_rational(num, den);
}

Rational random_breakpoint(SplitMix64& rng, int break_den) {
    long span = 8 * break_den;
    Integer num(static_cast<long>(rng.below(2 * span + 1)) - span);
    Integer den(static_cast<long>(rng.below(break_den) + 1));
    return make_rational(num, den);
}

StepFunction random_step(SplitMix64& rng, const SearchConfig& cfg) {
    int pieces = 2 + static_cast<int>(rng.below(std::max(1, cfg.max_pieces - 1)));
    std::vector<Rational> bps;
    while (static_cast<int>(bps.size()) + 1 < pieces) {
        Rational b = random_breakpoint(rng, cfg.break_den);
        if (std::find(bps.begin(), bps.end(), b) == bps.end()) bps.push_back(b);
    }
    std::sort(bps.begin(), bps.end());
    std::vector<Rational> vals;
    for (std::size_t i = 0; i <= bps.size(); ++i) vals.push_back(random_value(rng, cfg.value_den));
    return make_step(std::move(bps), std::move(vals));
}

StepFunction perturb(SplitMix64& rng, const SearchConfig& cfg, const StepFunction& f) {
    for (int attempt = 0; attempt < 16; ++attempt) {
        std::vector<Rational> bps = f.breakpoints;
        std::vector<Rational> vals = f.values;
        switch (rng.below(4)) {
            case 0: {  // move one breakpoint
                if (bps.empty()) continue;
                std::size_t i = rng.below(bps.size());
                bps[i] = random_breakpoint(rng, cfg.break_den);
                break;
            }
            case 1: {  // change one value
                std::size_t i = rng.below(vals.size());
                vals[i] = random_value(rng, cfg.value_den);
                break;
            }
            case 2: {  // split a piece
                if (static_cast<int>(vals.size()) >= cfg.max_pieces) continue;
                Rational b = random_breakpoint(rng, cfg.break_den);
                auto it = std::upper_bound(bps.begin(), bps.end(), b);
                std::size_t pos = static_cast<std::size_t>(it - bps.begin());
                bps.insert(it, b);
                vals.insert(vals.begin() + pos + 1, random_value(rng, cfg.value_den));
                break;
            }
            default: {  // merge two pieces
                if (bps.empty()) continue;
                std::size_t i = rng.below(bps.size());
                bps.erase(bps.begin() + i);
                vals.erase(vals.begin() + i + 1);
                break;
            }
        }
        std::sort(bps.begin(), bps.end());
        bool distinct = true;
        for (std::size_t i = 1; i < bps.size(); ++i)
            if (bps[i - 1] == bps[i]) distinct = false;
        if (!distinct) continue;
        StepFunction g = make_step(std::move(bps), std::move(vals));
        if (!g.breakpoints.empty()) return g;
    }
    return f;
}

// certified ratio_lo, plus the two theorem checks on the way
std::optional<Rational> evaluate(const SearchConfig& cfg, const StepFunction& f) {
    Rational var_f = variation(f);
    if (var_f == 0) return std::nullopt;
    VariationEnclosure c = variation_enclosure(centered_envelope(f), cfg.eps);
    if (!(c.hi <= 240004 * var_f))
        throw InternalCheckFailed("centered variation bound violated by a candidate");
    VariationEnclosure nc = variation_enclosure(noncentered_envelope(f), cfg.eps);
    if (!(nc.hi <= var_f))
        throw InternalCheckFailed("non-centered variation bound violated by a candidate");
    return c.lo / var_f;
}

SearchResult sweep_mode(const SearchConfig& cfg) {
    DiscreteSweepResult sw = discrete_sweep(cfg.max_pieces, cfg.value_den);
    SearchResult res;
    res.best_ratio_lo = sw.best_ratio;
    res.argmax_signal = sw.argmax;
    res.evaluated = sw.signals_tested;
    res.skipped = sw.signals_skipped;
    res.history.push_back({0, sw.best_ratio, static_cast<int>(sw.argmax.vals.size())});
    return res;
}

}  // namespace

SearchResult search_ratio(const SearchConfig& cfg) {
    if (cfg.iterations <= 0 || cfg.max_pieces < 1 || cfg.value_den < 1 || cfg.break_den < 1 ||
        !(cfg.eps > 0))
        throw ConfigInvalid("search configuration out of range");
    if (cfg.mode == SearchConfig::Mode::ExhaustiveDiscrete) return sweep_mode(cfg);

    SplitMix64 rng(cfg.seed);
    SearchResult res;
    res.best_ratio_lo = 0;

    // unit bump as the seed candidate
    StepFunction current = make_step({Rational(0), Rational(1)},
                                     {Rational(0), Rational(1), Rational(0)});
    std::optional<Rational> current_ratio = evaluate(cfg, current);
    ++res.evaluated;
    if (current_ratio) {
        res.best_ratio_lo = *current_ratio;
        res.argmax = current;
    }

    for (int it = 1; it <= cfg.iterations; ++it) {
        StepFunction cand = cfg.mode == SearchConfig::Mode::Random ? random_step(rng, cfg)
                                                                   : perturb(rng, cfg, current);
        std::optional<Rational> ratio = evaluate(cfg, cand);
        ++res.evaluated;
        if (!ratio) {
            ++res.skipped;
        } else {
            bool accept;
            if (cfg.mode == SearchConfig::Mode::Random) {
                accept = true;
            } else if (!current_ratio || *ratio >= *current_ratio) {
                accept = true;
            } else {
                // linear cooling: integer-only lottery for worse moves
                std::uint64_t threshold = 500 - (500ull * static_cast<std::uint64_t>(it)) /
                                                    (static_cast<std::uint64_t>(cfg.iterations) + 1);
                accept = rng.below(1000) < threshold;
            }
            if (accept && cfg.mode == SearchConfig::Mode::Anneal) {
                current = cand;
                current_ratio = ratio;
            }
            if (*ratio > res.best_ratio_lo) {
                res.best_ratio_lo = *ratio;
                res.argmax = cand;
            }
        }
        res.history.push_back(
            {it, res.best_ratio_lo,
             static_cast<int>(res.argmax ? res.argmax->piece_count() : 0)});
    }
    if (!(res.best_ratio_lo <= 240004))
        throw InternalCheckFailed("best ratio exceeds the theorem constant");
    return res;
}

std::string history_csv(const SearchResult& res) {
    std::ostringstream out;
    out << "iteration,ratio_lo,pieces\n";
    for (const auto& h : res.history)
        out << h.iteration << "," << rat_str(h.ratio_lo) << "," << h.pieces << "\n";
    return out.str();
}

}  // namespace maxvar

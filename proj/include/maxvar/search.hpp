#ifndef MAXVAR_SEARCH_HPP
#define MAXVAR_SEARCH_HPP

#include "maxvar/discrete.hpp"
#include "maxvar/stepfn.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace maxvar {

struct SearchConfig {
    std::uint64_t seed = 42;
    int iterations = 100;
    int max_pieces = 6;
    // value grid: numerators 0 .. 4*value_den over denominators 1 .. value_den
    int value_den = 8;
    int break_den = 8;
    Rational eps = Rational(1, 1000);
    enum class Mode { Anneal, ExhaustiveDiscrete, Random } mode = Mode::Anneal;
};

struct HistoryEntry {
    int iteration = 0;
    Rational ratio_lo;
    int pieces = 0;
};

struct SearchResult {
    Rational best_ratio_lo;
    std::optional<StepFunction> argmax;
    std::optional<DiscreteSignal> argmax_signal;  // exhaustive-discrete mode
    std::vector<HistoryEntry> history;
    long evaluated = 0;
    long skipped = 0;  // zero-variation candidates
};

// Maximises a certified lower bound on Var Mf / Var f.  Deterministic for a
// fixed config; every candidate is also checked against the non-centered
// bound Var M~f <= Var f and the centered bound with the large constant, and
// a violation of either aborts the run (it would mean an implementation bug).
SearchResult search_ratio(const SearchConfig& cfg);

std::string history_csv(const SearchResult& res);

}  // namespace maxvar

#endif

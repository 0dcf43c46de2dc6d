#include "maxvar/discrete.hpp"

namespace maxvar {

Rational DiscreteSignal::at(long n) const {
    if (vals.empty()) return n < lo ? left : right;
    if (n < lo) return left;
    if (n >= lo + static_cast<long>(vals.size())) return right;
    return vals[static_cast<std::size_t>(n - lo)];
}

DiscreteSignal make_discrete(const std::map<long, Rational>& support, const Rational& left,
                             const Rational& right) {
    DiscreteSignal s;
    s.left = left;
    s.right = right;
    if (support.empty()) return s;
    long expected = support.begin()->first;
    for (const auto& [n, v] : support) {
        if (n != expected++) throw InvalidSignal("support keys must form a contiguous range");
    }
    s.lo = support.begin()->first;
    for (const auto& [n, v] : support) s.vals.push_back(v);
    // trim canonical form
    std::size_t a = 0, b = s.vals.size();
    while (a < b && s.vals[a] == s.left) ++a;
    while (b > a && s.vals[b - 1] == s.right) --b;
    s.lo += static_cast<long>(a);
    s.vals = std::vector<Rational>(s.vals.begin() + a, s.vals.begin() + b);
    if (s.vals.empty()) s.lo = 0;
    return s;
}

namespace {

DiscreteSignal abs_signal(const DiscreteSignal& f) {
    DiscreteSignal g;
    g.lo = f.lo;
    g.left = rat_abs(f.left);
    g.right = rat_abs(f.right);
    for (const auto& v : f.vals) g.vals.push_back(rat_abs(v));
    return g;
}

}  // namespace

Rational discrete_max_at(const DiscreteSignal& f, long n) {
    DiscreteSignal g = abs_signal(f);
    Rational tail_mean = (g.left + g.right) / 2;
    if (g.vals.empty()) {
        // two-level signal: averages drift monotonically from the own tail
        // value toward the two-tail mean
        return rat_max(g.at(n), tail_mean);
    }
    long hi = g.lo + static_cast<long>(g.vals.size()) - 1;
    long rcover = std::max(0L, std::max(n - g.lo, hi - n));
    Rational best = g.at(n);
    Rational window_sum = g.at(n);
    for (long r = 1; r <= rcover; ++r) {
        window_sum += g.at(n - r) + g.at(n + r);
        Rational avg = window_sum / (2 * r + 1);
        if (avg > best) best = avg;
    }
    // beyond rcover the averages drift monotonically toward the tail mean
    return rat_max(best, tail_mean);
}

DiscreteSignal discrete_max(const DiscreteSignal& f) {
    DiscreteSignal g = abs_signal(f);
    Rational tail_mean = (g.left + g.right) / 2;
    DiscreteSignal out;
    out.left = rat_max(g.left, tail_mean);
    out.right = rat_max(g.right, tail_mean);
    if (g.vals.empty()) {
        out.lo = 0;
        return out;
    }
    long lo = g.lo - 1;
    long hi = g.lo + static_cast<long>(g.vals.size());
    std::map<long, Rational> window;
    for (long n = lo; n <= hi; ++n) window[n] = discrete_max_at(g, n);
    return make_discrete(window, out.left, out.right);
}

Rational discrete_variation(const DiscreteSignal& f) {
    if (f.vals.empty()) return rat_abs(f.right - f.left);
    Rational total = rat_abs(f.vals.front() - f.left);
    for (std::size_t i = 1; i < f.vals.size(); ++i)
        total += rat_abs(f.vals[i] - f.vals[i - 1]);
    total += rat_abs(f.right - f.vals.back());
    return total;
}

DiscreteSweepResult discrete_sweep(int max_index, int value_max) {
    if (max_index < 0 || value_max < 0) throw ConfigInvalid("sweep bounds must be nonnegative");
    DiscreteSweepResult res;
    res.best_ratio = 0;
    const long positions = max_index + 1;
    const long radix = value_max + 1;
    long total = 1;
    for (long i = 0; i < positions; ++i) total *= radix;

    for (long code = 0; code < total; ++code) {
        std::map<long, Rational> support;
        long c = code;
        for (long i = 0; i < positions; ++i) {
            support[i] = Rational(c % radix);
            c /= radix;
        }
        DiscreteSignal f = make_discrete(support, Rational(0), Rational(0));
        Rational var_f = discrete_variation(f);
        ++res.signals_tested;
        if (var_f == 0) {
            ++res.signals_skipped;
            continue;
        }
        Rational var_m = discrete_variation(discrete_max(f));
        Rational ratio = var_m / var_f;
        if (ratio > res.best_ratio) {
            res.best_ratio = ratio;
            res.argmax = f;
        }
    }
    return res;
}

}  // namespace maxvar

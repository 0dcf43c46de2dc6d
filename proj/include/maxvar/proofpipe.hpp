#ifndef MAXVAR_PROOFPIPE_HPP
#define MAXVAR_PROOFPIPE_HPP

#include "maxvar/stepfn.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace maxvar {

// Three points p < r < q where the maximal function rises in the middle.
struct Peak {
    Rational p, r, q;
    Rational mp, mr, mq;  // maximal-function values at p, r, q
    Rational var() const { return (mr - mp) + (mr - mq); }
};

struct EssentialPeak {
    Peak base;
    Rational omega;  // largest window radius attaining mr at r
};

struct NonEssentialPeak {
    Peak base;
    Rational witness_x;  // point in (p,q) with f(witness_x) >= mr - var/4
};

// Alternating skeleton extracted from sample values of the maximal function.
struct PeakExtraction {
    std::vector<Peak> peaks;
    Rational boundary_left;   // M(b0) - M(a1) >= 0
    Rational boundary_right;  // M(b_{sigma+1}) - M(a_{sigma+1}) >= 0
    Rational total_abs_delta;
};

struct EssentialSplit {
    std::vector<EssentialPeak> essential;
    std::vector<NonEssentialPeak> non_essential;
};

// Point/interval/point witness with dyadic spacing.
struct WitnessSUVT {
    Rational s, u, v, t;
    Rational lambda;   // guaranteed gap min{f(s),f(t)} - avg(u,v)
    Rational achieved; // the exact gap realised by this witness
    Rational L;        // scale
    Integer k;         // anchor: (k-50)L <= s, t <= (k+51)L
    std::string construction_case;
};

struct ABWitness {
    enum class Tag { A, B };
    Tag tag = Tag::A;
    // A: s < alpha < beta < gamma < delta < t
    // B: alpha < beta < u < v < gamma < delta
    Rational pts[6];
    Rational guarantee;  // >= lambda / 2
    Rational lambda;
    Rational L;
    Integer k;
};

struct GridEntry {
    Rational lambda;
    std::vector<EssentialPeak> bucket;
    std::optional<WitnessSUVT> witness;
    std::optional<ABWitness> ab;
};

// Dyadic array: scale index n >= 0 (L_n = 2^{-n} L0) and position k.
struct LambdaGrid {
    Rational L0;
    std::map<std::pair<int, Integer>, GridEntry> entries;

    Rational Ln(int n) const { return L0 * rat_pow2(-static_cast<long>(n)); }
};

struct StageRecord {
    std::string stage;
    Rational required;  // bound that must dominate (or equal) `achieved`
    Rational achieved;
    Rational margin;  // >= 0 on success
    bool ok = false;
    std::string note;
};

struct ChainReport {
    std::vector<StageRecord> stages;
    Rational var_f;       // variation of |f|
    Rational sum_abs_dM;  // sum of |M(x_{j+1}) - M(x_j)| over the samples
    bool all_ok() const;
};

// --- operations ----------------------------------------------------------

struct MPoint {
    Rational x;
    Rational m;
};

// Collapse sampled (x, Mf(x)) pairs into the alternating peak system; the
// boundary terms plus the peak variations reproduce the |delta| sum exactly.
PeakExtraction extract_peaks(const std::vector<MPoint>& samples);

EssentialSplit essential_filter(const StepFunction& f, const std::vector<Peak>& peaks);

// Witness point t in (2p-(r-omega), r+omega) with f(t) >= Mf(r) and the
// slope lower bound; hypotheses are checked exactly.
Rational lemm0_witness(const StepFunction& f, const Rational& r, const Rational& omega,
                       const Rational& p);

// Point/interval/point witness for an interleaved system of essential peaks
// over an interval (x,y) of length L with window radii in (25L, 50L].
WitnessSUVT lemmsuvt_construct(const StepFunction& f, const Rational& x, const Rational& y,
                               const Rational& L, const std::vector<EssentialPeak>& peaks);

ABWitness claimAB_split(const StepFunction& f, const WitnessSUVT& w);

LambdaGrid dyadic_bucket(const StepFunction& f, const std::vector<EssentialPeak>& peaks);

// Hypothesis audit for every grid witness plus the grand and residue-class
// sums; rho = 51 checks the asymmetric window spacing used by the dyadic
// construction, smaller rho checks the symmetric generalised form.
void keylemma_verify(const LambdaGrid& grid, const StepFunction& f, const Rational& rho,
                     ChainReport& report);

struct PropASystem {
    std::vector<Rational> xs;                          // m+1 points
    std::vector<std::pair<Rational, Rational>> uv;     // m intervals
    Rational value;                                    // sum f(x_i)+f(x_{i+1})-2 avg(u_i,v_i)
};

struct PropBSystem {
    std::vector<std::pair<Rational, Rational>> phipsi;  // m+1 intervals
    std::vector<std::pair<Rational, Rational>> st;      // m intervals
    Rational value;  // sum avg(phi_i,psi_i)+avg(phi_{i+1},psi_{i+1})-2 avg(s_i,t_i)
};

PropASystem propA_build(const StepFunction& f, int N, int K, const LambdaGrid& grid,
                        ChainReport& report);
PropBSystem propB_build(const StepFunction& f, int N, int K, const LambdaGrid& grid,
                        ChainReport& report);

// Full verification chain on the sample points; throws only on internal
// contradictions (a stage whose success the construction guarantees).
ChainReport theorem_trace(const StepFunction& f, const std::vector<Rational>& sample_points);

// Sample points used by default: rational envelope boundaries plus midpoints
// of the gaps between them (and one point in each unbounded tail).
std::vector<Rational> default_trace_points(const StepFunction& f);

}  // namespace maxvar

#endif

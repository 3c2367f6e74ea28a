#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "saddleperm/perm_test.hpp"

namespace saddleperm {

enum class OracleStatistic { Lambda, KruskalWallis, AnovaSS, Quadratic };

std::string to_string(OracleStatistic s);

// Ground-truth tail probability of a permutation statistic.
struct PermutationOutcome {
    double tail_prob = 0.0;
    long replicates = 0;            // Monte Carlo mode
    bool exact = false;
    std::uint64_t total_arrangements = 0;  // exact mode
    std::uint64_t tail_count = 0;          // exact mode numerator
    double se = 0.0;                // binomial standard error (MC mode)
    double threshold = 0.0;
    OracleStatistic statistic = OracleStatistic::Lambda;
    long boundary_count = 0;        // non-convergent Lambda solves, tallied as tail
};

// Classical comparison statistics on standardized scores:
//   KruskalWallis: (N-1)/N * sum_i n_i xbar_i^2  (the standard statistic,
//                  including the tie correction, on standardized rank scores)
//   AnovaSS:       sum_i n_i (xbar_i - xbar)^2   (between-group sum of squares)
//   Quadratic:     x1^T x1 with x1 = S_1/N on whitened two-sample scores
double classical_statistic(OracleStatistic kind, const ScoreSet& scores,
                           const GroupDesign& design, const std::vector<int>& assignment);

// Fraction of R random permutations whose statistic reaches the threshold.
// Replicate l shuffles with the stream (seed, permutation, l); tallies are
// integer counts, so the result is bitwise identical for any worker count.
// Lambda solves that fail to converge sit on the feasibility boundary where
// Lambda is maximal; they count as tail events and are also reported in
// boundary_count.
PermutationOutcome mc_tail(const TiltingModel& model, OracleStatistic statistic,
                           double threshold, long replicates, std::uint64_t seed,
                           int workers = 1);

// Table variant: the statistic is computed once per permutation and tallied
// against every threshold, so all cells share one permutation set.
std::vector<PermutationOutcome> mc_tail_multi(const TiltingModel& model,
                                              OracleStatistic statistic,
                                              const Vec& thresholds, long replicates,
                                              std::uint64_t seed, int workers = 1);

// Exact tail probability over all distinct group assignments, enumerated in
// lexicographic order. Throws TooLarge above 10^6 arrangements.
PermutationOutcome exact_tail(const TiltingModel& model, OracleStatistic statistic,
                              double threshold);

// Number of distinct assignments N! / (n_1! ... n_k!), or 0 on overflow past
// the 10^6 cap (callers only need the capped comparison).
std::uint64_t arrangement_count(const GroupDesign& design);

}  // namespace saddleperm

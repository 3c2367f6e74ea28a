#include "saddleperm/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "saddleperm/errors.hpp"
#include "saddleperm/rng.hpp"

namespace saddleperm {

namespace {

std::vector<int> canonical_assignment(const GroupDesign& design) {
    std::vector<int> a;
    a.reserve(static_cast<std::size_t>(design.total()));
    for (int g = 0; g < design.groups(); ++g)
        a.insert(a.end(), static_cast<std::size_t>(design.size(g)), g);
    return a;
}

// Statistic of one assignment; boundary = true when a Lambda solve failed to
// converge (feasibility boundary, where Lambda is maximal).
double evaluate_statistic(const TiltingModel& model, const ConditionalContext& ctx,
                          OracleStatistic statistic, const std::vector<int>& assignment,
                          bool* boundary) {
    *boundary = false;
    if (statistic == OracleStatistic::Lambda) {
        try {
            return observed_statistic(model, ctx, assignment).first;
        } catch (const NoConvergence&) {
            *boundary = true;
            return std::numeric_limits<double>::infinity();
        } catch (const OverflowGuard&) {
            *boundary = true;
            return std::numeric_limits<double>::infinity();
        }
    }
    return classical_statistic(statistic, model.scores(), model.design(), assignment);
}

}  // namespace

std::string to_string(OracleStatistic s) {
    switch (s) {
        case OracleStatistic::Lambda: return "Lambda";
        case OracleStatistic::KruskalWallis: return "KruskalWallis";
        case OracleStatistic::AnovaSS: return "AnovaSS";
        case OracleStatistic::Quadratic: return "Quadratic";
    }
    return "?";
}

double classical_statistic(OracleStatistic kind, const ScoreSet& scores,
                           const GroupDesign& design, const std::vector<int>& assignment) {
    const int n = design.total();
    if (static_cast<int>(assignment.size()) != n)
        throw DomainError("classical_statistic: assignment length mismatch");

    if (kind == OracleStatistic::Quadratic) {
        if (design.groups() != 2)
            throw DomainError("Quadratic statistic needs a two-sample design");
        Vec x1(static_cast<std::size_t>(scores.dim()), 0.0);
        for (int m = 0; m < n; ++m)
            if (assignment[static_cast<std::size_t>(m)] == 0)
                for (int j = 0; j < scores.dim(); ++j)
                    x1[static_cast<std::size_t>(j)] += scores.at(m, j) / n;
        return dot(x1, x1);
    }

    if (kind != OracleStatistic::KruskalWallis && kind != OracleStatistic::AnovaSS)
        throw DomainError("classical_statistic: invalid statistic kind");
    if (scores.dim() != 1)
        throw DomainError("classical_statistic: scalar scores required");

    // Standardized scores have overall mean zero, so the between-group sum of
    // squares is sum_i n_i xbar_i^2.
    Vec group_sum(static_cast<std::size_t>(design.groups()), 0.0);
    for (int m = 0; m < n; ++m)
        group_sum[static_cast<std::size_t>(assignment[static_cast<std::size_t>(m)])] +=
            scores.scalar(m);
    double between = 0.0;
    for (int g = 0; g < design.groups(); ++g)
        between += group_sum[static_cast<std::size_t>(g)] *
                   group_sum[static_cast<std::size_t>(g)] / design.size(g);

    if (kind == OracleStatistic::AnovaSS) return between;
    return (static_cast<double>(n) - 1.0) / n * between;
}

std::vector<PermutationOutcome> mc_tail_multi(const TiltingModel& model,
                                              OracleStatistic statistic,
                                              const Vec& thresholds, long replicates,
                                              std::uint64_t seed, int workers) {
    if (replicates < 1) throw DomainError("mc_tail: need at least one replicate");
    if (thresholds.empty()) throw DomainError("mc_tail: need at least one threshold");

    const ConditionalContext ctx = conditional_context(model, model.lattice_mean());
    const std::vector<int> canonical = canonical_assignment(model.design());
    const std::size_t nt = thresholds.size();

    // One statistic evaluation per permutation, tallied against every
    // threshold. Integer counts make the totals order independent.
    std::vector<std::atomic<long>> hits(nt);
    std::atomic<long> boundary{0};

    auto run_range = [&](long begin, long end) {
        std::vector<int> assignment;
        std::vector<long> local_hits(nt, 0);
        long local_boundary = 0;
        for (long l = begin; l < end; ++l) {
            Rng rng =
                derive_stream(seed, streams::permutation, static_cast<std::uint64_t>(l));
            assignment = canonical;
            rng.shuffle(assignment);
            bool on_boundary = false;
            const double value =
                evaluate_statistic(model, ctx, statistic, assignment, &on_boundary);
            if (on_boundary) ++local_boundary;
            for (std::size_t t = 0; t < nt; ++t)
                if (value >= thresholds[t]) ++local_hits[t];
        }
        for (std::size_t t = 0; t < nt; ++t) hits[t] += local_hits[t];
        boundary += local_boundary;
    };

    const int nw = std::max(1, static_cast<int>(std::min<long>(workers, replicates)));
    if (nw == 1) {
        run_range(0, replicates);
    } else {
        std::vector<std::thread> pool;
        const long chunk = (replicates + nw - 1) / nw;
        for (int w = 0; w < nw; ++w) {
            const long begin = w * chunk;
            const long end = std::min(replicates, begin + chunk);
            if (begin < end) pool.emplace_back(run_range, begin, end);
        }
        for (auto& t : pool) t.join();
    }

    std::vector<PermutationOutcome> out(nt);
    for (std::size_t t = 0; t < nt; ++t) {
        out[t].statistic = statistic;
        out[t].threshold = thresholds[t];
        out[t].replicates = replicates;
        out[t].boundary_count = boundary.load();
        const double p =
            static_cast<double>(hits[t].load()) / static_cast<double>(replicates);
        out[t].tail_prob = p;
        out[t].se = std::sqrt(p * (1.0 - p) / static_cast<double>(replicates));
    }
    return out;
}

PermutationOutcome mc_tail(const TiltingModel& model, OracleStatistic statistic,
                           double threshold, long replicates, std::uint64_t seed,
                           int workers) {
    return mc_tail_multi(model, statistic, Vec{threshold}, replicates, seed,
                         workers)[0];
}

std::uint64_t arrangement_count(const GroupDesign& design) {
    // N! / prod n_i!, computed incrementally as a product of binomials.
    std::uint64_t count = 1;
    int remaining = design.total();
    for (int g = 0; g < design.groups(); ++g) {
        for (int j = 1; j <= design.size(g); ++j) {
            // count *= (remaining) ... choose step: C(remaining, n_g) piecewise
            count = count * static_cast<std::uint64_t>(remaining) /
                    static_cast<std::uint64_t>(j);
            --remaining;
            if (count > 100'000'000ull) return 0;  // past any cap we care about
        }
    }
    return count;
}

PermutationOutcome exact_tail(const TiltingModel& model, OracleStatistic statistic,
                              double threshold) {
    const std::uint64_t total = arrangement_count(model.design());
    if (total == 0 || total > 1'000'000ull)
        throw TooLarge("exact_tail: arrangement count exceeds the 10^6 cap");

    const ConditionalContext ctx = conditional_context(model, model.lattice_mean());
    std::vector<int> assignment = canonical_assignment(model.design());
    std::sort(assignment.begin(), assignment.end());

    std::uint64_t hits = 0, seen = 0;
    long boundary = 0;
    do {
        bool on_boundary = false;
        const double value =
            evaluate_statistic(model, ctx, statistic, assignment, &on_boundary);
        if (on_boundary) ++boundary;
        if (value >= threshold) ++hits;
        ++seen;
    } while (std::next_permutation(assignment.begin(), assignment.end()));

    if (seen != total)
        throw Error("Internal", "exact_tail: enumeration count mismatch");

    PermutationOutcome out;
    out.statistic = statistic;
    out.threshold = threshold;
    out.exact = true;
    out.total_arrangements = total;
    out.tail_count = hits;
    out.tail_prob = static_cast<double>(hits) / static_cast<double>(total);
    out.boundary_count = boundary;
    return out;
}

}  // namespace saddleperm

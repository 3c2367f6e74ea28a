#pragma once

#include <vector>

#include "saddleperm/linalg.hpp"

namespace saddleperm {

// A standardized finite population of scores: N rows of dimension d with
// column sums zero and sum of outer products a a^T equal to N * I (for d == 1
// this is sum a = 0, sum a^2 = N).
class ScoreSet {
public:
    ScoreSet() = default;
    ScoreSet(int n, int d) : n_(n), d_(d), a_(static_cast<std::size_t>(n) * d, 0.0) {}

    int size() const { return n_; }
    int dim() const { return d_; }

    double at(int m, int j) const { return a_[static_cast<std::size_t>(m) * d_ + j]; }
    double& at(int m, int j) { return a_[static_cast<std::size_t>(m) * d_ + j]; }

    // Scalar-score shorthand.
    double scalar(int m) const { return at(m, 0); }

private:
    int n_ = 0;
    int d_ = 0;
    std::vector<double> a_;
};

// Group sizes n_1..n_k of a one-way layout.
class GroupDesign {
public:
    GroupDesign() = default;
    explicit GroupDesign(std::vector<int> sizes);

    int groups() const { return static_cast<int>(sizes_.size()); }
    int total() const { return total_; }
    int size(int i) const { return sizes_[static_cast<std::size_t>(i)]; }
    const std::vector<int>& sizes() const { return sizes_; }

    double proportion(int i) const {
        return static_cast<double>(sizes_[static_cast<std::size_t>(i)]) / total_;
    }

private:
    std::vector<int> sizes_;
    int total_ = 0;
};

// Midranks (ties share the average of the ranks they occupy; 1-based).
Vec midranks(const Vec& values);

// Center and scale a raw sample to sum a = 0, sum a^2 = N.
ScoreSet standardize_scalar(const Vec& raw);

// Center and whiten an N x l sample with the symmetric inverse square root of
// the centered scatter matrix, so that sum a = 0 and sum a a^T = N * I.
ScoreSet whiten_multivariate(const std::vector<Vec>& raw);

}  // namespace saddleperm

#include "saddleperm/scores.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "saddleperm/errors.hpp"

namespace saddleperm {

GroupDesign::GroupDesign(std::vector<int> sizes) : sizes_(std::move(sizes)) {
    if (sizes_.empty()) throw DomainError("GroupDesign: no groups");
    for (int n : sizes_) {
        if (n < 1) throw DomainError("GroupDesign: group sizes must be >= 1");
        total_ += n;
    }
}

Vec midranks(const Vec& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    Vec ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double shared = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = shared;
        i = j + 1;
    }
    return ranks;
}

ScoreSet standardize_scalar(const Vec& raw) {
    const int n = static_cast<int>(raw.size());
    if (n < 2) throw DomainError("standardize_scalar: need N >= 2");

    double mean = 0.0;
    for (double v : raw) mean += v;
    mean /= n;

    double ss = 0.0, max_abs = 0.0;
    for (double v : raw) {
        ss += (v - mean) * (v - mean);
        max_abs = std::max(max_abs, std::fabs(v));
    }
    if (ss <= 1e-12 * n * max_abs * max_abs || ss == 0.0)
        throw DegenerateScores("standardize_scalar: sample is (numerically) constant");

    const double scale = std::sqrt(static_cast<double>(n) / ss);
    ScoreSet out(n, 1);
    for (int m = 0; m < n; ++m) out.at(m, 0) = (raw[m] - mean) * scale;
    return out;
}

ScoreSet whiten_multivariate(const std::vector<Vec>& raw) {
    const int n = static_cast<int>(raw.size());
    if (n < 2) throw DomainError("whiten_multivariate: need N >= 2");
    const int l = static_cast<int>(raw.front().size());
    if (l < 1) throw DomainError("whiten_multivariate: empty rows");
    for (const Vec& r : raw)
        if (static_cast<int>(r.size()) != l)
            throw DomainError("whiten_multivariate: ragged input");
    if (n <= l) throw DomainError("whiten_multivariate: need N > l");

    Vec mean(static_cast<std::size_t>(l), 0.0);
    for (const Vec& r : raw)
        for (int j = 0; j < l; ++j) mean[j] += r[j];
    for (double& m : mean) m /= n;

    // Centered scatter matrix sum (r - mean)(r - mean)^T.
    SymMatrix scatter(l);
    for (const Vec& r : raw)
        for (int i = 0; i < l; ++i)
            for (int j = 0; j <= i; ++j)
                scatter.add(i, j, (r[i] - mean[i]) * (r[j] - mean[j]));

    const SymEigen eig = eigen_sym(scatter);
    const double max_eig = *std::max_element(eig.values.begin(), eig.values.end());
    for (double lambda : eig.values)
        if (lambda <= 1e-10 * max_eig)
            throw SingularCovariance("whiten_multivariate: covariance is singular");

    // W = sqrt(N) * scatter^{-1/2}, applied through the eigenbasis.
    Matrix w(l, l);
    for (int i = 0; i < l; ++i)
        for (int j = 0; j < l; ++j) {
            double s = 0.0;
            for (int k = 0; k < l; ++k)
                s += eig.vectors(i, k) * eig.vectors(j, k) / std::sqrt(eig.values[k]);
            w(i, j) = s * std::sqrt(static_cast<double>(n));
        }

    ScoreSet out(n, l);
    for (int m = 0; m < n; ++m)
        for (int i = 0; i < l; ++i) {
            double s = 0.0;
            for (int j = 0; j < l; ++j) s += w(i, j) * (raw[m][j] - mean[j]);
            out.at(m, i) = s;
        }
    return out;
}

}  // namespace saddleperm

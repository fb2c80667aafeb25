#include "fallguard/roi_depth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace fallguard {

RoiEstimator roi_estimator_from_string(const std::string& name) {
    if (name == "histogram") return RoiEstimator::histogram;
    if (name == "kmeans") return RoiEstimator::kmeans;
    if (name == "double_threshold") return RoiEstimator::double_threshold;
    throw ConfigError("unknown roi_depth.estimator '" + name + "'");
}

std::string to_string(RoiEstimator e) {
    switch (e) {
        case RoiEstimator::histogram: return "histogram";
        case RoiEstimator::kmeans: return "kmeans";
        case RoiEstimator::double_threshold: return "double_threshold";
    }
    return "?";
}

namespace {

double mean_of(std::span<const double> values) {
    return std::accumulate(values.begin(), values.end(), 0.0) / double(values.size());
}

void require_non_empty(std::span<const double> sample, const char* who) {
    if (sample.empty()) throw NoDepthError(std::string(who) + ": empty depth sample");
}

}  // namespace

double estimate_histogram(std::span<const double> sample, const EstimatorParams& params) {
    require_non_empty(sample, "estimate_histogram");

    const auto [lo_it, hi_it] = std::minmax_element(sample.begin(), sample.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    if (hi - lo <= 0) return lo;  // constant sample, single degenerate bin

    const int k = std::max(params.k_bins, 1);
    const double bin_width = (hi - lo) / k;
    std::vector<int> counts(std::size_t(k), 0);
    std::vector<double> sums(std::size_t(k), 0.0);
    for (double v : sample) {
        int bin = int((v - lo) / bin_width);
        bin = std::clamp(bin, 0, k - 1);  // v == hi lands in the last bin
        ++counts[std::size_t(bin)];
        sums[std::size_t(bin)] += v;
    }

    // Ties pick the nearer (lower) bin; the scan order does exactly that.
    int winner = 0;
    for (int b = 1; b < k; ++b)
        if (counts[std::size_t(b)] > counts[std::size_t(winner)]) winner = b;

    return sums[std::size_t(winner)] / counts[std::size_t(winner)];
}

double estimate_kmeans(std::span<const double> sample, const EstimatorParams& params) {
    require_non_empty(sample, "estimate_kmeans");

    const int k = std::max(params.k_clusters, 1);
    if (int(sample.size()) < k) return mean_of(sample);

    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());

    // Quantile seeds keep the iteration deterministic.
    std::vector<double> centers(std::size_t(k), 0.0);
    for (int i = 0; i < k; ++i) {
        const double q = (i + 0.5) / k;
        centers[std::size_t(i)] = sorted[std::size_t(q * (sorted.size() - 1) + 0.5)];
    }

    std::vector<int> assignment(sorted.size(), 0);
    for (int iter = 0; iter < params.max_kmeans_iters; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            int best = 0;
            double best_d = std::abs(sorted[i] - centers[0]);
            for (int c = 1; c < k; ++c) {
                const double d = std::abs(sorted[i] - centers[std::size_t(c)]);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (assignment[i] != best) {
                assignment[i] = best;
                changed = true;
            }
        }

        std::vector<double> sums(std::size_t(k), 0.0);
        std::vector<int> counts(std::size_t(k), 0);
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            sums[std::size_t(assignment[i])] += sorted[i];
            ++counts[std::size_t(assignment[i])];
        }
        for (int c = 0; c < k; ++c)
            if (counts[std::size_t(c)] > 0)
                centers[std::size_t(c)] = sums[std::size_t(c)] / counts[std::size_t(c)];

        if (!changed && iter > 0) break;
    }

    std::vector<double> sums(std::size_t(k), 0.0);
    std::vector<int> counts(std::size_t(k), 0);
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        sums[std::size_t(assignment[i])] += sorted[i];
        ++counts[std::size_t(assignment[i])];
    }

    // Largest cluster wins; ties pick the nearer center.
    int winner = -1;
    for (int c = 0; c < k; ++c) {
        if (counts[std::size_t(c)] == 0) continue;
        if (winner < 0 || counts[std::size_t(c)] > counts[std::size_t(winner)] ||
            (counts[std::size_t(c)] == counts[std::size_t(winner)] &&
             centers[std::size_t(c)] < centers[std::size_t(winner)]))
            winner = c;
    }
    return sums[std::size_t(winner)] / counts[std::size_t(winner)];
}

double estimate_double_threshold(std::span<const double> sample, const EstimatorParams& params) {
    require_non_empty(sample, "estimate_double_threshold");

    std::vector<double> keep(sample.begin(), sample.end());

    const double background_cut = mean_of(keep) + params.background_margin;
    std::erase_if(keep, [background_cut](double v) { return v > background_cut; });
    if (keep.empty())
        throw NoDepthError("estimate_double_threshold: background pass removed everything");

    const double foreground_cut = mean_of(keep) - params.foreground_margin;
    std::erase_if(keep, [foreground_cut](double v) { return v < foreground_cut; });
    if (keep.empty())
        throw NoDepthError("estimate_double_threshold: foreground pass removed everything");

    return mean_of(keep);
}

double estimate_roi_depth(RoiEstimator which, std::span<const double> sample,
                          const EstimatorParams& params) {
    switch (which) {
        case RoiEstimator::histogram: return estimate_histogram(sample, params);
        case RoiEstimator::kmeans: return estimate_kmeans(sample, params);
        case RoiEstimator::double_threshold: return estimate_double_threshold(sample, params);
    }
    throw ConfigError("estimate_roi_depth: bad estimator enum");
}

}  // namespace fallguard

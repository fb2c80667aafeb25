#pragma once

#include <span>
#include <string>

#include "fallguard/errors.hpp"

namespace fallguard {

// The three estimators that turn the valid depth readings inside a detection
// bounding box into a single object distance. Samples are in meters, already
// stripped of invalid pixels; all three throw NoDepthError on empty input and
// return a value within [min(sample), max(sample)].
enum class RoiEstimator { histogram, kmeans, double_threshold };

RoiEstimator roi_estimator_from_string(const std::string& name);  // ConfigError on unknown
std::string to_string(RoiEstimator e);

struct EstimatorParams {
    int k_bins = 10;
    int k_clusters = 3;
    double background_margin = 0.3;  // meters beyond the first-pass mean
    double foreground_margin = 0.3;  // meters in front of the second-pass mean
    int max_kmeans_iters = 50;
};

// Mean of the samples in the most populated of k equal-width bins spanning
// [min, max]. Ties pick the nearer bin.
double estimate_histogram(std::span<const double> sample, const EstimatorParams& params);

// 1-D Lloyd iteration from deterministic quantile seeds; mean of the largest
// cluster, ties picking the nearer one. Falls back to the overall mean when
// the sample is smaller than k_clusters.
double estimate_kmeans(std::span<const double> sample, const EstimatorParams& params);

// Two-pass trim: drop samples farther than mean + background_margin, then
// drop samples nearer than the new mean - foreground_margin; return the mean
// of what remains.
double estimate_double_threshold(std::span<const double> sample, const EstimatorParams& params);

double estimate_roi_depth(RoiEstimator which, std::span<const double> sample,
                          const EstimatorParams& params);

}  // namespace fallguard

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fallguard/backends.hpp"
#include "fallguard/config.hpp"
#include "fallguard/frame.hpp"
#include "fallguard/fusion.hpp"
#include "fallguard/hazard.hpp"
#include "fallguard/pointcloud.hpp"
#include "fallguard/roi_depth.hpp"

namespace fallguard {

// Every tunable of the per-frame pipeline in one validated bundle.
struct PipelineConfig {
    std::uint32_t seed = 1;
    RansacParams ransac;
    RegionGrowParams region_grow;
    RoiEstimator roi_estimator = RoiEstimator::double_threshold;
    EstimatorParams roi_params;
    FusionParams fusion;
    HazardParams hazard;
    double classifier_roi_factor = 3.0;
    std::string detector_backend = "fixture";    // fixture | external
    std::string classifier_backend = "fixture";  // fixture | external
    std::string detector_url;
    std::string classifier_url;
    std::string taxonomy_path;  // empty -> builtin table

    // Rejects unknown keys.
    static PipelineConfig from_config(const Config& cfg);
};

struct StageTiming {
    std::string stage;
    double millis = 0;
};

// Per-frame output: the hazard report plus per-stage diagnostics.
struct FrameResult {
    HazardReport report;
    std::vector<StageTiming> timings;
    std::vector<std::string> warnings;

    std::vector<Detection> rgb_detections;
    std::vector<PathObservation> rgb_observations;
    std::optional<PlaneModel> floor;
    std::vector<ObstacleSegment> segments;
    std::vector<PathObservation> depth_observations;
    std::vector<LocalizedObject> objects;
};

// Runs both paths on one frame and fuses them:
//   RGB:   detect -> ROI depth estimate -> back-project -> world
//   depth: cloud -> floor RanSaC -> remove plane -> region grow -> mask ->
//          3x crop -> classify -> centroid -> world
// A frame without usable depth falls back to ray-ground localization for the
// RGB path; a failed floor fit skips the depth path with a warning.
FrameResult process_frame(const FrameBundle& bundle, const PipelineConfig& cfg,
                          const OccupancyMap& map, const Detector& detector,
                          const Classifier& classifier, const Taxonomy& taxonomy);

}  // namespace fallguard

#include "fallguard/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace fallguard {

PipelineConfig PipelineConfig::from_config(const Config& cfg) {
    PipelineConfig pc;
    pc.seed = cfg.get_uint32("pipeline.seed", pc.seed);

    pc.ransac.iterations = cfg.get_int("ransac.iterations", pc.ransac.iterations);
    pc.ransac.inlier_tol = cfg.get_double("ransac.inlier_tol", pc.ransac.inlier_tol);
    pc.ransac.min_inlier_fraction =
        cfg.get_double("ransac.min_inlier_fraction", pc.ransac.min_inlier_fraction);
    pc.ransac.max_up_tilt_deg =
        cfg.get_double("ransac.max_up_tilt_deg", pc.ransac.max_up_tilt_deg);

    pc.region_grow.max_neighbor_dist =
        cfg.get_double("region_grow.max_neighbor_dist", pc.region_grow.max_neighbor_dist);
    pc.region_grow.min_segment_size =
        cfg.get_int("region_grow.min_segment_size", pc.region_grow.min_segment_size);

    pc.roi_estimator = roi_estimator_from_string(
        cfg.get_string("roi_depth.estimator", to_string(pc.roi_estimator)));
    pc.roi_params.k_bins = cfg.get_int("roi_depth.k_bins", pc.roi_params.k_bins);
    pc.roi_params.k_clusters = cfg.get_int("roi_depth.k_clusters", pc.roi_params.k_clusters);
    pc.roi_params.background_margin =
        cfg.get_double("roi_depth.background_margin", pc.roi_params.background_margin);
    pc.roi_params.foreground_margin =
        cfg.get_double("roi_depth.foreground_margin", pc.roi_params.foreground_margin);
    pc.roi_params.max_kmeans_iters =
        cfg.get_int("roi_depth.max_kmeans_iters", pc.roi_params.max_kmeans_iters);

    pc.fusion.iou_threshold = cfg.get_double("fusion.iou_threshold", pc.fusion.iou_threshold);
    pc.fusion.max_position_gap =
        cfg.get_double("fusion.max_position_gap", pc.fusion.max_position_gap);
    pc.taxonomy_path = cfg.get_string("fusion.taxonomy", pc.taxonomy_path);

    pc.hazard.max_floor_height =
        cfg.get_double("hazard.max_floor_height", pc.hazard.max_floor_height);
    pc.hazard.wall_distance = cfg.get_double("hazard.wall_distance", pc.hazard.wall_distance);

    pc.detector_backend = cfg.get_string("detector.backend", pc.detector_backend);
    pc.detector_url = cfg.get_string("detector.url", pc.detector_url);
    pc.classifier_backend = cfg.get_string("classifier.backend", pc.classifier_backend);
    pc.classifier_url = cfg.get_string("classifier.url", pc.classifier_url);
    pc.classifier_roi_factor =
        cfg.get_double("classifier.roi_factor", pc.classifier_roi_factor);

    cfg.require_all_consumed();

    for (const auto& backend : {pc.detector_backend, pc.classifier_backend})
        if (backend != "fixture" && backend != "external")
            throw ConfigError("backend must be `fixture` or `external`, got '" + backend +
                              "'");
    if (pc.roi_params.k_bins < 2) throw ConfigError("roi_depth.k_bins must be >= 2");
    if (pc.roi_params.k_clusters < 2) throw ConfigError("roi_depth.k_clusters must be >= 2");
    if (pc.roi_params.background_margin <= 0 || pc.roi_params.foreground_margin <= 0)
        throw ConfigError("roi_depth margins must be > 0");
    if (pc.classifier_roi_factor < 1) throw ConfigError("classifier.roi_factor must be >= 1");
    return pc;
}

namespace {

class StageClock {
public:
    explicit StageClock(std::vector<StageTiming>& sink) : sink_(sink) {}

    template <typename F>
    auto run(const std::string& stage, F&& fn) {
        const auto start = std::chrono::steady_clock::now();
        if constexpr (std::is_void_v<decltype(fn())>) {
            fn();
            record(stage, start);
        } else {
            auto result = fn();
            record(stage, start);
            return result;
        }
    }

private:
    void record(const std::string& stage,
                std::chrono::steady_clock::time_point start) {
        const auto end = std::chrono::steady_clock::now();
        sink_.push_back(
            {stage, std::chrono::duration<double, std::milli>(end - start).count()});
    }

    std::vector<StageTiming>& sink_;
};

std::vector<double> roi_depth_sample(const DepthImage& depth, const BBox& box) {
    const int x0 = std::clamp(int(std::floor(box.x_min)), 0, depth.width);
    const int y0 = std::clamp(int(std::floor(box.y_min)), 0, depth.height);
    const int x1 = std::clamp(int(std::ceil(box.x_max)), 0, depth.width);
    const int y1 = std::clamp(int(std::ceil(box.y_max)), 0, depth.height);

    std::vector<double> sample;
    sample.reserve(std::size_t(std::max(0, x1 - x0)) * std::size_t(std::max(0, y1 - y0)));
    for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x)
            if (depth.valid_at(x, y)) sample.push_back(depth.at(x, y));
    return sample;
}

BBox segment_pixel_bbox(const ObstacleSegment& seg, int width) {
    int u_min = width;
    int u_max = -1;
    int v_min = 1 << 30;
    int v_max = -1;
    for (int idx : seg.indices) {
        const int u = idx % width;
        const int v = idx / width;
        u_min = std::min(u_min, u);
        u_max = std::max(u_max, u);
        v_min = std::min(v_min, v);
        v_max = std::max(v_max, v);
    }
    // Cover the full pixel extents so single-pixel rows still form a box.
    return {double(u_min), double(v_min), double(u_max + 1), double(v_max + 1)};
}

}  // namespace

FrameResult process_frame(const FrameBundle& bundle, const PipelineConfig& cfg,
                          const OccupancyMap& map, const Detector& detector,
                          const Classifier& classifier, const Taxonomy& taxonomy) {
    validate(bundle);

    FrameResult result;
    StageClock clock(result.timings);
    const auto total_start = std::chrono::steady_clock::now();

    // --- RGB path -----------------------------------------------------
    result.rgb_detections = clock.run(
        "detect", [&] { return detector.detect(bundle.frame_id, bundle.rgb); });

    clock.run("rgb_localize", [&] {
        for (const auto& det : result.rgb_detections) {
            const auto sample = roi_depth_sample(bundle.depth, det.bbox);
            WorldPoint position;
            if (!sample.empty()) {
                const double depth_m =
                    estimate_roi_depth(cfg.roi_estimator, sample, cfg.roi_params);
                position = camera_to_world(back_project(det.bbox.center(), depth_m,
                                                        bundle.intrinsics),
                                           bundle.camera_pose);
            } else {
                // No depth readings inside the box: assume the object lies on
                // the floor and intersect the viewing ray with it.
                try {
                    position = ray_ground_intersect(det.bbox.center(), bundle.intrinsics,
                                                    bundle.camera_pose);
                } catch (const NoIntersectionError&) {
                    result.warnings.push_back("rgb: detection '" + det.label +
                                              "' has no depth and no ground intersection; "
                                              "dropped");
                    continue;
                }
                result.warnings.push_back("rgb: detection '" + det.label +
                                          "' localized via ray-ground fallback");
            }
            result.rgb_observations.push_back(
                {det.label, det.score, SourcePath::rgb, det.bbox, position});
        }
    });

    // --- Depth path ----------------------------------------------------
    const auto cloud =
        clock.run("depth_to_cloud", [&] { return depth_to_cloud(bundle.depth, bundle.intrinsics); });

    if (cloud.valid_count >= 3) {
        try {
            const Eigen::Vector3d up_in_camera =
                bundle.camera_pose.orientation.conjugate() * Eigen::Vector3d::UnitZ();
            result.floor = clock.run("floor_fit", [&] {
                return fit_floor_plane(cloud, cfg.ransac, cfg.seed, up_in_camera);
            });
        } catch (const NoFloorFoundError& e) {
            result.warnings.push_back(std::string("depth: ") + e.what() +
                                      "; depth path skipped");
        }
    } else {
        result.warnings.push_back("depth: no depth data; depth path skipped");
    }

    if (result.floor) {
        const auto remainder = clock.run("remove_plane", [&] {
            return remove_plane(cloud, *result.floor, cfg.ransac.inlier_tol);
        });
        result.segments =
            clock.run("region_grow", [&] { return region_grow(remainder, cfg.region_grow); });

        clock.run("classify", [&] {
            for (const auto& seg : result.segments) {
                const BBox seg_box = segment_pixel_bbox(seg, cloud.width);
                const BBox crop_box = expand_roi(seg_box, cfg.classifier_roi_factor,
                                                 bundle.rgb.width, bundle.rgb.height);
                const RgbImage crop = crop_image(bundle.rgb, crop_box);
                const PixelPoint centroid_px = project(seg.centroid, bundle.intrinsics);
                const ClassificationResult cls = classifier.classify(crop, centroid_px);
                const WorldPoint position = camera_to_world(seg.centroid, bundle.camera_pose);
                result.depth_observations.push_back(
                    {cls.label, cls.score, SourcePath::depth, seg_box, position});
            }
        });
    }

    // --- Fusion and hazard rules ----------------------------------------
    result.objects = clock.run("fusion", [&] {
        return merge_paths(result.rgb_observations, result.depth_observations, taxonomy,
                           cfg.fusion);
    });
    result.report = clock.run("hazard", [&] {
        return classify_hazard(bundle.frame_id, result.objects, map, cfg.hazard);
    });

    const auto total_end = std::chrono::steady_clock::now();
    result.timings.push_back(
        {"total",
         std::chrono::duration<double, std::milli>(total_end - total_start).count()});
    return result;
}

}  // namespace fallguard

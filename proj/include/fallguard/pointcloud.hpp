#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "fallguard/geometry.hpp"
#include "fallguard/image.hpp"

namespace fallguard {

// Point cloud retaining the source image's row/column grid. Indices are
// row-major pixel indices (v * width + u).
struct OrganizedCloud {
    int width = 0;
    int height = 0;
    std::vector<CameraPoint> points;
    std::vector<std::uint8_t> valid;
    std::size_t valid_count = 0;

    int index(int u, int v) const { return v * width + u; }
    bool has(int idx) const { return valid[std::size_t(idx)] != 0; }
    const CameraPoint& at(int idx) const { return points[std::size_t(idx)]; }
};

// Plane {q : normal . q + offset = 0}, |normal| = 1. The normal is oriented
// to point toward the camera origin (offset >= 0).
struct PlaneModel {
    Eigen::Vector3d normal{0, 0, 1};
    double offset = 0;
    std::vector<int> inlier_indices;

    double signed_distance(const CameraPoint& p) const { return normal.dot(p.vec()) + offset; }
};

struct RansacParams {
    int iterations = 200;
    double inlier_tol = 0.015;       // meters
    double min_inlier_fraction = 0.3;
    double max_up_tilt_deg = 30.0;   // accepted angle between plane normal and up hint
};

struct RegionGrowParams {
    double max_neighbor_dist = 0.05;  // meters, gate between 4-connected neighbors
    int min_segment_size = 60;        // points
};

// Connected group of cloud points. Indices are sorted; the centroid is the
// arithmetic mean of the member points.
struct ObstacleSegment {
    std::vector<int> indices;
    CameraPoint centroid;
};

// Back-projects every valid depth pixel. Throws ConfigError on a
// depth/intrinsics dimension mismatch.
OrganizedCloud depth_to_cloud(const DepthImage& depth, const CameraIntrinsics& k);

// RanSaC plane fit (3-point hypotheses, least-squares refinement over the
// winning inlier set). Fully deterministic for a fixed seed. `up_hint` is the
// world up-axis expressed in the camera frame; pass a zero vector to skip the
// tilt check. Throws NoFloorFoundError when there are fewer than 3 points,
// the inlier fraction stays below the threshold, or the recovered plane
// leans more than max_up_tilt_deg away from the hint.
PlaneModel fit_floor_plane(const OrganizedCloud& cloud, const RansacParams& params,
                           std::uint32_t seed,
                           const Eigen::Vector3d& up_hint = Eigen::Vector3d::Zero());

// Removes every point within tol of the plane; organization is preserved.
OrganizedCloud remove_plane(const OrganizedCloud& cloud, const PlaneModel& plane, double tol);

// Grows 4-connected segments gated by Euclidean distance between neighboring
// points; segments smaller than min_segment_size are discarded. Output is
// ordered by smallest member index.
std::vector<ObstacleSegment> region_grow(const OrganizedCloud& cloud,
                                         const RegionGrowParams& params);

MaskImage segment_mask(const ObstacleSegment& seg, int width, int height);

// Throws std::invalid_argument for an empty segment.
CameraPoint segment_centroid(const ObstacleSegment& seg, const OrganizedCloud& cloud);

}  // namespace fallguard

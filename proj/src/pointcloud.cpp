#include "fallguard/pointcloud.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace fallguard {

OrganizedCloud depth_to_cloud(const DepthImage& depth, const CameraIntrinsics& k) {
    if (depth.width != k.width || depth.height != k.height)
        throw ConfigError("depth_to_cloud: depth image is " + std::to_string(depth.width) +
                          "x" + std::to_string(depth.height) + " but intrinsics expect " +
                          std::to_string(k.width) + "x" + std::to_string(k.height));

    OrganizedCloud cloud;
    cloud.width = depth.width;
    cloud.height = depth.height;
    cloud.points.resize(std::size_t(depth.width) * depth.height);
    cloud.valid.assign(cloud.points.size(), 0);

    for (int v = 0; v < depth.height; ++v) {
        for (int u = 0; u < depth.width; ++u) {
            if (!depth.valid_at(u, v)) continue;
            const int idx = cloud.index(u, v);
            cloud.points[idx] = back_project({double(u), double(v)}, depth.at(u, v), k);
            cloud.valid[idx] = 1;
            ++cloud.valid_count;
        }
    }
    return cloud;
}

namespace {

struct PlaneEq {
    Eigen::Vector3d n;
    double d;
};

std::size_t count_inliers(const OrganizedCloud& cloud, const PlaneEq& plane, double tol) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < cloud.points.size(); ++i) {
        if (!cloud.valid[i]) continue;
        const auto& p = cloud.points[i];
        if (std::abs(plane.n.x() * p.x + plane.n.y() * p.y + plane.n.z() * p.z + plane.d) <= tol)
            ++n;
    }
    return n;
}

// Least-squares plane through the given points: centroid + smallest
// eigenvector of the scatter matrix.
PlaneEq refit_plane(const OrganizedCloud& cloud, const std::vector<int>& indices) {
    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    for (int idx : indices) centroid += cloud.at(idx).vec();
    centroid /= double(indices.size());

    Eigen::Matrix3d scatter = Eigen::Matrix3d::Zero();
    for (int idx : indices) {
        const Eigen::Vector3d r = cloud.at(idx).vec() - centroid;
        scatter += r * r.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(scatter);
    Eigen::Vector3d n = solver.eigenvectors().col(0);  // eigenvalues ascending
    n.normalize();
    return {n, -n.dot(centroid)};
}

}  // namespace

PlaneModel fit_floor_plane(const OrganizedCloud& cloud, const RansacParams& params,
                           std::uint32_t seed, const Eigen::Vector3d& up_hint) {
    std::vector<int> candidates;
    candidates.reserve(cloud.valid_count);
    for (std::size_t i = 0; i < cloud.points.size(); ++i)
        if (cloud.valid[i]) candidates.push_back(int(i));

    if (candidates.size() < 3)
        throw NoFloorFoundError("fit_floor_plane: need at least 3 points, have " +
                                std::to_string(candidates.size()));

    // mt19937 with modulo sampling keeps hypothesis draws identical across
    // platforms; std::uniform_int_distribution is implementation-defined.
    std::mt19937 rng(seed);
    const auto draw = [&rng, &candidates]() {
        return candidates[rng() % candidates.size()];
    };

    PlaneEq best{Eigen::Vector3d::UnitZ(), 0};
    std::size_t best_inliers = 0;
    bool have_best = false;

    for (int it = 0; it < params.iterations; ++it) {
        const int ia = draw();
        const int ib = draw();
        const int ic = draw();
        if (ia == ib || ia == ic || ib == ic) continue;

        const Eigen::Vector3d a = cloud.at(ia).vec();
        Eigen::Vector3d n = (cloud.at(ib).vec() - a).cross(cloud.at(ic).vec() - a);
        const double len = n.norm();
        if (len < 1e-12) continue;  // collinear sample
        n /= len;

        const PlaneEq hypo{n, -n.dot(a)};
        const std::size_t inliers = count_inliers(cloud, hypo, params.inlier_tol);
        if (!have_best || inliers > best_inliers) {
            best = hypo;
            best_inliers = inliers;
            have_best = true;
        }
    }

    const std::size_t min_inliers =
        std::size_t(std::ceil(params.min_inlier_fraction * double(candidates.size())));
    if (!have_best || best_inliers < std::max<std::size_t>(min_inliers, 3))
        throw NoFloorFoundError("fit_floor_plane: inlier fraction below threshold");

    // Two refinement rounds: refit on inliers, re-gather inliers.
    std::vector<int> inlier_set;
    for (int round = 0; round < 2; ++round) {
        inlier_set.clear();
        for (int idx : candidates)
            if (std::abs(best.n.dot(cloud.at(idx).vec()) + best.d) <= params.inlier_tol)
                inlier_set.push_back(idx);
        if (inlier_set.size() < 3)
            throw NoFloorFoundError("fit_floor_plane: refinement lost the inlier set");
        best = refit_plane(cloud, inlier_set);
    }
    inlier_set.clear();
    for (int idx : candidates)
        if (std::abs(best.n.dot(cloud.at(idx).vec()) + best.d) <= params.inlier_tol)
            inlier_set.push_back(idx);

    if (inlier_set.size() < std::max<std::size_t>(min_inliers, 3))
        throw NoFloorFoundError("fit_floor_plane: inlier fraction below threshold after refit");

    // Orient the normal toward the camera origin.
    if (best.d < 0) {
        best.n = -best.n;
        best.d = -best.d;
    }

    if (up_hint.norm() > 1e-12) {
        const double cos_tilt = best.n.dot(up_hint.normalized());
        const double tilt_deg = std::acos(std::clamp(cos_tilt, -1.0, 1.0)) * 180.0 /
                                std::numbers::pi;
        if (tilt_deg > params.max_up_tilt_deg)
            throw NoFloorFoundError("fit_floor_plane: plane tilted " +
                                    std::to_string(tilt_deg) +
                                    " deg from up; looks like a wall");
    }

    PlaneModel model;
    model.normal = best.n;
    model.offset = best.d;
    model.inlier_indices = std::move(inlier_set);
    return model;
}

OrganizedCloud remove_plane(const OrganizedCloud& cloud, const PlaneModel& plane, double tol) {
    OrganizedCloud out = cloud;
    for (std::size_t i = 0; i < out.points.size(); ++i) {
        if (!out.valid[i]) continue;
        if (std::abs(plane.signed_distance(out.points[i])) <= tol) {
            out.valid[i] = 0;
            --out.valid_count;
        }
    }
    return out;
}

std::vector<ObstacleSegment> region_grow(const OrganizedCloud& cloud,
                                         const RegionGrowParams& params) {
    std::vector<ObstacleSegment> segments;
    std::vector<std::uint8_t> visited(cloud.points.size(), 0);
    const double max_d2 = params.max_neighbor_dist * params.max_neighbor_dist;

    std::vector<int> stack;
    std::vector<int> member;
    for (std::size_t start = 0; start < cloud.points.size(); ++start) {
        if (!cloud.valid[start] || visited[start]) continue;

        stack.assign(1, int(start));
        member.clear();
        visited[start] = 1;

        while (!stack.empty()) {
            const int idx = stack.back();
            stack.pop_back();
            member.push_back(idx);

            const int u = idx % cloud.width;
            const int v = idx / cloud.width;
            const auto& p = cloud.points[std::size_t(idx)];

            const int nu[4] = {u - 1, u + 1, u, u};
            const int nv[4] = {v, v, v - 1, v + 1};
            for (int j = 0; j < 4; ++j) {
                if (nu[j] < 0 || nu[j] >= cloud.width || nv[j] < 0 || nv[j] >= cloud.height)
                    continue;
                const int nidx = cloud.index(nu[j], nv[j]);
                if (!cloud.valid[nidx] || visited[nidx]) continue;
                const auto& q = cloud.points[std::size_t(nidx)];
                const double dx = p.x - q.x;
                const double dy = p.y - q.y;
                const double dz = p.z - q.z;
                if (dx * dx + dy * dy + dz * dz > max_d2) continue;
                visited[nidx] = 1;
                stack.push_back(nidx);
            }
        }

        if (int(member.size()) < params.min_segment_size) continue;

        ObstacleSegment seg;
        seg.indices = member;
        std::sort(seg.indices.begin(), seg.indices.end());
        seg.centroid = segment_centroid(seg, cloud);
        segments.push_back(std::move(seg));
    }

    // BFS start order already yields ascending first-index order; keep it explicit.
    std::sort(segments.begin(), segments.end(),
              [](const ObstacleSegment& a, const ObstacleSegment& b) {
                  return a.indices.front() < b.indices.front();
              });
    return segments;
}

MaskImage segment_mask(const ObstacleSegment& seg, int width, int height) {
    MaskImage mask = MaskImage::blank(width, height);
    for (int idx : seg.indices) {
        if (idx < 0 || idx >= width * height)
            throw std::invalid_argument("segment_mask: index out of range");
        mask.on[std::size_t(idx)] = 1;
    }
    return mask;
}

CameraPoint segment_centroid(const ObstacleSegment& seg, const OrganizedCloud& cloud) {
    if (seg.indices.empty())
        throw std::invalid_argument("segment_centroid: empty segment");
    Eigen::Vector3d sum = Eigen::Vector3d::Zero();
    for (int idx : seg.indices) sum += cloud.at(idx).vec();
    return CameraPoint::from(sum / double(seg.indices.size()));
}

}  // namespace fallguard

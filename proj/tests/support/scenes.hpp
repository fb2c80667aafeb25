#pragma once

// Shared scene and cloud builders for the test suites.

#include <functional>
#include <numbers>
#include <optional>

#include "fallguard/pointcloud.hpp"
#include "fallguard/scene_synth.hpp"

namespace test_support {

inline double deg(double d) {
    return d * std::numbers::pi / 180.0;
}

inline fallguard::OrganizedCloud make_cloud(
    int w, int h,
    const std::function<std::optional<fallguard::CameraPoint>(int, int)>& point_at) {
    fallguard::OrganizedCloud cloud;
    cloud.width = w;
    cloud.height = h;
    cloud.points.resize(std::size_t(w) * h);
    cloud.valid.assign(cloud.points.size(), 0);
    for (int v = 0; v < h; ++v)
        for (int u = 0; u < w; ++u)
            if (const auto p = point_at(u, v)) {
                const int idx = cloud.index(u, v);
                cloud.points[std::size_t(idx)] = *p;
                cloud.valid[std::size_t(idx)] = 1;
                ++cloud.valid_count;
            }
    return cloud;
}

inline fallguard::SceneObject box(const std::string& name, const Eigen::Vector3d& center,
                                  const Eigen::Vector3d& dims,
                                  const std::string& category = "") {
    fallguard::SceneObject obj;
    obj.name = name;
    obj.shape = fallguard::ShapeKind::box;
    obj.pose.translation = center;
    obj.dimensions = dims;
    obj.category_hint = category;
    return obj;
}

inline fallguard::SceneObject cylinder(const std::string& name,
                                       const Eigen::Vector3d& center, double radius,
                                       double height, const std::string& category = "") {
    fallguard::SceneObject obj;
    obj.name = name;
    obj.shape = fallguard::ShapeKind::cylinder;
    obj.pose.translation = center;
    obj.dimensions = Eigen::Vector3d(radius, radius, height);
    obj.category_hint = category;
    return obj;
}

// Camera at `height` looking along +X, pitched down; small image keeps tests fast.
inline fallguard::SceneSpec looking_down_scene(double pitch_deg, double cam_height = 1.2,
                                               int width = 320, int height = 240) {
    fallguard::SceneSpec spec;
    spec.frame_id = "test_scene";
    spec.intrinsics = {260.0, 260.0, double(width) / 2 - 0.5, double(height) / 2 - 0.5,
                       width, height};
    spec.camera_pose =
        fallguard::make_camera_pose({0, 0, cam_height}, 0.0, deg(pitch_deg));
    return spec;
}

}  // namespace test_support

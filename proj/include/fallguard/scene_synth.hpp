#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fallguard/frame.hpp"
#include "fallguard/geometry.hpp"
#include "fallguard/image.hpp"

namespace fallguard {

// Deterministic RGB-D scene renderer: analytic shapes ray-cast against the
// floor plane z = 0, with exact ground truth. The oracle for geometric tests.

enum class ShapeKind { box, cylinder };

struct SceneObject {
    std::string name;
    ShapeKind shape = ShapeKind::box;
    Pose pose;  // object-to-world; translation is the shape center
    // Box: full extents (x, y, z). Cylinder: x = radius, z = height along the
    // local z axis; y is ignored.
    Eigen::Vector3d dimensions{0.1, 0.1, 0.1};
    std::string category_hint;
};

struct SceneSpec {
    std::string frame_id = "synthetic";
    CameraIntrinsics intrinsics{525.0, 525.0, 319.5, 239.5, 640, 480};
    Pose camera_pose;
    std::vector<SceneObject> objects;
    double depth_noise_sigma = 0;      // meters, additive along the ray
    double invalid_pixel_fraction = 0; // dropout probability per pixel
};

struct ObjectTruth {
    std::string name;
    std::string category_hint;
    MaskImage mask;       // pixels where this object is the nearest surface and depth is valid
    WorldPoint centroid;  // mean of the true (noiseless) surface points over the mask
    int pixel_count = 0;
};

struct GroundTruth {
    DepthImage true_depth;  // noiseless, no dropout
    Eigen::Vector3d floor_normal_cam{0, 0, 1};  // floor plane in the camera frame
    double floor_offset_cam = 0;                //   normal . q + offset = 0
    std::vector<ObjectTruth> objects;           // same order as SceneSpec::objects
};

struct RenderResult {
    FrameBundle bundle;
    GroundTruth truth;
};

// Throws ConfigError when the camera is not above the floor or an object
// dips below it.
RenderResult render(const SceneSpec& spec, std::uint32_t seed);

// Camera orientation looking along `yaw` (0 = world +X) pitched down by
// `pitch_down` radians; 90 degrees looks straight at the floor.
Pose make_camera_pose(const Eigen::Vector3d& position, double yaw_rad, double pitch_down_rad);

SceneSpec load_scene_spec(const std::filesystem::path& path);
void save_scene_spec(const SceneSpec& spec, const std::filesystem::path& path);

}  // namespace fallguard

#include "fallguard/geometry.hpp"

#include <cmath>
#include <string>

namespace fallguard {

void validate(const CameraIntrinsics& k) {
    if (k.width <= 0 || k.height <= 0)
        throw ConfigError("intrinsics: image size must be positive");
    if (!(k.fx > 0) || !(k.fy > 0))
        throw ConfigError("intrinsics: focal lengths must be positive");
    if (!(k.cx >= 0 && k.cx < k.width))
        throw ConfigError("intrinsics: cx outside image");
    if (!(k.cy >= 0 && k.cy < k.height))
        throw ConfigError("intrinsics: cy outside image");
}

void validate(const Pose& pose) {
    if (!pose.translation.allFinite())
        throw ConfigError("pose: non-finite translation");
    if (std::abs(pose.orientation.norm() - 1.0) > 1e-9)
        throw ConfigError("pose: quaternion norm deviates from 1 by more than 1e-9");
}

CameraPoint back_project(const PixelPoint& p, double depth_m, const CameraIntrinsics& k) {
    if (!(depth_m > 0) || !std::isfinite(depth_m))
        throw InvalidDepthError("back_project: depth must be finite and > 0, got " +
                                std::to_string(depth_m));
    return {(p.x - k.cx) * depth_m / k.fx, (p.y - k.cy) * depth_m / k.fy, depth_m};
}

PixelPoint project(const CameraPoint& q, const CameraIntrinsics& k) {
    if (!(q.z > 0))
        throw BehindCameraError("project: point has z <= 0");
    return {k.fx * q.x / q.z + k.cx, k.fy * q.y / q.z + k.cy};
}

WorldPoint camera_to_world(const CameraPoint& q, const Pose& cam_pose) {
    return WorldPoint::from(cam_pose.orientation * q.vec() + cam_pose.translation);
}

CameraPoint world_to_camera(const WorldPoint& q, const Pose& cam_pose) {
    return CameraPoint::from(cam_pose.orientation.conjugate() *
                             (q.vec() - cam_pose.translation));
}

WorldPoint ray_ground_intersect(const PixelPoint& p, const CameraIntrinsics& k,
                                const Pose& cam_pose) {
    if (!(cam_pose.translation.z() > 0))
        throw NoIntersectionError("ray_ground_intersect: camera is not above the floor");

    const Eigen::Vector3d dir_cam{(p.x - k.cx) / k.fx, (p.y - k.cy) / k.fy, 1.0};
    const Eigen::Vector3d dir_world = cam_pose.orientation * dir_cam;

    // Forward intersection needs the ray heading downward.
    if (dir_world.z() >= -1e-12)
        throw NoIntersectionError("ray_ground_intersect: ray does not reach the floor");

    const double t = -cam_pose.translation.z() / dir_world.z();
    return WorldPoint::from(cam_pose.translation + t * dir_world);
}

}  // namespace fallguard

#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include "fallguard/errors.hpp"

namespace fallguard {

// Pixel coordinates. Fractional values are fine (e.g. bounding-box centers).
struct PixelPoint {
    double x = 0;
    double y = 0;
};

// Point in the camera frame: X right, Y down, Z forward along the optical axis.
struct CameraPoint {
    double x = 0;
    double y = 0;
    double z = 0;

    Eigen::Vector3d vec() const { return {x, y, z}; }
    static CameraPoint from(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }
};

// Point in the world frame: Z up, floor plane at Z = 0.
struct WorldPoint {
    double x = 0;
    double y = 0;
    double z = 0;

    Eigen::Vector3d vec() const { return {x, y, z}; }
    static WorldPoint from(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }
};

struct CameraIntrinsics {
    double fx = 0;
    double fy = 0;
    double cx = 0;
    double cy = 0;
    int width = 0;
    int height = 0;
};

// Throws ConfigError unless fx,fy > 0 and the principal point lies inside the image.
void validate(const CameraIntrinsics& k);

// Camera-to-world transform: robot base pose already composed with head orientation.
struct Pose {
    Eigen::Vector3d translation{0, 0, 0};
    Eigen::Quaterniond orientation{1, 0, 0, 0};
};

// Throws ConfigError if the quaternion is not unit length within 1e-9.
void validate(const Pose& pose);

// Pixel plus depth to a camera-frame point. Throws InvalidDepthError for
// non-positive or non-finite depth.
CameraPoint back_project(const PixelPoint& p, double depth_m, const CameraIntrinsics& k);

// Inverse of back_project. The result may fall outside the image; callers clip.
// Throws BehindCameraError for z <= 0.
PixelPoint project(const CameraPoint& q, const CameraIntrinsics& k);

WorldPoint camera_to_world(const CameraPoint& q, const Pose& cam_pose);
CameraPoint world_to_camera(const WorldPoint& q, const Pose& cam_pose);

// Intersects the ray from the camera center through pixel p with the floor
// plane z = 0. Throws NoIntersectionError when the ray is parallel to the
// floor, points away from it, or the camera is not above the floor.
WorldPoint ray_ground_intersect(const PixelPoint& p, const CameraIntrinsics& k,
                                const Pose& cam_pose);

}  // namespace fallguard

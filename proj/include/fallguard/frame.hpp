#pragma once

#include <string>

#include "fallguard/geometry.hpp"
#include "fallguard/image.hpp"

namespace fallguard {

// One synchronized RGB + depth frame with the camera calibration and pose.
// The unit of input for the whole pipeline.
struct FrameBundle {
    std::string frame_id;
    RgbImage rgb;
    DepthImage depth;  // meters
    CameraIntrinsics intrinsics;
    Pose camera_pose;  // camera-to-world
};

// Dimension and calibration consistency; throws LoadError naming the field.
void validate(const FrameBundle& bundle);

}  // namespace fallguard

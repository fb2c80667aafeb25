#include "fallguard/frame.hpp"

#include <string>

namespace fallguard {

void validate(const FrameBundle& bundle) {
    validate(bundle.intrinsics);
    validate(bundle.camera_pose);
    if (bundle.rgb.width != bundle.depth.width || bundle.rgb.height != bundle.depth.height)
        throw LoadError("frame '" + bundle.frame_id + "': rgb is " +
                        std::to_string(bundle.rgb.width) + "x" +
                        std::to_string(bundle.rgb.height) + " but depth is " +
                        std::to_string(bundle.depth.width) + "x" +
                        std::to_string(bundle.depth.height));
    if (bundle.rgb.width != bundle.intrinsics.width ||
        bundle.rgb.height != bundle.intrinsics.height)
        throw LoadError("frame '" + bundle.frame_id +
                        "': meta intrinsics size does not match the images");
    if (bundle.frame_id.empty()) throw LoadError("frame: empty frame_id");
}

}  // namespace fallguard

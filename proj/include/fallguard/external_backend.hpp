#pragma once

#include <string>

#include "fallguard/backends.hpp"

namespace fallguard {

// Adapters that forward to an external inference process over local HTTP.
// Wire format:
//   POST /detect    body = binary PPM, header X-Frame-Id
//                   -> {"detections":[{"bbox":[x0,y0,x1,y1],"label":l,"score":s},...]}
//   POST /classify  body = binary PPM, headers X-Center-U, X-Center-V
//                   -> {"label":l,"score":s}
// Results pass through the same validation as every other backend.
class ExternalDetector : public Detector {
public:
    explicit ExternalDetector(std::string base_url) : base_url_(std::move(base_url)) {}

private:
    std::vector<Detection> run_detect(const std::string& frame_id,
                                      const RgbImage& rgb) const override;

    std::string base_url_;
};

class ExternalClassifier : public Classifier {
public:
    explicit ExternalClassifier(std::string base_url) : base_url_(std::move(base_url)) {}

private:
    ClassificationResult run_classify(const RgbImage& crop,
                                      const PixelPoint& source_center) const override;

    std::string base_url_;
};

// In-memory PPM bytes, shared by the adapters and their tests.
std::string encode_ppm(const RgbImage& img);

}  // namespace fallguard

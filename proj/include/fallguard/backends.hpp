#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "fallguard/geometry.hpp"
#include "fallguard/image.hpp"

namespace fallguard {

// Pixel-space bounding box, x_min < x_max and y_min < y_max.
struct BBox {
    double x_min = 0;
    double y_min = 0;
    double x_max = 0;
    double y_max = 0;

    double width() const { return x_max - x_min; }
    double height() const { return y_max - y_min; }
    double area() const { return width() * height(); }
    PixelPoint center() const { return {(x_min + x_max) / 2, (y_min + y_max) / 2}; }
    bool contains(const BBox& other) const {
        return x_min <= other.x_min && y_min <= other.y_min && x_max >= other.x_max &&
               y_max >= other.y_max;
    }
};

// Throws Error naming the reason unless the box is well-formed and inside
// the given image.
void validate_bbox(const BBox& box, int img_width, int img_height);

enum class SourcePath { rgb, depth };
std::string to_string(SourcePath s);

struct Detection {
    BBox bbox;
    std::string label;
    double score = 0;  // in [0, 1]
    SourcePath source = SourcePath::rgb;
};

struct ClassificationResult {
    std::string label;
    double score = 0;
};

// RGB object detector contract. Results are validated at this boundary, not
// trusted: every detection must carry an in-bounds box, a non-empty label and
// a score in [0, 1].
class Detector {
public:
    virtual ~Detector() = default;
    std::vector<Detection> detect(const std::string& frame_id, const RgbImage& rgb) const;

private:
    virtual std::vector<Detection> run_detect(const std::string& frame_id,
                                              const RgbImage& rgb) const = 0;
};

// Crop classifier contract. `source_center` is the pixel the crop was taken
// around (the projected segment centroid); live backends may ignore it.
// Throws std::invalid_argument for an empty crop.
class Classifier {
public:
    virtual ~Classifier() = default;
    ClassificationResult classify(const RgbImage& crop, const PixelPoint& source_center) const;

private:
    virtual ClassificationResult run_classify(const RgbImage& crop,
                                              const PixelPoint& source_center) const = 0;
};

// Parsed per-frame fixture document: canned detections plus crop labels keyed
// by segment centroid pixel.
struct FixtureDoc {
    struct CropLabel {
        PixelPoint pixel;
        std::string label;
        double score = 0;
    };

    std::string frame_id;
    std::vector<Detection> detections;
    std::vector<CropLabel> classifications;
};

// Box invariants are enforced at load; out-of-bounds fixtures are rejected
// with LoadError.
FixtureDoc load_fixture(const std::filesystem::path& path, int img_width, int img_height);
FixtureDoc parse_fixture(const std::string& json_text, const std::string& origin,
                         int img_width, int img_height);

// Pure lookup by frame id; unknown frames raise MissingFixtureError.
class FixtureDetector : public Detector {
public:
    FixtureDetector() = default;
    explicit FixtureDetector(const FixtureDoc& doc) { add(doc); }
    void add(const FixtureDoc& doc);

private:
    std::vector<Detection> run_detect(const std::string& frame_id,
                                      const RgbImage& rgb) const override;

    std::map<std::string, std::vector<Detection>> frames_;
};

// Nearest crop-label mapping within match_radius_px of the crop's source
// pixel; anything farther is "unknown" with score 0.
class FixtureClassifier : public Classifier {
public:
    FixtureClassifier() = default;
    explicit FixtureClassifier(const FixtureDoc& doc, double match_radius_px = 10.0)
        : mappings_(doc.classifications), match_radius_px_(match_radius_px) {}

private:
    ClassificationResult run_classify(const RgbImage& crop,
                                      const PixelPoint& source_center) const override;

    std::vector<FixtureDoc::CropLabel> mappings_;
    double match_radius_px_ = 10.0;
};

// Scales the box by `factor` about its center and clips to the image. The
// result always contains the original box.
BBox expand_roi(const BBox& box, double factor, int img_width, int img_height);

// Integer-clipped pixel copy of the box region.
RgbImage crop_image(const RgbImage& img, const BBox& box);

}  // namespace fallguard

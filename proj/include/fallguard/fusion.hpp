#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fallguard/backends.hpp"
#include "fallguard/geometry.hpp"

namespace fallguard {

enum class Category { animal, furniture, small_object, unknown };

std::string to_string(Category c);
Category category_from_string(const std::string& name);  // ConfigError on unknown

// Label-to-category table covering both detector (COCO-style) and classifier
// (ImageNet-style) vocabularies. Lookups are case-insensitive; unmapped
// labels are Category::unknown.
class Taxonomy {
public:
    static Taxonomy builtin();
    static Taxonomy load(const std::filesystem::path& path);  // flat `label=category` lines

    Category map_label(std::string_view label) const;
    void set(std::string_view label, Category category);
    std::size_t size() const { return map_.size(); }

private:
    std::unordered_map<std::string, Category> map_;
};

struct RawLabel {
    std::string label;
    double score = 0;
    SourcePath source = SourcePath::rgb;
};

// Fused object: taxonomy category, world position and the provenance of the
// observations that produced it.
struct LocalizedObject {
    Category category = Category::unknown;
    std::vector<RawLabel> raw_labels;
    WorldPoint position;
    BBox bbox;  // union of the merged boxes
    bool from_rgb = false;
    bool from_depth = false;
};

// One localized detection from either path, ready for merging.
struct PathObservation {
    std::string label;
    double score = 0;
    SourcePath source = SourcePath::rgb;
    BBox bbox;
    WorldPoint position;
};

struct FusionParams {
    double iou_threshold = 0.3;
    double max_position_gap = 0.3;  // meters
};

// Intersection area over union area, in [0, 1].
double iou(const BBox& a, const BBox& b);

// Deduplicates the two paths: pairs that overlap in the image (iou >=
// threshold) or sit close in the world (<= max_position_gap), with compatible
// categories (equal, or either unknown), merge into one object carrying both
// sources. Matching is greedy in descending IoU order, each observation used
// at most once; the rest pass through unchanged. Merged objects keep the
// depth-path position (physically measured).
std::vector<LocalizedObject> merge_paths(const std::vector<PathObservation>& rgb,
                                         const std::vector<PathObservation>& depth,
                                         const Taxonomy& taxonomy, const FusionParams& params);

}  // namespace fallguard

#include "fallguard/fusion.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>

namespace fallguard {

std::string to_string(Category c) {
    switch (c) {
        case Category::animal: return "animal";
        case Category::furniture: return "furniture";
        case Category::small_object: return "small_object";
        case Category::unknown: return "unknown";
    }
    return "?";
}

Category category_from_string(const std::string& name) {
    if (name == "animal") return Category::animal;
    if (name == "furniture") return Category::furniture;
    if (name == "small_object") return Category::small_object;
    if (name == "unknown") return Category::unknown;
    throw ConfigError("unknown category '" + name + "'");
}

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return char(std::tolower(c)); });
    return out;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

Taxonomy Taxonomy::builtin() {
    Taxonomy t;
    // Detector vocabulary (COCO-style).
    for (const char* label : {"cat", "dog", "bird", "horse", "sheep", "cow", "bear",
                              "teddy bear"})
        t.set(label, Category::animal);
    for (const char* label : {"chair", "couch", "sofa", "bed", "dining table", "bench",
                              "toilet", "desk", "table", "potted plant", "refrigerator"})
        t.set(label, Category::furniture);
    for (const char* label : {"book", "bottle", "cup", "bowl", "laptop", "cell phone",
                              "keyboard", "mouse", "remote", "vase", "backpack", "handbag",
                              "umbrella", "suitcase", "scissors", "toothbrush", "banana",
                              "apple", "sports ball", "frisbee", "shoe", "clock"})
        t.set(label, Category::small_object);

    // Classifier vocabulary (ImageNet-style); breeds come up constantly for pets.
    for (const char* label : {"papillon", "chihuahua", "pomeranian", "pug", "beagle",
                              "labrador retriever", "golden retriever", "tabby",
                              "tabby cat", "egyptian cat", "persian cat", "siamese cat",
                              "tiger cat", "lynx", "hamster", "guinea pig", "rabbit",
                              "angora"})
        t.set(label, Category::animal);
    for (const char* label : {"rocking chair", "folding chair", "studio couch", "wardrobe",
                              "bookcase", "chiffonier", "dining table", "crib",
                              "four-poster", "park bench"})
        t.set(label, Category::furniture);
    for (const char* label : {"modem", "power drill", "remote control", "joystick",
                              "ipod", "cellular telephone", "paper towel", "carton",
                              "envelope", "notebook", "binder", "rubber eraser", "mousetrap",
                              "running shoe", "sandal", "clog", "water bottle", "pop bottle",
                              "coffee mug", "ball", "plastic bag", "box", "book jacket",
                              "comic book", "switch", "spotlight", "charger"})
        t.set(label, Category::small_object);
    return t;
}

Taxonomy Taxonomy::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open taxonomy " + path.string());

    Taxonomy t;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        // trim
        const auto begin = line.find_first_not_of(" \t\r");
        if (begin == std::string::npos) continue;
        const auto end = line.find_last_not_of(" \t\r");
        line = line.substr(begin, end - begin + 1);

        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw LoadError(path.string() + ":" + std::to_string(line_no) +
                            ": expected `label=category`");
        const std::string label = trim(line.substr(0, eq));
        const std::string category = trim(line.substr(eq + 1));
        try {
            t.set(label, category_from_string(category));
        } catch (const ConfigError& e) {
            throw LoadError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return t;
}

Category Taxonomy::map_label(std::string_view label) const {
    const auto it = map_.find(lower(label));
    return it == map_.end() ? Category::unknown : it->second;
}

void Taxonomy::set(std::string_view label, Category category) {
    map_[lower(label)] = category;
}

double iou(const BBox& a, const BBox& b) {
    const double ix = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
    const double iy = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
    if (ix <= 0 || iy <= 0) return 0.0;
    const double inter = ix * iy;
    return inter / (a.area() + b.area() - inter);
}

namespace {

BBox union_box(const BBox& a, const BBox& b) {
    return {std::min(a.x_min, b.x_min), std::min(a.y_min, b.y_min),
            std::max(a.x_max, b.x_max), std::max(a.y_max, b.y_max)};
}

double position_gap(const WorldPoint& a, const WorldPoint& b) {
    return (a.vec() - b.vec()).norm();
}

bool categories_compatible(Category a, Category b) {
    return a == b || a == Category::unknown || b == Category::unknown;
}

LocalizedObject solo_object(const PathObservation& obs, const Taxonomy& taxonomy) {
    LocalizedObject out;
    out.category = taxonomy.map_label(obs.label);
    out.raw_labels.push_back({obs.label, obs.score, obs.source});
    out.position = obs.position;
    out.bbox = obs.bbox;
    out.from_rgb = obs.source == SourcePath::rgb;
    out.from_depth = obs.source == SourcePath::depth;
    return out;
}

}  // namespace

std::vector<LocalizedObject> merge_paths(const std::vector<PathObservation>& rgb,
                                         const std::vector<PathObservation>& depth,
                                         const Taxonomy& taxonomy,
                                         const FusionParams& params) {
    struct Candidate {
        double overlap;
        std::size_t rgb_idx;
        std::size_t depth_idx;
    };

    std::vector<Candidate> candidates;
    for (std::size_t i = 0; i < rgb.size(); ++i) {
        const Category cat_rgb = taxonomy.map_label(rgb[i].label);
        for (std::size_t j = 0; j < depth.size(); ++j) {
            if (!categories_compatible(cat_rgb, taxonomy.map_label(depth[j].label))) continue;
            const double overlap = iou(rgb[i].bbox, depth[j].bbox);
            const bool close = position_gap(rgb[i].position, depth[j].position) <=
                               params.max_position_gap;
            if (overlap >= params.iou_threshold || close)
                candidates.push_back({overlap, i, j});
        }
    }

    // Descending IoU; ties broken by box position, then by input order.
    std::sort(candidates.begin(), candidates.end(),
              [&rgb, &depth](const Candidate& a, const Candidate& b) {
                  if (a.overlap != b.overlap) return a.overlap > b.overlap;
                  const BBox& ra = rgb[a.rgb_idx].bbox;
                  const BBox& rb = rgb[b.rgb_idx].bbox;
                  if (ra.x_min != rb.x_min) return ra.x_min < rb.x_min;
                  if (ra.y_min != rb.y_min) return ra.y_min < rb.y_min;
                  const BBox& da = depth[a.depth_idx].bbox;
                  const BBox& db = depth[b.depth_idx].bbox;
                  if (da.x_min != db.x_min) return da.x_min < db.x_min;
                  if (da.y_min != db.y_min) return da.y_min < db.y_min;
                  return std::tie(a.rgb_idx, a.depth_idx) < std::tie(b.rgb_idx, b.depth_idx);
              });

    std::vector<int> rgb_partner(rgb.size(), -1);
    std::vector<std::uint8_t> depth_used(depth.size(), 0);
    for (const auto& c : candidates) {
        if (rgb_partner[c.rgb_idx] >= 0 || depth_used[c.depth_idx]) continue;
        rgb_partner[c.rgb_idx] = int(c.depth_idx);
        depth_used[c.depth_idx] = 1;
    }

    std::vector<LocalizedObject> fused;
    fused.reserve(rgb.size() + depth.size());
    for (std::size_t i = 0; i < rgb.size(); ++i) {
        if (rgb_partner[i] < 0) {
            fused.push_back(solo_object(rgb[i], taxonomy));
            continue;
        }
        const PathObservation& r = rgb[i];
        const PathObservation& d = depth[std::size_t(rgb_partner[i])];

        LocalizedObject obj;
        const Category cat_rgb = taxonomy.map_label(r.label);
        const Category cat_depth = taxonomy.map_label(d.label);
        obj.category = cat_rgb == Category::unknown ? cat_depth : cat_rgb;
        obj.raw_labels.push_back({r.label, r.score, r.source});
        obj.raw_labels.push_back({d.label, d.score, d.source});
        obj.position = d.position;  // depth centroid is physically measured
        obj.bbox = union_box(r.bbox, d.bbox);
        obj.from_rgb = true;
        obj.from_depth = true;
        fused.push_back(std::move(obj));
    }
    for (std::size_t j = 0; j < depth.size(); ++j)
        if (!depth_used[j]) fused.push_back(solo_object(depth[j], taxonomy));

    return fused;
}

}  // namespace fallguard

#include "fallguard/hazard.hpp"

#include <algorithm>
#include <cmath>

namespace fallguard {

OccupancyMap OccupancyMap::filled(int w, int h, double res, double ox, double oy,
                                  CellState s) {
    OccupancyMap m;
    m.width = w;
    m.height = h;
    m.resolution = res;
    m.origin_x = ox;
    m.origin_y = oy;
    m.cells.assign(std::size_t(w) * h, s);
    return m;
}

bool OccupancyMap::cell_of(double wx, double wy, int& cx, int& cy) const {
    cx = int(std::floor((wx - origin_x) / resolution));
    cy = int(std::floor((wy - origin_y) / resolution));
    return cx >= 0 && cx < width && cy >= 0 && cy < height;
}

std::string to_string(Severity s) {
    switch (s) {
        case Severity::none: return "none";
        case Severity::moderate: return "moderate";
        case Severity::high: return "high";
    }
    return "?";
}

Severity severity_from_string(const std::string& name) {
    if (name == "none") return Severity::none;
    if (name == "moderate") return Severity::moderate;
    if (name == "high") return Severity::high;
    throw ConfigError("unknown severity '" + name + "'");
}

bool is_on_floor(const WorldPoint& p, double h_max) {
    return p.z >= 0 && p.z <= h_max;
}

bool near_occupied(const WorldPoint& p, const OccupancyMap& map, double r) {
    int cx = 0;
    int cy = 0;
    // Outside the map there is no evidence of free space; stay conservative.
    if (!map.cell_of(p.x, p.y, cx, cy)) return true;

    const int reach = int(std::ceil(r / map.resolution));
    for (int dy = -reach; dy <= reach; ++dy) {
        const int y = cy + dy;
        if (y < 0 || y >= map.height) continue;
        for (int dx = -reach; dx <= reach; ++dx) {
            const int x = cx + dx;
            if (x < 0 || x >= map.width) continue;
            if (map.at(x, y) != CellState::occupied) continue;
            const double dist = map.resolution * std::hypot(double(dx), double(dy));
            if (dist <= r) return true;
        }
    }
    return false;
}

HazardReport classify_hazard(const std::string& frame_id,
                             const std::vector<LocalizedObject>& objects,
                             const OccupancyMap& map, const HazardParams& params) {
    HazardReport report;
    report.frame_id = frame_id;
    report.entries.reserve(objects.size());

    for (const auto& obj : objects) {
        HazardEntry entry;
        entry.object = obj;

        if (!is_on_floor(obj.position, params.max_floor_height)) {
            entry.severity = Severity::none;
            entry.rule_trace = {"R1:none"};
        } else if (obj.category == Category::furniture) {
            if (near_occupied(obj.position, map, params.wall_distance)) {
                entry.severity = Severity::none;
                entry.rule_trace = {"R1:no-match", "R2:none"};
            } else {
                entry.severity = Severity::high;
                entry.rule_trace = {"R1:no-match", "R2:no-match", "R3:high"};
            }
        } else if (obj.category == Category::animal) {
            entry.severity = Severity::moderate;
            entry.rule_trace = {"R1:no-match", "R2:no-match", "R3:no-match", "R4:moderate"};
        } else {
            entry.severity = Severity::high;
            entry.rule_trace = {"R1:no-match", "R2:no-match", "R3:no-match", "R4:no-match",
                                "R5:high"};
        }
        report.entries.push_back(std::move(entry));
    }
    return report;
}

}  // namespace fallguard

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fallguard/fusion.hpp"
#include "fallguard/geometry.hpp"

namespace fallguard {

enum class CellState : std::uint8_t { free_space, occupied, unknown };

// 2-D floor grid; walls and fixed furniture appear as occupied. `origin_*` is
// the world position of the minimum corner of cell (0, 0).
struct OccupancyMap {
    int width = 0;
    int height = 0;
    double resolution = 0.05;  // meters per cell
    double origin_x = 0;
    double origin_y = 0;
    std::vector<CellState> cells;  // row-major, row = y cell index

    static OccupancyMap filled(int w, int h, double res, double ox, double oy, CellState s);

    CellState at(int cx, int cy) const { return cells[std::size_t(cy) * width + cx]; }
    CellState& at(int cx, int cy) { return cells[std::size_t(cy) * width + cx]; }
    bool cell_of(double wx, double wy, int& cx, int& cy) const;  // false when outside
};

enum class Severity { none, moderate, high };  // ordered: none < moderate < high
std::string to_string(Severity s);
Severity severity_from_string(const std::string& name);  // ConfigError on unknown

struct HazardParams {
    double max_floor_height = 0.25;  // meters; above this counts as on-furniture
    double wall_distance = 0.5;      // meters; "near occupied" radius
};

struct HazardEntry {
    LocalizedObject object;
    Severity severity = Severity::none;
    std::vector<std::string> rule_trace;  // rule ids in evaluation order, terminal last
};

struct HazardReport {
    std::string frame_id;
    std::vector<HazardEntry> entries;  // one per fused object, severity none included
};

// True iff 0 <= p.z <= h_max (boundary inclusive).
bool is_on_floor(const WorldPoint& p, double h_max);

// True iff any occupied cell center lies within Euclidean distance r of the
// cell containing p. Points outside the map extent count as near-occupied.
bool near_occupied(const WorldPoint& p, const OccupancyMap& map, double r);

// Rule cascade, first matching terminal rule wins:
//   R1  not on floor                        -> none   (probably on furniture)
//   R2  furniture and near occupied cells   -> none   (fixed furniture)
//   R3  furniture away from occupied cells  -> high   (furniture mid-room)
//   R4  animal                              -> moderate
//   R5  everything else                     -> high
HazardReport classify_hazard(const std::string& frame_id,
                             const std::vector<LocalizedObject>& objects,
                             const OccupancyMap& map, const HazardParams& params);

}  // namespace fallguard

#ifndef IPS_ASSEMBLY_HPP
#define IPS_ASSEMBLY_HPP

#include <algorithm>
#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "ips/errors.hpp"
#include "ips/geometry.hpp"
#include "ips/pose_estimation.hpp"
#include "ips/vehicle_geometry.hpp"

namespace ips {

/// Detected LED points of one frame, already mapped to the world plane so
/// that the vehicle distances are metric constants. Callers must have merged
/// points closer than 1e-6 m.
struct PointSet {
    std::vector<WorldPoint> points;
};

/// Per-point candidate sets. back_partners[i] holds the points at
/// vehicle-width (within tolerance) of point i. area[i] holds the points
/// with which i can share a vehicle: for a point in a back pair the area is
/// restricted to the positions where the front and identification LEDs of
/// that pair can be; for any other point it is everything within
/// vehicle-length. Both relations are symmetric.
struct NeighborMap {
    std::vector<WorldPoint> points;
    std::vector<std::vector<int>> back_partners;
    std::vector<std::vector<int>> area;  // sorted ascending, excludes self

    int candidate_count(int p) const { return static_cast<int>(area[p].size()) + 1; }

    /// Drops a classified point from every remaining candidate set. Both
    /// relations are symmetric, so only the point's own neighbors hold it.
    void remove_point(int p) {
        for (int q : area[p]) {
            auto& a = area[q];
            a.erase(std::remove(a.begin(), a.end(), p), a.end());
        }
        for (int q : back_partners[p]) {
            auto& b = back_partners[q];
            b.erase(std::remove(b.begin(), b.end(), p), b.end());
        }
        area[p].clear();
        back_partners[p].clear();
    }
};

/// Point indices grouped as one vehicle, with the role of each point.
/// id_led is -1 when the identification LED was off or occluded.
struct AssembledVehicle {
    int back_left{-1};
    int back_right{-1};
    int front{-1};
    int id_led{-1};

    std::vector<int> indices() const {
        std::vector<int> v{back_left, back_right, front};
        if (id_led >= 0) v.push_back(id_led);
        std::sort(v.begin(), v.end());
        return v;
    }
    int size() const { return id_led >= 0 ? 4 : 3; }
};

struct AssemblyOutcome {
    std::vector<AssembledVehicle> vehicles;
    std::vector<int> disturbance_points;
    std::vector<int> unmapped_points;
};

struct MatchResult {
    enum class Kind { vehicle, disturbance, not_yet };
    Kind kind{Kind::not_yet};
    AssembledVehicle vehicle{};
};

namespace detail {

/// All pairwise distances of the given points, ascending.
inline std::vector<double> sorted_distances(std::span<const WorldPoint> pts) {
    std::vector<double> d;
    d.reserve(pts.size() * (pts.size() - 1) / 2);
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) d.push_back(distance(pts[i], pts[j]));
    std::sort(d.begin(), d.end());
    return d;
}

/// Element-wise comparison of sorted distance lists within tolerance.
inline bool distances_match(std::span<const double> measured, std::span<const double> reference,
                            double tol) {
    if (measured.size() != reference.size()) return false;
    for (std::size_t i = 0; i < measured.size(); ++i)
        if (std::abs(measured[i] - reference[i]) > tol) return false;
    return true;
}

inline bool matches_vehicle_distances(std::span<const WorldPoint> pts, const VehicleGeometry& g) {
    const auto d = sorted_distances(pts);
    if (pts.size() == 3) return distances_match(d, g.ref_distances3, g.tolerance);
    if (pts.size() == 4) return distances_match(d, g.ref_distances4, g.tolerance);
    return false;
}

/// True when r can be the front or identification LED of the back pair
/// (a, b): both of its distances to the pair match the corresponding
/// reference distances within tolerance, under either assignment of the
/// pair to the left/right back LEDs. Equivalent to the intersection of the
/// two tolerance annuli around the back points, which covers both mirror
/// placements of the triangle.
inline bool in_back_pair_area(WorldPoint a, WorldPoint b, WorldPoint r, const VehicleGeometry& g) {
    const double ra = distance(r, a);
    const double rb = distance(r, b);
    const double tol = g.tolerance;
    const bool front_ok =
        (std::abs(ra - g.d_front_back_left) <= tol && std::abs(rb - g.d_front_back_right) <= tol) ||
        (std::abs(ra - g.d_front_back_right) <= tol && std::abs(rb - g.d_front_back_left) <= tol);
    const bool id_ok =
        (std::abs(ra - g.d_id_back_left) <= tol && std::abs(rb - g.d_id_back_right) <= tol) ||
        (std::abs(ra - g.d_id_back_right) <= tol && std::abs(rb - g.d_id_back_left) <= tol);
    return front_ok || id_ok;
}

/// Labels a matched point group. Returns id_led = -1 for three points.
inline AssembledVehicle label_vehicle(std::span<const int> idx, std::span<const WorldPoint> all,
                                      const VehicleGeometry& g) {
    AssembledVehicle v;
    std::array<int, 4> pos_idx{};
    int n_pos = 0;
    if (idx.size() == 4) {
        std::array<WorldPoint, 4> pts{};
        for (int i = 0; i < 4; ++i) pts[i] = all[idx[i]];
        const int id = split_id_led_index(pts);
        v.id_led = idx[id];
        for (int i = 0; i < 4; ++i)
            if (i != id) pos_idx[n_pos++] = idx[i];
    } else {
        for (int i = 0; i < 3; ++i) pos_idx[n_pos++] = idx[i];
    }
    std::array<WorldPoint, 3> pos_pts{};
    for (int i = 0; i < 3; ++i) pos_pts[i] = all[pos_idx[i]];
    const BackClassification cls = classify_back(pos_pts, g);
    v.back_left = pos_idx[cls.back_left];
    v.back_right = pos_idx[cls.back_right];
    v.front = pos_idx[cls.front];
    return v;
}

}  // namespace detail

namespace detail {

/// Uniform grid over the points with cell size >= the largest query radius,
/// so any neighborhood lookup only has to visit the 3x3 surrounding cells.
class PointGrid {
public:
    PointGrid(std::span<const WorldPoint> pts, double cell) : cell_(cell), pts_(pts) {
        if (pts.empty()) return;
        double min_x = pts[0].x, min_y = pts[0].y;
        for (const WorldPoint& p : pts) {
            min_x = std::min(min_x, p.x);
            min_y = std::min(min_y, p.y);
        }
        origin_ = {min_x, min_y};
        cols_ = 1;
        rows_ = 1;
        for (const WorldPoint& p : pts) {
            cols_ = std::max(cols_, cx(p) + 1);
            rows_ = std::max(rows_, cy(p) + 1);
        }
        cells_.assign(static_cast<std::size_t>(cols_) * rows_, {});
        for (int i = 0; i < static_cast<int>(pts.size()); ++i)
            cells_[cell_index(pts[i])].push_back(i);
    }

    /// Visits the indices of all points in the 3x3 cells around p.
    template <typename F>
    void for_nearby(WorldPoint p, F&& fn) const {
        if (pts_.empty()) return;
        const int x = cx(p), y = cy(p);
        for (int gy = std::max(0, y - 1); gy <= std::min(rows_ - 1, y + 1); ++gy)
            for (int gx = std::max(0, x - 1); gx <= std::min(cols_ - 1, x + 1); ++gx)
                for (int idx : cells_[static_cast<std::size_t>(gy) * cols_ + gx]) fn(idx);
    }

private:
    int cx(WorldPoint p) const { return static_cast<int>((p.x - origin_.x) / cell_); }
    int cy(WorldPoint p) const { return static_cast<int>((p.y - origin_.y) / cell_); }
    std::size_t cell_index(WorldPoint p) const {
        return static_cast<std::size_t>(cy(p)) * cols_ + cx(p);
    }

    double cell_;
    std::span<const WorldPoint> pts_;
    WorldPoint origin_{};
    int cols_ = 0, rows_ = 0;
    std::vector<std::vector<int>> cells_;
};

}  // namespace detail

/// Builds the candidate sets for every point. Back pairs are exactly the
/// point pairs whose distance matches vehicle-width within tolerance; their
/// members search only the mirror regions where the rest of their vehicle
/// can be. Every other point searches the full vehicle-length disk. The
/// relation is then symmetrized: q stays in area(p) only if p is in area(q).
inline NeighborMap build_neighbor_map(const PointSet& ps, const VehicleGeometry& geom) {
    const auto& pts = ps.points;
    const int n = static_cast<int>(pts.size());
    NeighborMap nm;
    nm.points = pts;
    nm.back_partners.assign(n, {});
    nm.area.assign(n, {});

    const double reach = geom.vehicle_length + geom.tolerance;
    const detail::PointGrid grid(pts, reach);

    for (int i = 0; i < n; ++i) {
        grid.for_nearby(pts[i], [&](int j) {
            if (j <= i) return;
            if (std::abs(distance(pts[i], pts[j]) - geom.vehicle_width) <= geom.tolerance) {
                nm.back_partners[i].push_back(j);
                nm.back_partners[j].push_back(i);
            }
        });
    }

    for (auto& partners : nm.back_partners) std::sort(partners.begin(), partners.end());

    std::vector<std::vector<int>> raw(n);
    for (int i = 0; i < n; ++i) {
        if (nm.back_partners[i].empty()) {
            grid.for_nearby(pts[i], [&](int j) {
                if (j != i && distance(pts[i], pts[j]) <= reach) raw[i].push_back(j);
            });
        } else {
            for (int q : nm.back_partners[i]) {
                raw[i].push_back(q);
                grid.for_nearby(pts[i], [&](int r) {
                    if (r == i || r == q) return;
                    if (detail::in_back_pair_area(pts[i], pts[q], pts[r], geom))
                        raw[i].push_back(r);
                });
            }
        }
        std::sort(raw[i].begin(), raw[i].end());
        raw[i].erase(std::unique(raw[i].begin(), raw[i].end()), raw[i].end());
    }

    for (int i = 0; i < n; ++i) {
        for (int j : raw[i])
            if (std::binary_search(raw[j].begin(), raw[j].end(), i)) nm.area[i].push_back(j);
    }
    return nm;
}

/// One matching step for point p. With p's candidate set of size n
/// (including p): fewer than 3 candidates make p a disturbance point, more
/// than 4 postpone it. Otherwise the candidate sets of all of p's candidates
/// are intersected with p's own; only if the intersection reproduces p's set
/// and the sorted distances match the reference layout is a vehicle formed.
inline MatchResult match_step(int p, const NeighborMap& nm, const VehicleGeometry& geom) {
    const auto& cand = nm.area[p];
    const int n = static_cast<int>(cand.size()) + 1;
    if (n < 3) return {MatchResult::Kind::disturbance, {}};
    if (n > 4) return {MatchResult::Kind::not_yet, {}};

    std::vector<int> own;
    own.reserve(n);
    own.push_back(p);
    own.insert(own.end(), cand.begin(), cand.end());
    std::sort(own.begin(), own.end());

    std::vector<int> inter = own;
    std::vector<int> next;
    for (int c : cand) {
        std::vector<int> other;
        other.reserve(nm.area[c].size() + 1);
        other.push_back(c);
        other.insert(other.end(), nm.area[c].begin(), nm.area[c].end());
        std::sort(other.begin(), other.end());
        next.clear();
        std::set_intersection(inter.begin(), inter.end(), other.begin(), other.end(),
                              std::back_inserter(next));
        inter.swap(next);
    }

    if (inter == own) {
        std::vector<WorldPoint> pts;
        pts.reserve(own.size());
        for (int i : own) pts.push_back(nm.points[i]);
        if (detail::matches_vehicle_distances(pts, geom))
            return {MatchResult::Kind::vehicle, detail::label_vehicle(own, nm.points, geom)};
        if (n == 3) return {MatchResult::Kind::disturbance, {}};
        return {MatchResult::Kind::not_yet, {}};
    }
    if (n == 3) return {MatchResult::Kind::disturbance, {}};
    return {MatchResult::Kind::not_yet, {}};
}

struct BruteForceResult {
    std::vector<AssembledVehicle> candidates;
    // Index pairs into candidates that share at least one point.
    std::vector<std::pair<int, int>> conflicts;
};

/// Exhaustive check of every 3- and 4-subset against the reference
/// distances. Feasible for small point counts only; used as the correctness
/// oracle and as the fallback when the incremental procedure stalls.
inline BruteForceResult brute_force_assemble(const PointSet& ps, const VehicleGeometry& geom) {
    const auto& pts = ps.points;
    const int n = static_cast<int>(pts.size());
    if (n > 30) throw ConfigError("brute_force_assemble: more than 30 points");
    BruteForceResult result;

    const auto consider = [&](std::span<const int> idx) {
        std::vector<WorldPoint> sub;
        sub.reserve(idx.size());
        for (int i : idx) sub.push_back(pts[i]);
        if (detail::matches_vehicle_distances(sub, geom))
            result.candidates.push_back(detail::label_vehicle(idx, pts, geom));
    };

    std::array<int, 4> idx{};
    for (idx[0] = 0; idx[0] < n; ++idx[0])
        for (idx[1] = idx[0] + 1; idx[1] < n; ++idx[1])
            for (idx[2] = idx[1] + 1; idx[2] < n; ++idx[2]) {
                consider(std::span<const int>(idx.data(), 3));
                for (idx[3] = idx[2] + 1; idx[3] < n; ++idx[3])
                    consider(std::span<const int>(idx.data(), 4));
            }

    for (int a = 0; a < static_cast<int>(result.candidates.size()); ++a) {
        const auto ia = result.candidates[a].indices();
        for (int b = a + 1; b < static_cast<int>(result.candidates.size()); ++b) {
            const auto ib = result.candidates[b].indices();
            const bool overlap = std::any_of(ia.begin(), ia.end(), [&ib](int i) {
                return std::binary_search(ib.begin(), ib.end(), i);
            });
            if (overlap) result.conflicts.emplace_back(a, b);
        }
    }
    return result;
}

/// Full assembly: repeatedly pick the unclassified point with the fewest
/// candidates (lowest index on ties), try a matching step, and on success
/// remove the classified points from all remaining candidate sets. Stops
/// when everything is classified or a full pass makes no progress. A stall
/// with at most 30 points left falls back to the exhaustive check with
/// greedy conflict resolution (largest candidate first, then lowest index).
inline AssemblyOutcome assemble(const PointSet& ps, const VehicleGeometry& geom) {
    NeighborMap nm = build_neighbor_map(ps, geom);
    const int n = static_cast<int>(ps.points.size());
    std::vector<char> alive(n, 1);
    std::vector<char> tried(n, 0);
    AssemblyOutcome out;

    int remaining = n;
    while (remaining > 0) {
        // Probe alive points in ascending (candidate count, index) order
        // until one classifies; mappings only change on progress, so the
        // tried mask reproduces the sorted scan without rebuilding it.
        std::fill(tried.begin(), tried.end(), 0);
        bool progressed = false;
        for (;;) {
            int p = -1, best_n = 1 << 30;
            for (int i = 0; i < n; ++i) {
                if (!alive[i] || tried[i]) continue;
                const int c = nm.candidate_count(i);
                if (c < best_n) {
                    best_n = c;
                    p = i;
                }
            }
            if (p < 0) break;
            const MatchResult res = match_step(p, nm, geom);
            if (res.kind == MatchResult::Kind::vehicle) {
                for (int m : res.vehicle.indices()) {
                    nm.remove_point(m);
                    alive[m] = 0;
                    --remaining;
                }
                out.vehicles.push_back(res.vehicle);
                progressed = true;
                break;
            }
            if (res.kind == MatchResult::Kind::disturbance) {
                nm.remove_point(p);
                alive[p] = 0;
                --remaining;
                out.disturbance_points.push_back(p);
                progressed = true;
                break;
            }
            tried[p] = 1;
        }
        if (!progressed) break;
    }

    if (remaining > 0 && remaining <= 30) {
        // Stalled on ambiguity; resolve the leftover subset exhaustively.
        std::vector<int> left;
        for (int i = 0; i < n; ++i)
            if (alive[i]) left.push_back(i);
        PointSet sub;
        sub.points.reserve(left.size());
        for (int i : left) sub.points.push_back(ps.points[i]);

        BruteForceResult bf = brute_force_assemble(sub, geom);
        std::vector<std::pair<std::vector<int>, AssembledVehicle>> ranked;
        for (auto& c : bf.candidates) ranked.emplace_back(c.indices(), c);
        std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
            if (a.first.size() != b.first.size()) return a.first.size() > b.first.size();
            return a.first < b.first;
        });
        for (const auto& [sub_idx, veh] : ranked) {
            const bool free = std::all_of(sub_idx.begin(), sub_idx.end(),
                                          [&](int i) { return alive[left[i]]; });
            if (!free) continue;
            AssembledVehicle mapped;
            mapped.back_left = left[veh.back_left];
            mapped.back_right = left[veh.back_right];
            mapped.front = left[veh.front];
            mapped.id_led = veh.id_led >= 0 ? left[veh.id_led] : -1;
            for (int i : sub_idx) {
                alive[left[i]] = 0;
                --remaining;
            }
            out.vehicles.push_back(mapped);
        }
    }

    for (int i = 0; i < n; ++i)
        if (alive[i]) out.unmapped_points.push_back(i);
    return out;
}

}  // namespace ips

#endif  // IPS_ASSEMBLY_HPP

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <unordered_map>
#include <vector>

#include "ssb/errors.hpp"
#include "ssb/params.hpp"
#include "ssb/phase_flow.hpp"

namespace ssb {

/// One iso-energy polyline in the (s, p) plane. flow_sign is the sign of the
/// classical flow projected on the polyline tangent at its midpoint: the
/// direction-of-motion annotation for the contour.
struct ContourPolyline {
    double level = 0.0;
    std::vector<std::array<double, 2>> points;  // (s, p)
    int flow_sign = 0;
    bool closed = false;
};

namespace detail {

struct SegmentEnd {
    std::uint64_t edge_key;
    std::array<double, 2> point;
};

inline std::uint64_t edge_key(int type, int i, int j) {
    return (static_cast<std::uint64_t>(type) << 62) |
           (static_cast<std::uint64_t>(static_cast<std::uint32_t>(i)) << 31) |
           static_cast<std::uint64_t>(static_cast<std::uint32_t>(j));
}

}  // namespace detail

/// Marching-squares contours of H on an (s, p) grid of `resolution` cells in
/// each direction over [-1/2, 1/2] x [-pi, pi].
inline std::vector<ContourPolyline> energy_contours(const ModelParams& m,
                                                    std::span<const double> levels,
                                                    int resolution) {
    if (resolution < 32) throw config_error("energy_contours: resolution must be >= 32");
    const int R = resolution;
    const double ds = 1.0 / R;
    const double dp = 2.0 * std::numbers::pi / R;
    auto s_of = [&](double i) { return -0.5 + i * ds; };
    auto p_of = [&](double j) { return -std::numbers::pi + j * dp; };

    std::vector<double> field((R + 1) * (R + 1));
    for (int i = 0; i <= R; ++i)
        for (int j = 0; j <= R; ++j)
            field[i * (R + 1) + j] = hamiltonian({s_of(i), p_of(j)}, m);

    std::vector<ContourPolyline> result;
    for (const double level : levels) {
        // Collect cell segments; endpoints are tagged with their grid edge so
        // stitching needs no floating-point comparisons.
        std::vector<std::array<detail::SegmentEnd, 2>> segments;
        auto corner = [&](int i, int j) {
            const double d = field[i * (R + 1) + j] - level;
            return d == 0.0 ? 1e-300 : d;  // nudge exact hits off the degenerate case
        };
        for (int i = 0; i < R; ++i) {
            for (int j = 0; j < R; ++j) {
                const double d00 = corner(i, j), d10 = corner(i + 1, j);
                const double d01 = corner(i, j + 1), d11 = corner(i + 1, j + 1);
                // Crossings on the four cell edges: 0=s-edge bottom, 1=s-edge top,
                // 2=p-edge left, 3=p-edge right.
                std::array<detail::SegmentEnd, 4> hits;
                int n_hits = 0;
                auto try_edge = [&](double da, double db, int type, int ei, int ej,
                                    double ax, double ay, double bx, double by) {
                    if ((da > 0.0) == (db > 0.0)) return;
                    const double t = da / (da - db);
                    hits[n_hits++] = {detail::edge_key(type, ei, ej),
                                      {ax + t * (bx - ax), ay + t * (by - ay)}};
                };
                try_edge(d00, d10, 0, i, j, s_of(i), p_of(j), s_of(i + 1), p_of(j));
                try_edge(d01, d11, 0, i, j + 1, s_of(i), p_of(j + 1), s_of(i + 1), p_of(j + 1));
                try_edge(d00, d01, 1, i, j, s_of(i), p_of(j), s_of(i), p_of(j + 1));
                try_edge(d10, d11, 1, i + 1, j, s_of(i + 1), p_of(j), s_of(i + 1), p_of(j + 1));
                if (n_hits == 2) {
                    segments.push_back({hits[0], hits[1]});
                } else if (n_hits == 4) {
                    // Saddle cell: pair crossings by the sign of the centre value.
                    const double center = 0.25 * (d00 + d10 + d01 + d11);
                    if ((center > 0.0) == (d00 > 0.0)) {
                        segments.push_back({hits[0], hits[3]});
                        segments.push_back({hits[1], hits[2]});
                    } else {
                        segments.push_back({hits[0], hits[2]});
                        segments.push_back({hits[1], hits[3]});
                    }
                }
            }
        }

        // Stitch segments into polylines by shared edge keys.
        std::unordered_map<std::uint64_t, std::vector<std::size_t>> incident;
        incident.reserve(segments.size() * 2);
        for (std::size_t si = 0; si < segments.size(); ++si) {
            incident[segments[si][0].edge_key].push_back(si);
            incident[segments[si][1].edge_key].push_back(si);
        }
        std::vector<bool> used(segments.size(), false);
        for (std::size_t start = 0; start < segments.size(); ++start) {
            if (used[start]) continue;
            // Walk backwards from `start` to find a chain end (or detect a loop).
            std::size_t first = start;
            std::uint64_t entry_key = segments[start][0].edge_key;
            while (true) {
                const auto& inc = incident[entry_key];
                std::size_t prev = std::size_t(-1);
                for (std::size_t si : inc)
                    if (si != first && !used[si]) prev = si;
                if (inc.size() != 2 || prev == std::size_t(-1)) break;
                first = prev;
                entry_key = segments[first][0].edge_key == entry_key
                                ? segments[first][1].edge_key
                                : segments[first][0].edge_key;
                if (first == start) break;  // closed loop
            }
            // Walk forward collecting points.
            ContourPolyline line;
            line.level = level;
            std::size_t cur = first;
            std::uint64_t from_key = entry_key;
            line.points.push_back(segments[cur][0].edge_key == from_key
                                      ? segments[cur][0].point
                                      : segments[cur][1].point);
            while (true) {
                used[cur] = true;
                const bool first_end = segments[cur][0].edge_key == from_key;
                const auto& exit = first_end ? segments[cur][1] : segments[cur][0];
                line.points.push_back(exit.point);
                const auto& inc = incident[exit.edge_key];
                std::size_t next = std::size_t(-1);
                for (std::size_t si : inc)
                    if (!used[si]) next = si;
                if (next == std::size_t(-1)) {
                    line.closed = exit.edge_key == entry_key;
                    break;
                }
                cur = next;
                from_key = exit.edge_key;
            }
            // Flow-direction tag at the midpoint.
            if (line.points.size() >= 2) {
                const std::size_t mid = line.points.size() / 2;
                const auto& a = line.points[mid - 1];
                const auto& b = line.points[mid];
                const FlowVelocity v =
                    classical_flow({0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])}, m);
                if (!v.singular) {
                    const double dot = v.v_s * (b[0] - a[0]) + v.v_p * (b[1] - a[1]);
                    line.flow_sign = dot > 0.0 ? 1 : (dot < 0.0 ? -1 : 0);
                }
            }
            result.push_back(std::move(line));
        }
    }
    return result;
}

}  // namespace ssb

// Copyright 2026 The cornerdtc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cornerdtc/errors.hpp"
#include "cornerdtc/pauli.hpp"

namespace cornerdtc {

enum class Color { kBlue, kRed };
enum class SiteClass { kCorner, kEdge, kBulk };

inline const char *color_name(Color c) {
    return c == Color::kBlue ? "blue" : "red";
}
inline const char *site_class_name(SiteClass c) {
    switch (c) {
        case SiteClass::kCorner:
            return "corner";
        case SiteClass::kEdge:
            return "edge";
        case SiteClass::kBulk:
            return "bulk";
    }
    return "?";
}

/// A lattice site. Coordinates are stored doubled so red half-integer
/// positions stay integral: x() == dx / 2.
struct Site {
    size_t index;
    Color color;
    int dx;
    int dy;

    double x() const {
        return dx / 2.0;
    }
    double y() const {
        return dy / 2.0;
    }
};

/// Rectangle extents plus red offset, the full description of a geometry.
struct LatticeSpec {
    std::array<int, 2> blue_dims{2, 3};
    std::array<int, 2> red_dims{2, 3};
    std::array<double, 2> red_offset{0.5, 0.5};

    bool operator==(const LatticeSpec &) const = default;
};

/// Checkerboard of a blue integer rectangle and a red rectangle shifted by
/// half a lattice spacing along both axes. Neighbours sit at distance sqrt(2)/2.
class Lattice {
   public:
    Lattice() = default;

    const LatticeSpec &spec() const {
        return spec_;
    }
    size_t num_sites() const {
        return sites_.size();
    }
    const std::vector<Site> &sites() const {
        return sites_;
    }
    const Site &site(size_t i) const {
        check(i);
        return sites_[i];
    }
    Color color(size_t i) const {
        return site(i).color;
    }
    const std::vector<size_t> &neighbors(size_t i) const {
        check(i);
        return neighbors_[i];
    }
    size_t degree(size_t i) const {
        return neighbors(i).size();
    }
    SiteClass classify(size_t i) const {
        switch (degree(i)) {
            case 1:
                return SiteClass::kCorner;
            case 2:
                return SiteClass::kEdge;
            default:
                return SiteClass::kBulk;
        }
    }
    bool is_corner(size_t i) const {
        return classify(i) == SiteClass::kCorner;
    }

    std::vector<size_t> sites_of(Color c) const {
        std::vector<size_t> out;
        for (const auto &s : sites_) {
            if (s.color == c) out.push_back(s.index);
        }
        return out;
    }
    std::vector<size_t> sites_of(SiteClass c) const {
        std::vector<size_t> out;
        for (const auto &s : sites_) {
            if (classify(s.index) == c) out.push_back(s.index);
        }
        return out;
    }
    std::vector<size_t> corners() const {
        return sites_of(SiteClass::kCorner);
    }
    std::vector<size_t> corners(Color c) const {
        std::vector<size_t> out;
        for (size_t i : corners()) {
            if (sites_[i].color == c) out.push_back(i);
        }
        return out;
    }
    std::vector<size_t> non_corner_sites() const {
        std::vector<size_t> out;
        for (const auto &s : sites_) {
            if (!is_corner(s.index)) out.push_back(s.index);
        }
        return out;
    }

    /// Every nearest-neighbour pair (i, j) with i < j.
    std::vector<std::pair<size_t, size_t>> edges() const {
        std::vector<std::pair<size_t, size_t>> out;
        for (size_t i = 0; i < sites_.size(); ++i) {
            for (size_t j : neighbors_[i]) {
                if (i < j) out.emplace_back(i, j);
            }
        }
        return out;
    }

    bool adjacent(size_t a, size_t b) const {
        for (size_t j : neighbors(a)) {
            if (j == b) return true;
        }
        return false;
    }

    /// Site at doubled coordinates (dx, dy), if any.
    std::optional<size_t> index_at(int dx, int dy) const {
        auto it = by_coord_.find({dx, dy});
        if (it == by_coord_.end()) return std::nullopt;
        return it->second;
    }

   private:
    friend Lattice build_lattice(const LatticeSpec &spec);

    void check(size_t i) const {
        if (i >= sites_.size()) {
            throw DimensionMismatch("site " + std::to_string(i) + " out of range for " +
                                    std::to_string(sites_.size()) + "-site lattice");
        }
    }

    LatticeSpec spec_;
    std::vector<Site> sites_;
    std::vector<std::vector<size_t>> neighbors_;
    std::map<std::pair<int, int>, size_t> by_coord_;
};

inline Lattice build_lattice(const LatticeSpec &spec) {
    for (int d : {spec.blue_dims[0], spec.blue_dims[1], spec.red_dims[0], spec.red_dims[1]}) {
        if (d < 1) throw DegenerateGeometry("rectangle extents must be >= 1");
    }
    std::array<int, 2> off{};
    for (int k = 0; k < 2; ++k) {
        double o = spec.red_offset[k];
        if (std::abs(o - 0.5) < 1e-12) {
            off[k] = 1;
        } else if (std::abs(o + 0.5) < 1e-12) {
            off[k] = -1;
        } else {
            throw InvalidOffset("red offset components must be +1/2 or -1/2");
        }
    }
    if (static_cast<long>(spec.blue_dims[0]) * spec.blue_dims[1] + static_cast<long>(spec.red_dims[0]) * spec.red_dims[1] >
        static_cast<long>(kMaxPauliSites)) {
        throw DimensionMismatch("lattice exceeds 64 sites");
    }

    Lattice L;
    L.spec_ = spec;
    for (int y = 0; y < spec.blue_dims[1]; ++y) {
        for (int x = 0; x < spec.blue_dims[0]; ++x) {
            L.sites_.push_back({L.sites_.size(), Color::kBlue, 2 * x, 2 * y});
        }
    }
    for (int y = 0; y < spec.red_dims[1]; ++y) {
        for (int x = 0; x < spec.red_dims[0]; ++x) {
            L.sites_.push_back({L.sites_.size(), Color::kRed, 2 * x + off[0], 2 * y + off[1]});
        }
    }
    for (const auto &s : L.sites_) L.by_coord_[{s.dx, s.dy}] = s.index;

    L.neighbors_.resize(L.sites_.size());
    for (const auto &s : L.sites_) {
        for (int ddy : {-1, 1}) {
            for (int ddx : {-1, 1}) {
                if (auto j = L.index_at(s.dx + ddx, s.dy + ddy)) L.neighbors_[s.index].push_back(*j);
            }
        }
        std::sort(L.neighbors_[s.index].begin(), L.neighbors_[s.index].end());
    }
    if (L.sites_.size() > 1) {
        for (const auto &s : L.sites_) {
            size_t d = L.neighbors_[s.index].size();
            if (d == 0 || d == 3) {
                throw DegenerateGeometry(std::string(color_name(s.color)) + " site at (" + std::to_string(s.x()) + ", " +
                                         std::to_string(s.y()) + ") has degree " + std::to_string(d));
            }
        }
    }
    return L;
}

inline Lattice build_lattice(std::array<int, 2> blue_dims, std::array<int, 2> red_dims, std::array<double, 2> red_offset) {
    return build_lattice(LatticeSpec{blue_dims, red_dims, red_offset});
}

/// K_i: X on i, Z on each neighbour.
inline PauliString stabilizer_support(const Lattice &L, size_t i) {
    uint64_t z = 0;
    for (size_t j : L.neighbors(i)) z |= uint64_t{1} << j;
    return PauliString(L.num_sites(), uint64_t{1} << i, z);
}

/// P_i: Z on each neighbour of i.
inline PauliString plaquette_support(const Lattice &L, size_t i) {
    uint64_t z = 0;
    for (size_t j : L.neighbors(i)) z |= uint64_t{1} << j;
    return PauliString(L.num_sites(), 0, z);
}

struct SymmetryGenerators {
    PauliString red;     // G_r
    PauliString blue;    // G_b
    PauliString global;  // G = G_r G_b
};

inline SymmetryGenerators symmetry_generators(const Lattice &L) {
    uint64_t r = 0, b = 0;
    for (const auto &s : L.sites()) (s.color == Color::kRed ? r : b) |= uint64_t{1} << s.index;
    size_t n = L.num_sites();
    return {PauliString(n, r, 0), PauliString(n, b, 0), PauliString(n, r | b, 0)};
}

/// First blue corner in canonical order.
inline size_t blue_corner(const Lattice &L) {
    auto c = L.corners(Color::kBlue);
    if (c.empty()) throw NoCornerPresent("lattice has no blue corner");
    return c.front();
}

/// Canonical indices of the eight sites around the blue corner used by the
/// corner-mode expansion; entry k is label k+1. Label 1 is the corner, 5 its
/// red neighbour, 2/3 the blue sites one step from the corner along x/y,
/// 4 the blue site diagonal to it, and 6/7/8 the red sites displaced from 5
/// like 2/3/4 are from 1.
inline std::array<size_t, 8> corner_label_map(const Lattice &L) {
    size_t c = blue_corner(L);
    const Site &cs = L.site(c);
    const Site &r = L.site(L.neighbors(c).front());
    int sx = r.dx - cs.dx, sy = r.dy - cs.dy;
    auto at = [&](int dx, int dy) {
        auto j = L.index_at(dx, dy);
        if (!j) throw UnsupportedGeometry("lattice too small for the corner-mode label map");
        return *j;
    };
    return {c,
            at(cs.dx + 2 * sx, cs.dy),
            at(cs.dx, cs.dy + 2 * sy),
            at(cs.dx + 2 * sx, cs.dy + 2 * sy),
            r.index,
            at(r.dx + 2 * sx, r.dy),
            at(r.dx, r.dy + 2 * sy),
            at(r.dx + 2 * sx, r.dy + 2 * sy)};
}

}  // namespace cornerdtc

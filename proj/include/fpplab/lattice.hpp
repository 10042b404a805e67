#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace fpplab {

inline constexpr int kMaxDim = 4;

/// A point of Z^d (or of a torus), 2 <= d <= 4. Unused coordinates stay zero
/// so that defaulted comparison is lexicographic in the used coordinates.
struct Site {
  std::array<int, kMaxDim> x{};
  int dim = 2;

  Site() = default;
  Site(std::initializer_list<int> coords);
  static Site origin(int dim);
  static Site unit(int dim, int axis, int length = 1);

  int operator[](int i) const { return x[static_cast<std::size_t>(i)]; }
  int& operator[](int i) { return x[static_cast<std::size_t>(i)]; }

  friend Site operator+(Site a, const Site& b);
  friend Site operator-(Site a, const Site& b);
  friend bool operator==(const Site&, const Site&) = default;
  friend auto operator<=>(const Site&, const Site&) = default;
};

int l1_norm(const Site& s);
std::string to_string(const Site& s);

/// Lattice edge from `base` to `base + unit(axis)` (wrapped on periodic axes).
struct EdgeId {
  Site base;
  int axis = 0;

  friend bool operator==(const EdgeId&, const EdgeId&) = default;
  friend auto operator<=>(const EdgeId&, const EdgeId&) = default;
};

/// A finite piece of the hypercubic lattice: a box [lo, hi] in Z^d, the torus
/// (Z/nZ)^d, or a cylinder that is open along axis 0 and periodic in the other
/// axes (the lift used for winding geodesics on the torus).
///
/// Sites are indexed row-major with axis 0 slowest, so site-index order is the
/// lexicographic order of coordinates. Edges are indexed in one block per axis;
/// inside a block, row-major over the sites that own an edge along that axis.
class Region {
 public:
  enum class Kind { Box, Torus, Cylinder };

  static Region box(const Site& lo, const Site& hi);
  static Region torus(int dim, int side);
  static Region cylinder(int dim, int side, int lo0, int hi0);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  /// Torus/cylinder period; 0 for a box.
  int side() const { return side_; }
  Site lo() const;
  Site hi() const;
  bool periodic(int axis) const { return periodic_[static_cast<std::size_t>(axis)]; }

  std::int64_t num_sites() const { return num_sites_; }
  std::int64_t num_edges() const { return num_edges_; }

  bool contains(const Site& s) const;
  /// Reduces periodic coordinates into range; box coordinates are unchanged.
  Site wrap(Site s) const;
  bool on_boundary(const Site& s) const;

  std::int64_t site_index(const Site& s) const;
  Site site_at(std::int64_t index) const;

  bool has_edge(const EdgeId& e) const;
  std::int64_t edge_index(const EdgeId& e) const;
  EdgeId edge_at(std::int64_t index) const;
  Site head(const EdgeId& e) const;

  friend bool operator==(const Region&, const Region&) = default;

 private:
  Region() = default;
  void finish();

  Kind kind_ = Kind::Box;
  int dim_ = 2;
  int side_ = 0;
  std::array<int, kMaxDim> lo_{};
  std::array<int, kMaxDim> ext_{};
  std::array<bool, kMaxDim> periodic_{};
  std::array<std::int64_t, kMaxDim> site_stride_{};
  std::array<std::int64_t, kMaxDim> edge_offset_{};
  std::array<std::array<int, kMaxDim>, kMaxDim> edge_ext_{};
  std::array<std::array<std::int64_t, kMaxDim>, kMaxDim> edge_stride_{};
  std::int64_t num_sites_ = 0;
  std::int64_t num_edges_ = 0;
};

std::vector<EdgeId> enumerate_edges(const Region& region);

/// L1 ball {x : |x|_1 <= m} in lexicographic order.
std::vector<Site> ball(int m, int dim);

/// Adjacent sites with their connecting edges; throws std::out_of_range for a
/// site outside the region.
std::vector<std::pair<Site, EdgeId>> neighbors(const Site& site, const Region& region);

/// Window [-w, n+w] x [-w, w]^(d-1) for point-to-point passage along axis 0.
Region point_window(int n, int dim, int margin);

/// Compressed adjacency of a region. Immutable once built, so one instance is
/// shared by every replica that uses the same window.
class LatticeGraph {
 public:
  struct Arc {
    std::int32_t site;
    std::int32_t edge;
  };

  explicit LatticeGraph(Region region);

  const Region& region() const { return region_; }
  std::int32_t num_sites() const { return static_cast<std::int32_t>(boundary_.size()); }
  std::int32_t num_edges() const { return static_cast<std::int32_t>(tail_.size()); }

  std::span<const Arc> arcs(std::int32_t site) const {
    return {arcs_.data() + offset_[static_cast<std::size_t>(site)],
            arcs_.data() + offset_[static_cast<std::size_t>(site) + 1]};
  }
  std::int32_t tail(std::int32_t edge) const { return tail_[static_cast<std::size_t>(edge)]; }
  std::int32_t head(std::int32_t edge) const { return head_[static_cast<std::size_t>(edge)]; }
  bool boundary(std::int32_t site) const { return boundary_[static_cast<std::size_t>(site)] != 0; }

 private:
  Region region_;
  std::vector<std::int32_t> offset_;
  std::vector<Arc> arcs_;
  std::vector<std::int32_t> tail_;
  std::vector<std::int32_t> head_;
  std::vector<std::uint8_t> boundary_;
};

}  // namespace fpplab

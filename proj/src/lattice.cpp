#include "fpplab/lattice.hpp"

#include <cstdlib>
#include <limits>
#include <stdexcept>

namespace fpplab {

namespace {

void check_dim(int dim) {
  if (dim < 2 || dim > kMaxDim) throw std::invalid_argument("dimension must be in [2, 4]");
}

int floor_mod(int a, int n) {
  const int r = a % n;
  return r < 0 ? r + n : r;
}

}  // namespace

Site::Site(std::initializer_list<int> coords) : dim(static_cast<int>(coords.size())) {
  if (coords.size() > static_cast<std::size_t>(kMaxDim)) throw std::invalid_argument("too many coordinates");
  std::size_t i = 0;
  for (int c : coords) x[i++] = c;
}

Site Site::origin(int dim) {
  Site s;
  s.dim = dim;
  return s;
}

Site Site::unit(int dim, int axis, int length) {
  Site s = origin(dim);
  s[axis] = length;
  return s;
}

Site operator+(Site a, const Site& b) {
  for (int i = 0; i < a.dim; ++i) a[i] += b[i];
  return a;
}

Site operator-(Site a, const Site& b) {
  for (int i = 0; i < a.dim; ++i) a[i] -= b[i];
  return a;
}

int l1_norm(const Site& s) {
  int total = 0;
  for (int i = 0; i < s.dim; ++i) total += std::abs(s[i]);
  return total;
}

std::string to_string(const Site& s) {
  std::string out = "(";
  for (int i = 0; i < s.dim; ++i) {
    if (i) out += ',';
    out += std::to_string(s[i]);
  }
  return out + ")";
}

Region Region::box(const Site& lo, const Site& hi) {
  check_dim(lo.dim);
  if (hi.dim != lo.dim) throw std::invalid_argument("box corners differ in dimension");
  Region r;
  r.kind_ = Kind::Box;
  r.dim_ = lo.dim;
  for (int i = 0; i < r.dim_; ++i) {
    if (hi[i] < lo[i]) throw std::invalid_argument("empty box");
    r.lo_[static_cast<std::size_t>(i)] = lo[i];
    r.ext_[static_cast<std::size_t>(i)] = hi[i] - lo[i] + 1;
  }
  r.finish();
  return r;
}

Region Region::torus(int dim, int side) {
  check_dim(dim);
  if (side < 3) throw std::invalid_argument("torus side must be at least 3");
  Region r;
  r.kind_ = Kind::Torus;
  r.dim_ = dim;
  r.side_ = side;
  for (int i = 0; i < dim; ++i) {
    r.ext_[static_cast<std::size_t>(i)] = side;
    r.periodic_[static_cast<std::size_t>(i)] = true;
  }
  r.finish();
  return r;
}

Region Region::cylinder(int dim, int side, int lo0, int hi0) {
  check_dim(dim);
  if (side < 3) throw std::invalid_argument("cylinder period must be at least 3");
  if (hi0 < lo0) throw std::invalid_argument("empty cylinder");
  Region r;
  r.kind_ = Kind::Cylinder;
  r.dim_ = dim;
  r.side_ = side;
  r.lo_[0] = lo0;
  r.ext_[0] = hi0 - lo0 + 1;
  for (int i = 1; i < dim; ++i) {
    r.ext_[static_cast<std::size_t>(i)] = side;
    r.periodic_[static_cast<std::size_t>(i)] = true;
  }
  r.finish();
  return r;
}

void Region::finish() {
  std::int64_t stride = 1;
  for (int i = dim_ - 1; i >= 0; --i) {
    site_stride_[static_cast<std::size_t>(i)] = stride;
    stride *= ext_[static_cast<std::size_t>(i)];
  }
  num_sites_ = stride;
  if (num_sites_ > std::numeric_limits<std::int32_t>::max() / (2 * kMaxDim))
    throw std::invalid_argument("region too large");

  std::int64_t offset = 0;
  for (int a = 0; a < dim_; ++a) {
    auto& ext = edge_ext_[static_cast<std::size_t>(a)];
    ext = ext_;
    if (!periodic_[static_cast<std::size_t>(a)]) ext[static_cast<std::size_t>(a)] -= 1;
    std::int64_t s = 1;
    for (int i = dim_ - 1; i >= 0; --i) {
      edge_stride_[static_cast<std::size_t>(a)][static_cast<std::size_t>(i)] = s;
      s *= ext[static_cast<std::size_t>(i)];
    }
    edge_offset_[static_cast<std::size_t>(a)] = offset;
    offset += s;
  }
  num_edges_ = offset;
}

Site Region::lo() const {
  Site s = Site::origin(dim_);
  for (int i = 0; i < dim_; ++i) s[i] = lo_[static_cast<std::size_t>(i)];
  return s;
}

Site Region::hi() const {
  Site s = Site::origin(dim_);
  for (int i = 0; i < dim_; ++i) s[i] = lo_[static_cast<std::size_t>(i)] + ext_[static_cast<std::size_t>(i)] - 1;
  return s;
}

bool Region::contains(const Site& s) const {
  if (s.dim != dim_) return false;
  for (int i = 0; i < dim_; ++i) {
    const auto k = static_cast<std::size_t>(i);
    if (s[i] < lo_[k] || s[i] >= lo_[k] + ext_[k]) return false;
  }
  return true;
}

Site Region::wrap(Site s) const {
  for (int i = 0; i < dim_; ++i) {
    const auto k = static_cast<std::size_t>(i);
    if (periodic_[k]) s[i] = lo_[k] + floor_mod(s[i] - lo_[k], ext_[k]);
  }
  return s;
}

bool Region::on_boundary(const Site& s) const {
  for (int i = 0; i < dim_; ++i) {
    const auto k = static_cast<std::size_t>(i);
    if (periodic_[k]) continue;
    if (s[i] == lo_[k] || s[i] == lo_[k] + ext_[k] - 1) return true;
  }
  return false;
}

std::int64_t Region::site_index(const Site& s) const {
  if (!contains(s)) throw std::out_of_range("site " + to_string(s) + " outside region");
  std::int64_t idx = 0;
  for (int i = 0; i < dim_; ++i) {
    const auto k = static_cast<std::size_t>(i);
    idx += static_cast<std::int64_t>(s[i] - lo_[k]) * site_stride_[k];
  }
  return idx;
}

Site Region::site_at(std::int64_t index) const {
  if (index < 0 || index >= num_sites_) throw std::out_of_range("site index out of range");
  Site s = Site::origin(dim_);
  for (int i = 0; i < dim_; ++i) {
    const auto k = static_cast<std::size_t>(i);
    s[i] = lo_[k] + static_cast<int>(index / site_stride_[k]);
    index %= site_stride_[k];
  }
  return s;
}

bool Region::has_edge(const EdgeId& e) const {
  if (e.axis < 0 || e.axis >= dim_ || !contains(e.base)) return false;
  const auto a = static_cast<std::size_t>(e.axis);
  return periodic_[a] || e.base[e.axis] < lo_[a] + ext_[a] - 1;
}

std::int64_t Region::edge_index(const EdgeId& e) const {
  if (!has_edge(e)) throw std::out_of_range("edge at " + to_string(e.base) + " outside region");
  const auto a = static_cast<std::size_t>(e.axis);
  std::int64_t idx = edge_offset_[a];
  for (int i = 0; i < dim_; ++i) {
    const auto k = static_cast<std::size_t>(i);
    idx += static_cast<std::int64_t>(e.base[i] - lo_[k]) * edge_stride_[a][k];
  }
  return idx;
}

EdgeId Region::edge_at(std::int64_t index) const {
  if (index < 0 || index >= num_edges_) throw std::out_of_range("edge index out of range");
  int axis = dim_ - 1;
  while (edge_offset_[static_cast<std::size_t>(axis)] > index) --axis;
  const auto a = static_cast<std::size_t>(axis);
  std::int64_t rest = index - edge_offset_[a];
  EdgeId e{Site::origin(dim_), axis};
  for (int i = 0; i < dim_; ++i) {
    const auto k = static_cast<std::size_t>(i);
    e.base[i] = lo_[k] + static_cast<int>(rest / edge_stride_[a][k]);
    rest %= edge_stride_[a][k];
  }
  return e;
}

Site Region::head(const EdgeId& e) const { return wrap(e.base + Site::unit(dim_, e.axis)); }

std::vector<EdgeId> enumerate_edges(const Region& region) {
  std::vector<EdgeId> out;
  out.reserve(static_cast<std::size_t>(region.num_edges()));
  for (std::int64_t i = 0; i < region.num_edges(); ++i) out.push_back(region.edge_at(i));
  return out;
}

std::vector<Site> ball(int m, int dim) {
  check_dim(dim);
  if (m < 0) throw std::invalid_argument("ball radius must be nonnegative");
  std::vector<Site> out;
  Site s = Site::origin(dim);
  for (int i = 0; i < dim; ++i) s[i] = -m;
  for (;;) {
    if (l1_norm(s) <= m) out.push_back(s);
    int i = dim - 1;
    while (i >= 0 && s[i] == m) s[i--] = -m;
    if (i < 0) break;
    ++s[i];
  }
  return out;
}

std::vector<std::pair<Site, EdgeId>> neighbors(const Site& site, const Region& region) {
  if (!region.contains(region.wrap(site)) || !region.contains(site))
    throw std::out_of_range("site " + to_string(site) + " outside region");
  std::vector<std::pair<Site, EdgeId>> out;
  const int d = region.dim();
  for (int a = 0; a < d; ++a) {
    EdgeId fwd{site, a};
    if (region.has_edge(fwd)) out.emplace_back(region.head(fwd), fwd);
    EdgeId bwd{region.wrap(site - Site::unit(d, a)), a};
    if (region.has_edge(bwd) && region.head(bwd) == site) out.emplace_back(bwd.base, bwd);
  }
  return out;
}

Region point_window(int n, int dim, int margin) {
  if (n < 1 || margin < 0) throw std::invalid_argument("bad point window");
  Site lo = Site::origin(dim);
  Site hi = Site::origin(dim);
  lo[0] = -margin;
  hi[0] = n + margin;
  for (int i = 1; i < dim; ++i) {
    lo[i] = -margin;
    hi[i] = margin;
  }
  return Region::box(lo, hi);
}

LatticeGraph::LatticeGraph(Region region) : region_(std::move(region)) {
  const auto ns = static_cast<std::size_t>(region_.num_sites());
  const auto ne = static_cast<std::size_t>(region_.num_edges());
  tail_.resize(ne);
  head_.resize(ne);
  boundary_.resize(ns);
  std::vector<std::int32_t> degree(ns, 0);
  for (std::size_t e = 0; e < ne; ++e) {
    const EdgeId id = region_.edge_at(static_cast<std::int64_t>(e));
    tail_[e] = static_cast<std::int32_t>(region_.site_index(id.base));
    head_[e] = static_cast<std::int32_t>(region_.site_index(region_.head(id)));
    ++degree[static_cast<std::size_t>(tail_[e])];
    ++degree[static_cast<std::size_t>(head_[e])];
  }
  offset_.assign(ns + 1, 0);
  for (std::size_t v = 0; v < ns; ++v) offset_[v + 1] = offset_[v] + degree[v];
  arcs_.resize(static_cast<std::size_t>(offset_[ns]));
  std::vector<std::int32_t> fill(offset_.begin(), offset_.end() - 1);
  for (std::size_t e = 0; e < ne; ++e) {
    const auto t = static_cast<std::size_t>(tail_[e]);
    const auto h = static_cast<std::size_t>(head_[e]);
    arcs_[static_cast<std::size_t>(fill[t]++)] = {head_[e], static_cast<std::int32_t>(e)};
    arcs_[static_cast<std::size_t>(fill[h]++)] = {tail_[e], static_cast<std::int32_t>(e)};
  }
  for (std::size_t v = 0; v < ns; ++v)
    boundary_[v] = region_.on_boundary(region_.site_at(static_cast<std::int64_t>(v))) ? 1 : 0;
}

}  // namespace fpplab

#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "fpplab/lattice.hpp"
#include "fpplab/weights.hpp"

namespace fpplab {

struct PassageOptions {
  /// Regrow the window (margins doubled, field resampled with the same seed)
  /// while a geodesic touches its boundary.
  bool auto_grow = true;
  int max_grows = 4;
  /// Compute G (edges on every geodesic). Off leaves g_intersection empty.
  bool intersection = true;
  bool sample_path = true;
};

/// Passage time between two sites with the geodesic structure around it.
///
/// Distance fields are exact wherever the distance is at most T; sites
/// farther than T are reported as +inf (they cannot lie on a geodesic).
/// Atomic weight laws are evaluated in scaled 64-bit integers, so ties are
/// detected exactly; generic real weights use binary64 with exact equality of
/// relaxed sums.
struct PassageResult {
  double T = 0;
  Site src;
  Site dst;
  std::shared_ptr<const WeightField> field;
  std::vector<double> d_src;
  std::vector<double> d_dst;
  /// Sorted edge indices (in field->region()) lying on some geodesic.
  std::vector<std::int64_t> geodesic_dag;
  /// Sorted edge indices lying on every geodesic.
  std::vector<std::int64_t> g_intersection;
  /// One geodesic, src first; ties go to the lexicographically smallest predecessor.
  std::vector<Site> sample_path;
  int window_grows = 0;
  /// A geodesic still touches the window boundary after the allowed regrowth.
  bool boundary_contact = false;
  /// Some intersection decision used the edge-removal fallback.
  bool intersection_fallback = false;

  const Region& window() const { return field->region(); }
};

PassageResult passage_time(const WeightField& field, const Site& src, const Site& dst,
                           const PassageOptions& options = {});
PassageResult passage_time(std::shared_ptr<const WeightField> field, const Site& src, const Site& dst,
                           const PassageOptions& options = {});

/// Passage time only, on the given window with no regrowth.
double passage_value(const WeightField& field, const Site& src, const Site& dst);

/// G of a computed result (the intersection of all geodesics).
std::vector<std::int64_t> geodesic_intersection(const PassageResult& result);

/// Intersection by brute force: e is on every geodesic iff deleting it
/// strictly increases T.
std::vector<std::int64_t> intersection_by_removal(const WeightField& field, const Site& src, const Site& dst);

struct CriticalityValue {
  /// Largest weight of e at which e still lies on a geodesic (0 when it never does).
  double D = 0;
  /// Passage time with e deleted.
  double T_without = 0;
  /// min over orientations of d'(src, u) + d'(v, dst) with e deleted.
  double through_offset = 0;
  int window_grows = 0;
  bool boundary_contact = false;

  /// T as a function of t_e, all other weights fixed.
  double passage_at(double t) const;
};

CriticalityValue edge_criticality(const WeightField& field, std::int64_t edge, const Site& src, const Site& dst,
                                  const PassageOptions& options = {});

/// T after setting t_e = new_t, from the distance fields when possible and by
/// recomputation otherwise. Always equals passage_value on the modified field.
double single_edge_update(const PassageResult& result, std::int64_t edge, double new_t);

/// Passage time with each sample_path edge deleted in turn; entry i is for the
/// edge from sample_path[i] to sample_path[i+1]. Solved for all edges at once
/// from two full shortest-path trees (replacement paths); with zero weights
/// present each edge is recomputed separately. Entries equal T exactly for path
/// edges outside G.
std::vector<double> path_removal_times(const PassageResult& result);

struct TorusOptions {
  /// Position c of the cutting hyperplane x_0 = c.
  int cut = 0;
  int max_grows = 4;
  bool intersection = true;
};

/// Minimal closed path with winding number one in axis 0 on a torus field.
/// geodesic_dag and g_intersection hold torus edge indices; sample_path is one
/// geodesic cycle as torus sites, starting and ending at the same site. The
/// distance fields are left empty.
PassageResult torus_passage(const WeightField& field, const TorusOptions& options = {});

/// Torus G by brute force edge removal.
std::vector<std::int64_t> torus_intersection_by_removal(const WeightField& field);

/// Smallest m with m^4 >= n, i.e. ceil(n^(1/4)).
int fourth_root_ceil(int n);

struct AveragedPassage {
  double F = 0;
  int m = 0;
  std::vector<Site> sources;
  std::vector<double> terms;
  int window_grows = 0;
  bool boundary_contact = false;
};

/// F_n = mean over z in B_m of T(z, z + n e_1), m = ceil(n^(1/4)).
AveragedPassage averaged_passage(const WeightField& field, int n, const PassageOptions& options = {});
/// Same with an explicit ball radius (m = 0 gives F_n = T_n).
AveragedPassage averaged_passage(const WeightField& field, int n, int m, const PassageOptions& options);

/// Shared read-only adjacency for a region (cached).
std::shared_ptr<const LatticeGraph> graph_for(const Region& region);

}  // namespace fpplab

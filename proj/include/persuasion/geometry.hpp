#pragma once

#include "persuasion/types.hpp"

#include <mutex>

namespace persuasion {

/// Linear inequalities over the first N-1 belief coordinates:
/// normals.row(r) . x <= offsets[r], together with the implicit simplex
/// constraints x(j) >= 0 and sum x(j) <= 1 (the last coordinate is recovered
/// as 1 - sum).
struct HalfspaceSystem {
  Matrix normals;            // R x (N-1)
  Vector offsets;            // R
  std::vector<int> rivals;   // action behind each row, -1 for synthetic rows
  int num_states = 0;
};

/// Appends the constraint  w . mu <= 0  (mu ranging over the simplex) in
/// reduced coordinates.
void append_simplex_halfspace(HalfspaceSystem& sys, const Vector& w, int rival);

/// Reduced system of a best-reply region: one row per rival action.
HalfspaceSystem reduce_region(const ReceiverType& type, int action);

/// A best-reply region as a polytope: reduced H-form plus lazily computed
/// vertices (in full N-coordinate form) and dimension. The caches are
/// write-once and safe under concurrent reads.
class RegionPolytope {
 public:
  RegionPolytope(int owner_action, HalfspaceSystem system, Tolerances tol);
  RegionPolytope(const RegionPolytope& other);
  RegionPolytope& operator=(const RegionPolytope& other);

  int owner_action() const { return owner_action_; }
  const HalfspaceSystem& system() const { return system_; }
  const Tolerances& tol() const { return tol_; }

  // Extreme points, deduplicated and lexicographically sorted.
  const std::vector<Belief>& vertices() const;
  // Affine dimension of the vertex set; -1 iff empty.
  int dim() const;
  bool empty() const { return dim() == -1; }

 private:
  struct Cache {
    std::vector<Belief> vertices;
    int dim = -1;
  };
  const Cache& cache() const;

  int owner_action_ = -1;
  HalfspaceSystem system_;
  Tolerances tol_;
  mutable std::mutex mu_;
  mutable std::shared_ptr<const Cache> cache_;
};

RegionPolytope best_reply_region(const ReceiverType& type, int action);

const std::vector<Belief>& enumerate_vertices(const RegionPolytope& region);

int region_dimension(const RegionPolytope& region);

bool region_contains(const RegionPolytope& region, const Belief& belief,
                     double tol);

/// Euclidean distance (full-coordinate norm) from a belief to the region.
double distance_to_region(const RegionPolytope& region, const Belief& belief);

/// The point of the region closest to `belief`.
Belief nearest_point_in_region(const RegionPolytope& region,
                               const Belief& belief);

/// max over x in P of dist(x, Q); the one-sided gap used by all the
/// stability arguments. Both regions must be nonempty.
double directed_max_min_distance(const RegionPolytope& P,
                                 const RegionPolytope& Q);

/// Radius of the largest ball around the prior whose intersection with the
/// affine hull of the simplex stays inside the simplex:
/// sqrt(N)/sqrt(N-1) * min_j prior(j).
double max_ball_radius(const Belief& prior);

/// For a nonempty region of dimension < N-1: an action b != a whose region is
/// full-dimensional and contains it (lowest index). Throws internal_error if
/// none exists, which would contradict the containment guarantee.
int containing_fulldim_region(const ReceiverType& type, int action);

/// Dimension computed from the implicit equalities of the reduced system
/// instead of the vertex set; used to cross-check region_dimension.
int dimension_via_implicit_equalities(const RegionPolytope& region);

/// Affine rank of a point set (threshold on orthogonalized residual norms);
/// -1 for an empty set.
int affine_rank(const std::vector<Belief>& points, double threshold);

std::string debug_dump(const RegionPolytope& region,
                       const std::vector<std::string>& state_labels,
                       const std::vector<std::string>& action_labels);

}  // namespace persuasion

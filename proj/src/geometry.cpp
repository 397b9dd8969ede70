#include "persuasion/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace persuasion {

namespace {

// All rows of a reduced system as C x <= d, simplex constraints included:
// the R system rows, then n nonnegativity rows, then the sum row.
struct ConstraintRows {
  Matrix C;
  Vector d;
};

ConstraintRows stack_rows(const HalfspaceSystem& sys) {
  const int n = sys.num_states - 1;
  const int m = static_cast<int>(sys.normals.rows());
  ConstraintRows rows;
  rows.C.resize(m + n + 1, n);
  rows.d.resize(m + n + 1);
  if (m > 0) {
    rows.C.topRows(m) = sys.normals;
    rows.d.head(m) = sys.offsets;
  }
  rows.C.middleRows(m, n) = -Matrix::Identity(n, n);
  rows.d.segment(m, n).setZero();
  rows.C.row(m + n).setOnes();
  rows.d[m + n] = 1.0;
  return rows;
}

bool satisfies_all(const ConstraintRows& rows, const Vector& x, double tol) {
  const Vector slack = rows.C * x - rows.d;
  return slack.maxCoeff() <= tol;
}

Vector to_reduced(const Belief& b) { return b.probs().head(b.size() - 1); }

Belief to_belief(const Vector& x, double mem_tol) {
  Vector full(x.size() + 1);
  full.head(x.size()) = x;
  full[x.size()] = 1.0 - x.sum();
  return Belief::clamped(std::move(full), mem_tol);
}

bool lex_less(const Belief& a, const Belief& b) {
  for (int j = 0; j < a.size(); ++j) {
    if (a[j] < b[j]) return true;
    if (a[j] > b[j]) return false;
  }
  return false;
}

// Enumerates every size-k index subset of [0, total).
template <typename Fn>
void for_each_subset(int total, int k, Fn&& fn) {
  if (k > total || k <= 0) return;
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    fn(idx);
    int pos = k - 1;
    while (pos >= 0 && idx[pos] == total - k + pos) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (int i = pos + 1; i < k; ++i) idx[i] = idx[i - 1] + 1;
  }
}

}  // namespace

void append_simplex_halfspace(HalfspaceSystem& sys, const Vector& w,
                              int rival) {
  const int n = sys.num_states - 1;
  if (w.size() != sys.num_states)
    throw std::invalid_argument("halfspace: wrong coefficient length");
  const double beta = -w[n];
  Vector normal(n);
  for (int j = 0; j < n; ++j) normal[j] = w[j] - w[n];
  sys.normals.conservativeResize(sys.normals.rows() + 1, n);
  sys.normals.row(sys.normals.rows() - 1) = normal.transpose();
  sys.offsets.conservativeResize(sys.offsets.size() + 1);
  sys.offsets[sys.offsets.size() - 1] = beta;
  sys.rivals.push_back(rival);
}

HalfspaceSystem reduce_region(const ReceiverType& type, int action) {
  const int n_states = type.num_states();
  if (action < 0 || action >= type.num_actions())
    throw std::invalid_argument("action index out of range");
  HalfspaceSystem sys;
  sys.num_states = n_states;
  sys.normals.resize(0, n_states - 1);
  sys.offsets.resize(0);
  for (int b = 0; b < type.num_actions(); ++b) {
    if (b == action) continue;
    const Vector w = (type.u().row(b) - type.u().row(action)).transpose();
    append_simplex_halfspace(sys, w, b);
  }
  return sys;
}

RegionPolytope::RegionPolytope(int owner_action, HalfspaceSystem system,
                               Tolerances tol)
    : owner_action_(owner_action), system_(std::move(system)), tol_(tol) {}

RegionPolytope::RegionPolytope(const RegionPolytope& other) {
  std::lock_guard<std::mutex> lk(other.mu_);
  owner_action_ = other.owner_action_;
  system_ = other.system_;
  tol_ = other.tol_;
  cache_ = other.cache_;
}

RegionPolytope& RegionPolytope::operator=(const RegionPolytope& other) {
  if (this == &other) return *this;
  std::shared_ptr<const Cache> c;
  {
    std::lock_guard<std::mutex> lk(other.mu_);
    c = other.cache_;
    owner_action_ = other.owner_action_;
    system_ = other.system_;
    tol_ = other.tol_;
  }
  std::lock_guard<std::mutex> lk(mu_);
  cache_ = std::move(c);
  return *this;
}

const RegionPolytope::Cache& RegionPolytope::cache() const {
  std::lock_guard<std::mutex> lk(mu_);
  if (cache_) return *cache_;

  auto out = std::make_shared<Cache>();
  const int n = system_.num_states - 1;
  const ConstraintRows rows = stack_rows(system_);
  const int total = static_cast<int>(rows.C.rows());

  // Every vertex solves some n x n subsystem of tight constraints; solve them
  // all and keep the feasible ones.
  std::vector<Belief>& verts = out->vertices;
  for_each_subset(total, n, [&](const std::vector<int>& idx) {
    Matrix A(n, n);
    Vector b(n);
    for (int i = 0; i < n; ++i) {
      A.row(i) = rows.C.row(idx[i]);
      b[i] = rows.d[idx[i]];
    }
    Eigen::FullPivLU<Matrix> lu(A);
    if (lu.rank() < n) return;
    const Vector x = lu.solve(b);
    if (!x.allFinite()) return;
    if (!satisfies_all(rows, x, tol_.mem)) return;
    Belief cand = to_belief(x, 2.0 * tol_.mem);
    for (const auto& v : verts)
      if ((v.probs() - cand.probs()).norm() <= tol_.dedup) return;
    verts.push_back(std::move(cand));
  });

  std::sort(verts.begin(), verts.end(), lex_less);
  out->dim = affine_rank(verts, tol_.rank);
  cache_ = std::move(out);
  return *cache_;
}

const std::vector<Belief>& RegionPolytope::vertices() const {
  return cache().vertices;
}

int RegionPolytope::dim() const { return cache().dim; }

RegionPolytope best_reply_region(const ReceiverType& type, int action) {
  return RegionPolytope(action, reduce_region(type, action),
                        type.instance().tol());
}

const std::vector<Belief>& enumerate_vertices(const RegionPolytope& region) {
  return region.vertices();
}

int region_dimension(const RegionPolytope& region) { return region.dim(); }

bool region_contains(const RegionPolytope& region, const Belief& belief,
                     double tol) {
  if (belief.size() != region.system().num_states)
    throw std::invalid_argument("belief length does not match region");
  const ConstraintRows rows = stack_rows(region.system());
  return satisfies_all(rows, to_reduced(belief), tol);
}

namespace {

std::pair<double, Belief> nearest_point_impl(const RegionPolytope& region,
                                             const Belief& x) {
  const auto& verts = region.vertices();
  if (verts.empty())
    throw std::domain_error("nearest point requested on an empty region");
  const int n_full = x.size();
  const double mem = region.tol().mem;
  const ConstraintRows rows = stack_rows(region.system());

  double best = std::numeric_limits<double>::infinity();
  Vector best_point;
  const int kmax = std::min<int>(n_full, static_cast<int>(verts.size()));

  // The closest point lies on some face; project onto the affine hull of
  // every small vertex subset and keep the feasible projections.
  for (int k = 1; k <= kmax; ++k) {
    for_each_subset(static_cast<int>(verts.size()), k,
                    [&](const std::vector<int>& idx) {
      const Vector& v0 = verts[idx[0]].probs();
      Vector y;
      if (k == 1) {
        y = v0;
      } else {
        Matrix B(n_full, k - 1);
        for (int i = 1; i < k; ++i)
          B.col(i - 1) = verts[idx[i]].probs() - v0;
        const Matrix G = B.transpose() * B;
        Eigen::FullPivLU<Matrix> lu(G);
        if (lu.rank() < k - 1) return;  // affinely dependent subset
        const Vector c = lu.solve(B.transpose() * (x.probs() - v0));
        y = v0 + B * c;
      }
      const double dist = (x.probs() - y).norm();
      if (dist >= best) return;
      if (!satisfies_all(rows, y.head(n_full - 1), mem)) return;
      best = dist;
      best_point = y;
    });
  }
  if (!std::isfinite(best))
    throw internal_error("no feasible projection found for a nonempty region");
  return {best, Belief::clamped(best_point, 2.0 * mem)};
}

}  // namespace

double distance_to_region(const RegionPolytope& region, const Belief& belief) {
  return nearest_point_impl(region, belief).first;
}

Belief nearest_point_in_region(const RegionPolytope& region,
                               const Belief& belief) {
  return nearest_point_impl(region, belief).second;
}

double directed_max_min_distance(const RegionPolytope& P,
                                 const RegionPolytope& Q) {
  if (P.empty() || Q.empty())
    throw std::domain_error("directed distance needs nonempty regions");
  double worst = 0.0;
  for (const auto& v : P.vertices())
    worst = std::max(worst, distance_to_region(Q, v));
  return worst;
}

double max_ball_radius(const Belief& prior) {
  const int n = prior.size();
  const double mn = prior.probs().minCoeff();
  if (!(mn > 0.0))
    throw std::domain_error("max ball radius needs a full-support prior");
  return std::sqrt(static_cast<double>(n)) /
         std::sqrt(static_cast<double>(n - 1)) * mn;
}

int containing_fulldim_region(const ReceiverType& type, int action) {
  const RegionPolytope region = best_reply_region(type, action);
  const int full = type.num_states() - 1;
  if (region.empty() || region.dim() == full)
    throw std::domain_error(
        "containing region requires a nonempty lower-dimensional input");
  for (int b = 0; b < type.num_actions(); ++b) {
    if (b == action) continue;
    const RegionPolytope rb = best_reply_region(type, b);
    if (rb.dim() != full) continue;
    bool all_inside = true;
    for (const auto& v : region.vertices())
      if (!region_contains(rb, v, type.instance().tol().mem)) {
        all_inside = false;
        break;
      }
    if (all_inside) return b;
  }
  throw internal_error(
      "lower-dimensional region has no full-dimensional container");
}

int dimension_via_implicit_equalities(const RegionPolytope& region) {
  const auto& verts = region.vertices();
  if (verts.empty()) return -1;
  const ConstraintRows rows = stack_rows(region.system());
  const int n = region.system().num_states - 1;
  const double mem = region.tol().mem;

  // A row is an implicit equality when it is tight at every vertex.
  std::vector<Vector> tight;
  for (int r = 0; r < rows.C.rows(); ++r) {
    bool everywhere = true;
    for (const auto& v : verts) {
      const double slack = rows.d[r] - rows.C.row(r).dot(to_reduced(v));
      if (std::abs(slack) > mem) {
        everywhere = false;
        break;
      }
    }
    if (everywhere) tight.push_back(rows.C.row(r).transpose());
  }

  // Linear rank of the implicit-equality normals.
  std::vector<Vector> basis;
  for (Vector d : tight) {
    for (const auto& b : basis) d -= b.dot(d) * b;
    for (const auto& b : basis) d -= b.dot(d) * b;
    const double nrm = d.norm();
    if (nrm > region.tol().rank) basis.push_back(d / nrm);
  }
  return n - static_cast<int>(basis.size());
}

int affine_rank(const std::vector<Belief>& points, double threshold) {
  if (points.empty()) return -1;
  std::vector<Vector> basis;
  for (size_t i = 1; i < points.size(); ++i) {
    Vector d = points[i].probs() - points[0].probs();
    for (const auto& b : basis) d -= b.dot(d) * b;
    for (const auto& b : basis) d -= b.dot(d) * b;
    const double nrm = d.norm();
    if (nrm > threshold) basis.push_back(d / nrm);
  }
  return static_cast<int>(basis.size());
}

std::string debug_dump(const RegionPolytope& region,
                       const std::vector<std::string>& state_labels,
                       const std::vector<std::string>& action_labels) {
  std::ostringstream os;
  os.precision(9);
  const auto& sys = region.system();
  os << "region of action " << action_labels[region.owner_action()] << "\n";
  os << "  halfspaces over (" ;
  for (size_t j = 0; j + 1 < state_labels.size(); ++j)
    os << state_labels[j] << (j + 2 < state_labels.size() ? ", " : "");
  os << "):\n";
  for (int r = 0; r < sys.normals.rows(); ++r) {
    os << "    [";
    for (int j = 0; j < sys.normals.cols(); ++j)
      os << sys.normals(r, j) << (j + 1 < sys.normals.cols() ? ", " : "");
    os << "] . x <= " << sys.offsets[r];
    if (sys.rivals[r] >= 0) os << "   (vs " << action_labels[sys.rivals[r]] << ")";
    os << "\n";
  }
  os << "  plus x(j) >= 0 and sum x <= 1\n";
  os << "  dim " << region.dim() << ", vertices:\n";
  for (const auto& v : region.vertices()) {
    os << "    (";
    for (int j = 0; j < v.size(); ++j)
      os << v[j] << (j + 1 < v.size() ? ", " : "");
    os << ")\n";
  }
  return os.str();
}

}  // namespace persuasion

#pragma once

#include <Eigen/Dense>

#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace persuasion {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Raised when a computation contradicts a structural guarantee the rest of
// the code relies on. The CLI maps this to exit status 3; everything else
// user-facing maps to status 2.
class internal_error : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Numerical tolerances. All defaults are overridable at instance load.
struct Tolerances {
  double sum = 1e-9;    // probability / weight sums
  double bary = 1e-9;   // barycenter residual, per coordinate
  double tie = 1e-9;    // best-reply indifference
  double mem = 1e-8;    // polytope membership
  double dedup = 1e-7;  // vertex de-duplication radius (Euclidean)
  double dup = 1e-9;    // duplicate-utility-row detection
  double opt = 1e-9;    // optimal-value ties
  double rank = 1e-8;   // pivot threshold for affine-rank computations
};

/// A probability vector over states: entries nonnegative, summing to one.
class Belief {
 public:
  Belief() = default;

  // Validates nonnegativity and unit sum within sum_tol.
  static Belief checked(Vector probs, double sum_tol = 1e-9);

  // For internally computed points: clamps entries above -mem_tol to zero and
  // rescales so the result is exactly on the simplex.
  static Belief clamped(Vector probs, double mem_tol = 1e-8);

  // Point mass on state j.
  static Belief point_mass(int num_states, int j);

  int size() const { return static_cast<int>(probs_.size()); }
  double operator[](int j) const { return probs_[j]; }
  const Vector& probs() const { return probs_; }

 private:
  explicit Belief(Vector probs) : probs_(std::move(probs)) {}
  Vector probs_;
};

class PersuasionInstance;
using InstancePtr = std::shared_ptr<const PersuasionInstance>;

/// A finite persuasion problem: full-support prior over N states, M receiver
/// actions, and utility matrices (actions x states) normalized to [0,1].
class PersuasionInstance {
 public:
  static InstancePtr create(std::vector<std::string> state_labels,
                            std::vector<std::string> action_labels,
                            Belief prior, Matrix receiver_u, Matrix sender_v,
                            Tolerances tol = {});

  int num_states() const { return static_cast<int>(receiver_u_.cols()); }
  int num_actions() const { return static_cast<int>(receiver_u_.rows()); }
  const std::vector<std::string>& state_labels() const { return state_labels_; }
  const std::vector<std::string>& action_labels() const { return action_labels_; }
  const Belief& prior() const { return prior_; }
  const Matrix& receiver_u() const { return receiver_u_; }
  const Matrix& sender_v() const { return sender_v_; }
  const Tolerances& tol() const { return tol_; }

 private:
  PersuasionInstance() = default;
  std::vector<std::string> state_labels_;
  std::vector<std::string> action_labels_;
  Belief prior_;
  Matrix receiver_u_;
  Matrix sender_v_;
  Tolerances tol_;
};

/// One receiver payoff type. The sender's utilities and the prior always come
/// from the reference instance; only the receiver matrix varies. Entries are
/// not forced into [0,1]: a box built from an explicit interval convention may
/// legitimately place types slightly outside the normalized range.
class ReceiverType {
 public:
  ReceiverType(InstancePtr instance, Matrix receiver_u);

  const PersuasionInstance& instance() const { return *instance_; }
  const InstancePtr& instance_ptr() const { return instance_; }
  const Matrix& u() const { return u_; }
  int num_states() const { return instance_->num_states(); }
  int num_actions() const { return instance_->num_actions(); }

 private:
  InstancePtr instance_;
  Matrix u_;
};

/// The reference type theta_0 of an instance.
ReceiverType reference_type(const InstancePtr& instance);

/// Symmetric-information uncertainty about the receiver: one closed interval
/// [lo, hi] of utilities per (action, state) entry, wrapping the reference.
class UtilityBox {
 public:
  // Every entry gets an interval of length delta centred at the reference
  // utility. When clip is set, bounds are cut to [0,1] (the clip is recorded,
  // not silent); entries at the boundary then sit on the box edge.
  static UtilityBox uniform_delta(InstancePtr reference, double delta,
                                  bool clip = true);

  // Explicit per-entry bounds; must satisfy lo <= reference u <= hi.
  static UtilityBox from_bounds(InstancePtr reference, Matrix lo, Matrix hi);

  const InstancePtr& reference() const { return reference_; }
  const Matrix& lo() const { return lo_; }
  const Matrix& hi() const { return hi_; }
  Matrix width() const { return hi_ - lo_; }
  bool was_clipped() const { return clipped_; }

  bool contains(const ReceiverType& type, double tol = 1e-12) const;
  // True when the reference utilities are strictly inside every interval of
  // positive width (entries with zero width count as degenerate-interior).
  bool strictly_wraps() const;

  // One type drawn entry-wise uniformly from the box. Deterministic given the
  // generator state and portable across platforms.
  ReceiverType sample(std::mt19937_64& rng) const;

 private:
  UtilityBox() = default;
  InstancePtr reference_;
  Matrix lo_, hi_;
  bool clipped_ = false;
};

struct PolicySupport {
  double weight = 0.0;
  Belief posterior;
};

/// A signal policy in splitting form: positive weights on finitely many
/// posteriors whose barycenter is the prior.
struct SignalPolicy {
  std::vector<PolicySupport> supports;
};

struct PolicyCheck {
  bool ok = true;
  std::string violation;   // first violated constraint, empty when ok
  double residual = 0.0;   // magnitude of that violation
};

// Canonical uniform double in [0,1) from 53 random bits; used everywhere a
// sampled real must be reproducible across standard library implementations.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace persuasion

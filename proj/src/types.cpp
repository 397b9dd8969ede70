#include "persuasion/types.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace persuasion {

Belief Belief::checked(Vector probs, double sum_tol) {
  if (probs.size() == 0) throw std::invalid_argument("belief: empty vector");
  for (int j = 0; j < probs.size(); ++j) {
    if (!(probs[j] >= 0.0)) {
      std::ostringstream os;
      os << "belief: entry " << j << " is negative (" << probs[j] << ")";
      throw std::invalid_argument(os.str());
    }
  }
  const double s = probs.sum();
  if (std::abs(s - 1.0) > sum_tol) {
    std::ostringstream os;
    os << "belief: entries sum to " << s << ", expected 1 within " << sum_tol;
    throw std::invalid_argument(os.str());
  }
  return Belief(std::move(probs));
}

Belief Belief::clamped(Vector probs, double mem_tol) {
  for (int j = 0; j < probs.size(); ++j) {
    if (probs[j] < -mem_tol) {
      std::ostringstream os;
      os << "belief: entry " << j << " = " << probs[j]
         << " is negative beyond tolerance";
      throw std::invalid_argument(os.str());
    }
    if (probs[j] < 0.0) probs[j] = 0.0;
  }
  const double s = probs.sum();
  if (s <= 0.0) throw std::invalid_argument("belief: zero mass");
  probs /= s;
  return Belief(std::move(probs));
}

Belief Belief::point_mass(int num_states, int j) {
  Vector v = Vector::Zero(num_states);
  v[j] = 1.0;
  return Belief(std::move(v));
}

InstancePtr PersuasionInstance::create(std::vector<std::string> state_labels,
                                       std::vector<std::string> action_labels,
                                       Belief prior, Matrix receiver_u,
                                       Matrix sender_v, Tolerances tol) {
  const int n = static_cast<int>(state_labels.size());
  const int m = static_cast<int>(action_labels.size());
  if (n < 2) throw std::invalid_argument("instance: need at least 2 states");
  if (m < 1) throw std::invalid_argument("instance: need at least 1 action");
  if (prior.size() != n)
    throw std::invalid_argument("instance: prior length != state count");
  for (int j = 0; j < n; ++j) {
    if (prior[j] <= 0.0)
      throw std::invalid_argument(
          "instance: prior must have full support (entry " +
          std::to_string(j) + " is not positive)");
  }
  auto check_matrix = [&](const Matrix& u, const char* name) {
    if (u.rows() != m || u.cols() != n) {
      std::ostringstream os;
      os << "instance: " << name << " must be " << m << "x" << n << ", got "
         << u.rows() << "x" << u.cols();
      throw std::invalid_argument(os.str());
    }
    for (int a = 0; a < m; ++a)
      for (int j = 0; j < n; ++j)
        if (!(u(a, j) >= 0.0 && u(a, j) <= 1.0)) {
          std::ostringstream os;
          os << "instance: " << name << "(" << a << "," << j << ") = "
             << u(a, j) << " outside [0,1]";
          throw std::invalid_argument(os.str());
        }
  };
  check_matrix(receiver_u, "receiver_u");
  check_matrix(sender_v, "sender_v");

  auto inst = std::shared_ptr<PersuasionInstance>(new PersuasionInstance());
  inst->state_labels_ = std::move(state_labels);
  inst->action_labels_ = std::move(action_labels);
  inst->prior_ = std::move(prior);
  inst->receiver_u_ = std::move(receiver_u);
  inst->sender_v_ = std::move(sender_v);
  inst->tol_ = tol;
  return inst;
}

ReceiverType::ReceiverType(InstancePtr instance, Matrix receiver_u)
    : instance_(std::move(instance)), u_(std::move(receiver_u)) {
  if (!instance_) throw std::invalid_argument("type: null instance");
  if (u_.rows() != instance_->num_actions() ||
      u_.cols() != instance_->num_states())
    throw std::invalid_argument("type: utility matrix shape mismatch");
}

ReceiverType reference_type(const InstancePtr& instance) {
  return ReceiverType(instance, instance->receiver_u());
}

UtilityBox UtilityBox::uniform_delta(InstancePtr reference, double delta,
                                     bool clip) {
  if (!(delta >= 0.0))
    throw std::invalid_argument("box: delta must be nonnegative");
  UtilityBox box;
  const Matrix& u = reference->receiver_u();
  box.reference_ = std::move(reference);
  box.lo_ = u.array() - delta / 2.0;
  box.hi_ = u.array() + delta / 2.0;
  if (clip) {
    Matrix lo_c = box.lo_.cwiseMax(0.0);
    Matrix hi_c = box.hi_.cwiseMin(1.0);
    box.clipped_ = (lo_c - box.lo_).norm() > 0.0 || (hi_c - box.hi_).norm() > 0.0;
    box.lo_ = std::move(lo_c);
    box.hi_ = std::move(hi_c);
  }
  return box;
}

UtilityBox UtilityBox::from_bounds(InstancePtr reference, Matrix lo, Matrix hi) {
  const Matrix& u = reference->receiver_u();
  if (lo.rows() != u.rows() || lo.cols() != u.cols() || hi.rows() != u.rows() ||
      hi.cols() != u.cols())
    throw std::invalid_argument("box: bound matrix shape mismatch");
  for (int a = 0; a < u.rows(); ++a)
    for (int j = 0; j < u.cols(); ++j)
      if (!(lo(a, j) <= u(a, j) && u(a, j) <= hi(a, j))) {
        std::ostringstream os;
        os << "box: reference utility (" << a << "," << j
           << ") not inside [lo,hi]";
        throw std::invalid_argument(os.str());
      }
  UtilityBox box;
  box.reference_ = std::move(reference);
  box.lo_ = std::move(lo);
  box.hi_ = std::move(hi);
  return box;
}

bool UtilityBox::contains(const ReceiverType& type, double tol) const {
  const Matrix& u = type.u();
  for (int a = 0; a < u.rows(); ++a)
    for (int j = 0; j < u.cols(); ++j)
      if (u(a, j) < lo_(a, j) - tol || u(a, j) > hi_(a, j) + tol) return false;
  return true;
}

bool UtilityBox::strictly_wraps() const {
  const Matrix& u = reference_->receiver_u();
  for (int a = 0; a < u.rows(); ++a)
    for (int j = 0; j < u.cols(); ++j) {
      if (hi_(a, j) - lo_(a, j) <= 0.0) continue;
      if (!(lo_(a, j) < u(a, j) && u(a, j) < hi_(a, j))) return false;
    }
  return true;
}

ReceiverType UtilityBox::sample(std::mt19937_64& rng) const {
  Matrix u = lo_;
  for (int a = 0; a < u.rows(); ++a)
    for (int j = 0; j < u.cols(); ++j)
      u(a, j) = lo_(a, j) + (hi_(a, j) - lo_(a, j)) * uniform01(rng);
  return ReceiverType(reference_, std::move(u));
}

}  // namespace persuasion

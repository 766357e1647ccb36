#pragma once

#include "fscap/channel.hpp"
#include "fscap/policy.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace fscap {

/// (s_1, x^n, y^n). Unifilarity makes the rest of the state path a function
/// of this key.
struct TrajectoryKey {
  State s1 = 0;
  std::uint32_t xbits = 0;
  std::uint32_t ybits = 0;

  friend auto operator<=>(const TrajectoryKey&, const TrajectoryKey&) = default;
};

/// Random variable symbol X_t, Y_t (1 <= t <= n) or S_t (1 <= t <= n+1).
struct Var {
  enum class Kind { X, Y, S };
  Kind kind = Kind::X;
  unsigned t = 1;

  static Var parse(std::string_view name);
  std::string name() const;

  friend auto operator<=>(const Var&, const Var&) = default;
};

/// Exact joint pmf of (X^n, Y^n, S^{n+1}); zero-mass trajectories omitted.
class JointLaw {
 public:
  unsigned horizon() const { return n_; }
  const UnifilarChannel& channel() const { return *channel_; }
  const std::map<TrajectoryKey, Rat>& entries() const { return entries_; }

  /// s_1, ..., s_{n+1}.
  std::vector<State> state_path(const TrajectoryKey& key) const;
  /// Value of a variable on a trajectory.
  std::uint32_t value(const TrajectoryKey& key, const Var& v) const;

  Rat total() const;

  friend JointLaw induced_joint_law(const UnifilarChannel&, const CausalPolicy&, unsigned);

 private:
  unsigned n_ = 0;
  std::shared_ptr<const UnifilarChannel> channel_;
  std::map<TrajectoryKey, Rat> entries_;
};

/// pi(s_1) prod_t p(x_t | x^{t-1}, y^{t-1}) W(y_t, s_{t+1} | x_t, s_t).
/// Throws std::invalid_argument when the policy horizon differs from n.
JointLaw induced_joint_law(const UnifilarChannel& channel, const CausalPolicy& policy, unsigned n);

/// The same product for one trajectory, including zero-mass ones.
Rat trajectory_probability(const UnifilarChannel& channel, const CausalPolicy& policy,
                           const TrajectoryKey& key);

struct Marginal {
  std::vector<Var> vars;
  std::map<std::vector<std::uint32_t>, Rat> entries;

  Rat total() const;
  std::vector<Rat> masses() const;
};

/// Throws std::invalid_argument on an empty, duplicated or out-of-range
/// variable list.
Marginal marginal(const JointLaw& law, const std::vector<Var>& vars);
Marginal marginal(const JointLaw& law, const std::vector<std::string>& names);

/// Exact ell_1 distance over the union of supports. Throws on shape mismatch.
Rat l1_law_distance(const JointLaw& a, const JointLaw& b);

/// |X|^n |Y|^n |S|^{n+1} n.
BigInt lipschitz_constant(const UnifilarChannel& channel, unsigned n);

/// One trajectory per line: s1, x bits, y bits, mass.
std::string format_law_text(const JointLaw& law);

}  // namespace fscap

#pragma once

#include "fscap/channel.hpp"
#include "fscap/rational.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fscap {

/// Thrown when an enumeration would exceed the caller's cap on policy count.
class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(BigInt required, std::uint64_t budget, const std::string& context);
  const BigInt& required() const { return required_; }
  std::uint64_t budget() const { return budget_; }

 private:
  BigInt required_;
  std::uint64_t budget_;
};

/// Conditioning history (x^{t-1}, y^{t-1}) of step t. Bit strings are packed
/// with the earliest symbol in the most significant position.
struct History {
  unsigned t = 1;
  std::uint32_t xbits = 0;
  std::uint32_t ybits = 0;

  friend bool operator==(const History&, const History&) = default;
};

inline constexpr unsigned kMaxHorizon = 15;

/// Number of free coordinates: sum_{t=1..n} (|X||Y|)^{t-1} (|X|-1).
std::uint64_t policy_dimension(unsigned n);
std::uint64_t policy_dimension(const UnifilarChannel& channel, unsigned n);

/// Flat position of a history; positions of step t follow all of step t-1,
/// ordered lexicographically by (x^{t-1}, y^{t-1}).
std::uint64_t coordinate_index(const History& h);
History history_at(std::uint64_t index);

/// Free coordinates theta_i = p(x_t = 1 | history i).
struct PolicyCoordinates {
  unsigned horizon = 1;
  std::vector<Rat> theta;

  friend bool operator==(const PolicyCoordinates&, const PolicyCoordinates&) = default;
};

class CausalPolicy {
 public:
  /// Throws std::invalid_argument on wrong length or coordinates outside [0,1].
  static CausalPolicy from_coordinates(PolicyCoordinates coords);

  unsigned horizon() const { return coords_.horizon; }
  std::size_t dimension() const { return coords_.theta.size(); }
  const PolicyCoordinates& coordinates() const { return coords_; }

  /// p(x_t = x | x^{t-1}, y^{t-1}).
  Rat prob(const History& h, unsigned x) const;
  const Rat& prob_one(const History& h) const { return coords_.theta[coordinate_index(h)]; }

  /// Copy with one coordinate replaced.
  CausalPolicy with_coordinate(std::uint64_t index, const Rat& value) const;

  friend bool operator==(const CausalPolicy&, const CausalPolicy&) = default;

 private:
  explicit CausalPolicy(PolicyCoordinates coords) : coords_(std::move(coords)) {}
  PolicyCoordinates coords_;
};

CausalPolicy uniform_policy(unsigned n);
/// Every history maps to input `x` with certainty.
CausalPolicy deterministic_policy(unsigned n, unsigned x);

/// Sum_i |a_i - b_i|. Throws std::invalid_argument on dimension mismatch.
Rat l1_distance(const PolicyCoordinates& a, const PolicyCoordinates& b);

struct GridNet {
  unsigned M = 1;
  std::uint64_t dimension = 0;
  Rat eta;  // covering radius d/M

  static GridNet make(unsigned n, unsigned M);
  /// (M+1)^d.
  BigInt count() const;
};

/// Lazily enumerates the grid policies with coordinates in {0, 1/M, ..., 1}
/// in lexicographic order of the flat coordinate vector.
class GridEnumerator {
 public:
  /// Throws BudgetExceeded when (M+1)^d > budget.
  GridEnumerator(unsigned n, unsigned M, std::uint64_t budget);

  const GridNet& net() const { return net_; }
  std::uint64_t size() const { return size_; }

  /// Policy at position `index` of the enumeration.
  CausalPolicy at(std::uint64_t index) const;

  /// Streams the next policy; returns false once exhausted.
  bool next(CausalPolicy& out);
  void reset();

  /// Index of the grid point nearest to `coords` (coordinate-wise rounding,
  /// ties downward).
  std::uint64_t nearest_index(const PolicyCoordinates& coords) const;

 private:
  unsigned n_;
  GridNet net_;
  std::uint64_t size_;
  std::vector<unsigned> digits_;
  std::uint64_t position_ = 0;
};

// Textual interchange: header `fscpolicy1`, `horizon <n>`, then one
// `p <t> <x-history> <y-history> <rat>` line per coordinate, histories as
// bit strings with `-` for the empty history.
std::string format_policy_text(const CausalPolicy& policy);
CausalPolicy parse_policy_text(std::string_view text);

}  // namespace fscap

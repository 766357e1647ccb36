#pragma once

#include "fscap/certified_real.hpp"
#include "fscap/channel.hpp"
#include "fscap/policy.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fscap {

// ---------------------------------------------------------------------------
// Sound upper bound from channel duality.

/// Upper bound on V_n. For each step t and output history y^{t-1}, the map
/// x^t -> P(y_t | x^t, y^{t-1}) is policy independent, so
///   I(X^t; Y_t | Y^{t-1}) <= max_{y^{t-1}} min_beta max_{x^t} D(P(.|x^t,y^{t-1}) || Bern(beta)).
/// Each step is also capped at 1 bit. The returned value is a dyadic
/// rational >= V_n, computed to within about 2^-m of the bound.
Rat dual_upper_bound(const UnifilarChannel& channel, unsigned n, unsigned m);

/// min_beta max(D(a||beta), D(b||beta)) upper enclosure end for Bernoulli
/// parameters a <= b; 0 when a == b.
Rat binary_capacity_upper(const Rat& a, const Rat& b, unsigned m);

// ---------------------------------------------------------------------------
// Certified values.

struct Provenance {
  std::string method;               // "net", "bracket" or "report-bound"
  unsigned M = 0;                   // net resolution, 0 when no net bound is used
  Rat eta;                          // d/M
  Rat delta;                        // L * eta
  BigInt lipschitz;                 // L_{e,n}
  Rat omega_sum;                    // upper end of sum_t step_modulus(t, delta)
  unsigned eval_exponent = 0;       // each policy enclosure has width <= 2^-eval_exponent
  std::uint64_t policies_evaluated = 0;
  std::uint64_t argmax_index = 0;   // index of the best policy in the grid over reachable coordinates
  std::string witness;              // "grid", "uniform" or "heuristic" (bracket)
  Rat best_lower;                   // max enclosure lower end
  Rat best_upper;                   // max enclosure upper end
  Rat best_midpoint;                // max enclosure midpoint
  std::optional<Rat> dual_upper;    // dual_upper_bound when computed
  BigInt required_count;            // (M_target + 1)^d for target mode, else (M+1)^d
};

struct CertifiedValue {
  Rat estimate;
  Rat radius;
  unsigned horizon = 1;
  bool normalized = false;
  Provenance provenance;

  Rat low() const { return estimate - radius; }
  Rat high() const { return estimate + radius; }
  bool contains(const Rat& v) const { return low() <= v && v <= high(); }
};

/// Raised when a certified computation cannot meet its contract within the
/// policy budget. Carries the literal net size and the largest feasible k.
class ApproxBudgetExceeded : public BudgetExceeded {
 public:
  ApproxBudgetExceeded(BigInt required, std::uint64_t budget, std::optional<unsigned> feasible_k,
                       const std::string& context);
  std::optional<unsigned> feasible_k() const { return feasible_k_; }

 private:
  std::optional<unsigned> feasible_k_;
};

struct SolverOptions {
  std::uint64_t budget = 200000;  // cap on policy evaluations
  unsigned workers = 1;
  std::uint64_t seed = 0;         // heuristic seed used in bracket mode
};

/// Grid size selected by the literal net construction for target 2^-k.
struct NetPlan {
  Rat eta_target;      // halved until sum_t omega_t(L eta) <= 2^-(k+2)
  BigInt M;           // ceil(d / eta_target)
  BigInt count;        // (M+1)^d
  BigInt evaluated_count;  // (M+1)^(reachable coordinates), the policies actually evaluated
  Rat omega_sum;       // at delta = L d / M
};
NetPlan plan_net(const UnifilarChannel& channel, unsigned n, unsigned k);

/// |r - V_n| <= 2^-k (unnormalized). Throws ApproxBudgetExceeded.
CertifiedValue approx_value(const ChannelEncoding& e, unsigned n, unsigned k, const SolverOptions& opts = {});

/// |r - V_n / n| <= 2^-k. Throws ApproxBudgetExceeded.
CertifiedValue approx_normalized(const ChannelEncoding& e, unsigned n, unsigned k,
                                 const SolverOptions& opts = {});

/// Report-bound mode on the caller's grid resolution M: r is the largest
/// enclosure midpoint over the net, radius from the moduli (and the dual
/// bound when tighter). Throws BudgetExceeded.
CertifiedValue evaluate_net(const UnifilarChannel& channel, unsigned n, unsigned M, unsigned eval_exponent,
                            const SolverOptions& opts = {});

/// Precision used for the moduli and the dual bound relative to a policy
/// evaluation exponent; recheck relies on the same choice.
inline constexpr unsigned kModulusExtraBits = 6;
inline constexpr unsigned kDualExtraBits = 2;

/// Recomputes the radius from the provenance record. Returns an empty string
/// when the stored claim is justified, else a description of the failure.
std::string recheck(const UnifilarChannel& channel, const CertifiedValue& value);

// ---------------------------------------------------------------------------
// Uncertified search.

struct HeuristicResult {
  Rat value;  // dyadic lower estimate of I(X^n -> Y^n) at the witness
  CausalPolicy policy;
  unsigned iterations = 0;
  unsigned restarts = 0;
  std::uint64_t seed = 0;
};

struct HeuristicOptions {
  unsigned restarts = 8;
  unsigned iterations = 200;
  std::uint64_t seed = 0;
  double line_tolerance = 1e-9;
};

/// Multi-start coordinate ascent with golden-section line search per
/// coordinate. Deterministic for a fixed seed.
HeuristicResult heuristic_value(const UnifilarChannel& channel, unsigned n, const HeuristicOptions& opts = {});

/// Slack subtracted from the floating-point objective when reporting the
/// heuristic's dyadic value.
inline constexpr long kHeuristicSlackExponent = 24;

struct SandwichVerdict {
  bool consistent = true;
  std::vector<std::string> failures;
};

/// Checks heuristic.value - tolerance <= certified upper end and, for
/// delayed-activation channels, that the closed form lies in the certified
/// interval and is not exceeded by the heuristic.
SandwichVerdict sandwich_check(const UnifilarChannel& channel, unsigned n, const HeuristicResult& heuristic,
                               const CertifiedValue& certified, const Rat& tolerance);

// ---------------------------------------------------------------------------

/// Single line of space-separated key=value fields.
std::string format_certified_value(const CertifiedValue& value);
CertifiedValue parse_certified_value(std::string_view line);

}  // namespace fscap

#include "fscap/solver.hpp"

#include "fscap/fast_eval.hpp"
#include "fscap/info.hpp"
#include "fscap/law.hpp"

#include <exception>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace fscap {

ApproxBudgetExceeded::ApproxBudgetExceeded(BigInt required, std::uint64_t budget, std::optional<unsigned> feasible_k,
                                           const std::string& context)
    : BudgetExceeded(std::move(required), budget,
                     context + (feasible_k ? " (largest feasible k is " + std::to_string(*feasible_k) + ")"
                                           : " (no k is feasible)")),
      feasible_k_(feasible_k) {}

namespace {

void check_horizon(unsigned n) {
  if (n < 1 || n > kMaxHorizon) {
    throw std::invalid_argument("horizon " + std::to_string(n) + " outside 1.." + std::to_string(kMaxHorizon));
  }
}

Rat omega_sum(unsigned n, const Rat& delta, unsigned m) {
  Rat sum(0);
  for (unsigned t = 1; t <= n; ++t) sum += step_modulus(t, n, delta, m).upper();
  return sum;
}

CertifiedReal evaluate_policy(const UnifilarChannel& channel, const CausalPolicy& policy, unsigned n,
                              unsigned eval_exp) {
  return directed_information(channel, policy, n, eval_exp);
}

struct ScanResult {
  std::uint64_t evaluated = 0;
  std::uint64_t lower_index = 0;
  std::uint64_t mid_index = 0;
  Rat best_lower;
  Rat best_upper;
  Rat best_mid;
};

// Strict comparisons keep the lowest index on ties, both inside a range and
// when ranges are merged in order.
void absorb(ScanResult& acc, const ScanResult& part) {
  if (part.evaluated == 0) return;
  if (acc.evaluated == 0) {
    acc = part;
    return;
  }
  acc.evaluated += part.evaluated;
  if (part.best_lower > acc.best_lower) {
    acc.best_lower = part.best_lower;
    acc.lower_index = part.lower_index;
  }
  if (part.best_mid > acc.best_mid) {
    acc.best_mid = part.best_mid;
    acc.mid_index = part.mid_index;
  }
  if (part.best_upper > acc.best_upper) acc.best_upper = part.best_upper;
}

// Grid over the coordinates whose history the channel can reach. The other
// coordinates never carry probability mass, so fixing them at 0 leaves every
// law, and hence the maximum over the full grid, unchanged.
class RelevantGrid {
 public:
  RelevantGrid(const UnifilarChannel& channel, unsigned n, unsigned M, std::uint64_t budget)
      : n_(n), M_(M), dimension_(policy_dimension(n)) {
    const auto cc = ChannelConditionals::compute(channel, n);
    for (std::uint64_t i = 0; i < dimension_; ++i) {
      if (cc.history_reachable(history_at(i))) relevant_.push_back(i);
    }
    const BigInt count = relevant_count(M, relevant_.size());
    if (count > BigInt(static_cast<unsigned long>(budget))) {
      throw BudgetExceeded(count, budget, "grid n=" + std::to_string(n) + " M=" + std::to_string(M));
    }
    size_ = count.get_ui();
  }

  static BigInt relevant_count(unsigned long M, std::uint64_t relevant) {
    BigInt out;
    mpz_ui_pow_ui(out.get_mpz_t(), M + 1, relevant);
    return out;
  }

  std::uint64_t size() const { return size_; }
  Rat eta() const { return Rat(BigInt(static_cast<unsigned long>(dimension_))) / M_; }
  BigInt full_count() const { return relevant_count(M_, dimension_); }

  // Lexicographic with the first relevant coordinate most significant.
  CausalPolicy at(std::uint64_t index) const {
    PolicyCoordinates pc;
    pc.horizon = n_;
    pc.theta.assign(dimension_, Rat(0));
    for (std::size_t j = relevant_.size(); j-- > 0;) {
      pc.theta[relevant_[j]] = Rat(static_cast<unsigned long>(index % (M_ + 1)), M_);
      index /= M_ + 1;
    }
    for (auto& v : pc.theta) v.canonicalize();
    return CausalPolicy::from_coordinates(std::move(pc));
  }

 private:
  unsigned n_;
  unsigned M_;
  std::uint64_t dimension_;
  std::vector<std::uint64_t> relevant_;
  std::uint64_t size_ = 0;
};

ScanResult scan_range(const UnifilarChannel& channel, const RelevantGrid& grid, unsigned n, unsigned eval_exp,
                      std::uint64_t begin, std::uint64_t end) {
  ScanResult out;
  for (std::uint64_t i = begin; i < end; ++i) {
    const CertifiedReal v = evaluate_policy(channel, grid.at(i), n, eval_exp);
    ScanResult one;
    one.evaluated = 1;
    one.lower_index = one.mid_index = i;
    one.best_lower = v.lower();
    one.best_upper = v.upper();
    one.best_mid = v.midpoint();
    absorb(out, one);
  }
  return out;
}

ScanResult scan_net(const UnifilarChannel& channel, const RelevantGrid& grid, unsigned n, unsigned eval_exp,
                    unsigned workers) {
  const std::uint64_t size = grid.size();
  if (workers <= 1 || size < 2) return scan_range(channel, grid, n, eval_exp, 0, size);
  const std::uint64_t parts = std::min<std::uint64_t>(workers, size);
  std::vector<ScanResult> results(parts);
  std::vector<std::exception_ptr> errors(parts);
  std::vector<std::thread> threads;
  threads.reserve(parts);
  for (std::uint64_t w = 0; w < parts; ++w) {
    const std::uint64_t begin = size * w / parts;
    const std::uint64_t end = size * (w + 1) / parts;
    threads.emplace_back([&, w, begin, end] {
      try {
        results[w] = scan_range(channel, grid, n, eval_exp, begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : threads) th.join();
  ScanResult out;
  for (std::uint64_t w = 0; w < parts; ++w) {
    if (errors[w]) std::rethrow_exception(errors[w]);
    absorb(out, results[w]);
  }
  return out;
}

BigInt ceil_div(const Rat& v) {
  BigInt q;
  mpz_cdiv_q(q.get_mpz_t(), v.get_num_mpz_t(), v.get_den_mpz_t());
  return q;
}

// Largest k' <= k for which the literal net fits the budget or the bracket
// half-width reaches 2^-k'.
std::optional<unsigned> feasible_k(const UnifilarChannel& channel, unsigned n, unsigned k, std::uint64_t budget,
                                   const Rat& half_width) {
  std::optional<unsigned> best;
  const BigInt cap(static_cast<unsigned long>(budget));
  for (unsigned kk = 0; kk <= k; ++kk) {
    if (plan_net(channel, n, kk).evaluated_count > cap) break;
    best = kk;
  }
  for (unsigned kk = k + 1; kk-- > 0;) {
    if (half_width <= pow2(-static_cast<long>(kk))) {
      if (!best || kk > *best) best = kk;
      break;
    }
  }
  return best;
}

CertifiedValue approx_bracket(const UnifilarChannel& channel, unsigned n, unsigned k, const NetPlan& plan,
                              const Rat& dual, const SolverOptions& opts) {
  const unsigned eval_exp = k + 2;
  const Rat target = pow2(-static_cast<long>(k));
  Provenance prov;
  prov.method = "bracket";
  prov.lipschitz = lipschitz_constant(channel, n);
  prov.eval_exponent = eval_exp;
  prov.dual_upper = dual;
  prov.required_count = plan.count;

  const CertifiedReal uniform = evaluate_policy(channel, uniform_policy(n), n, eval_exp);
  prov.policies_evaluated = 1;
  prov.witness = "uniform";
  prov.best_lower = uniform.lower();
  prov.best_upper = uniform.upper();
  prov.best_midpoint = uniform.midpoint();

  if ((dual - prov.best_lower) / 2 > target && opts.budget >= 2) {
    HeuristicOptions hopts;
    hopts.seed = opts.seed;
    const HeuristicResult h = heuristic_value(channel, n, hopts);
    const CertifiedReal v = evaluate_policy(channel, h.policy, n, eval_exp);
    prov.policies_evaluated = 2;
    if (v.lower() > prov.best_lower) {
      prov.witness = "heuristic";
      prov.best_lower = v.lower();
      prov.best_upper = v.upper();
      prov.best_midpoint = v.midpoint();
    }
  }

  if (dual < prov.best_lower) throw std::logic_error("dual upper bound below a certified lower bound");
  const Rat half = (dual - prov.best_lower) / 2;
  if (half > target) {
    throw ApproxBudgetExceeded(plan.count, opts.budget, feasible_k(channel, n, k, opts.budget, half),
                               "approx_value n=" + std::to_string(n) + " k=" + std::to_string(k));
  }
  CertifiedValue out;
  out.estimate = (dual + prov.best_lower) / 2;
  out.radius = half;
  out.horizon = n;
  out.provenance = std::move(prov);
  return out;
}

}  // namespace

NetPlan plan_net(const UnifilarChannel& channel, unsigned n, unsigned k) {
  check_horizon(n);
  const BigInt L = lipschitz_constant(channel, n);
  const std::uint64_t d = policy_dimension(n);
  const Rat target = pow2(-static_cast<long>(k) - 2);
  const unsigned m = k + 2 + kModulusExtraBits;
  NetPlan plan;
  plan.eta_target = Rat(1, 2);
  for (;;) {
    const Rat delta = Rat(L) * plan.eta_target;
    if (delta <= Rat(1, 2) && omega_sum(n, delta, m) <= target) break;
    plan.eta_target /= 2;
  }
  plan.M = ceil_div(Rat(BigInt(static_cast<unsigned long>(d))) / plan.eta_target);
  mpz_pow_ui(plan.count.get_mpz_t(), BigInt(plan.M + 1).get_mpz_t(), d);
  const auto cc = ChannelConditionals::compute(channel, n);
  std::uint64_t relevant = 0;
  for (std::uint64_t i = 0; i < d; ++i) relevant += cc.history_reachable(history_at(i)) ? 1 : 0;
  mpz_pow_ui(plan.evaluated_count.get_mpz_t(), BigInt(plan.M + 1).get_mpz_t(), relevant);
  plan.omega_sum = omega_sum(n, Rat(L) * Rat(BigInt(static_cast<unsigned long>(d))) / Rat(plan.M), m);
  return plan;
}

CertifiedValue approx_value(const ChannelEncoding& e, unsigned n, unsigned k, const SolverOptions& opts) {
  check_horizon(n);
  if (opts.budget == 0) throw std::invalid_argument("policy budget must be positive");
  const UnifilarChannel channel = decode_channel(e);
  const NetPlan plan = plan_net(channel, n, k);
  const unsigned eval_exp = k + 2;
  const Rat dual = dual_upper_bound(channel, n, eval_exp + kDualExtraBits);

  if (plan.evaluated_count > BigInt(static_cast<unsigned long>(opts.budget))) return approx_bracket(channel, n, k, plan, dual, opts);

  const unsigned M = static_cast<unsigned>(plan.M.get_ui());
  const RelevantGrid grid(channel, n, M, opts.budget);
  const ScanResult scan = scan_net(channel, grid, n, eval_exp, opts.workers);

  Provenance prov;
  prov.method = "net";
  prov.M = M;
  prov.eta = grid.eta();
  prov.lipschitz = lipschitz_constant(channel, n);
  prov.delta = Rat(prov.lipschitz) * prov.eta;
  prov.omega_sum = plan.omega_sum;
  prov.eval_exponent = eval_exp;
  prov.policies_evaluated = scan.evaluated;
  prov.argmax_index = scan.lower_index;
  prov.witness = "grid";
  prov.best_lower = scan.best_lower;
  prov.best_upper = scan.best_upper;
  prov.best_midpoint = scan.best_mid;
  prov.dual_upper = dual;
  prov.required_count = plan.count;

  Rat upper = scan.best_upper + plan.omega_sum;
  if (dual < upper) upper = dual;
  if (upper < scan.best_lower) throw std::logic_error("upper bound below a certified lower bound");
  CertifiedValue out;
  out.estimate = (scan.best_lower + upper) / 2;
  out.radius = (upper - scan.best_lower) / 2;
  out.horizon = n;
  out.provenance = std::move(prov);
  return out;
}

CertifiedValue approx_normalized(const ChannelEncoding& e, unsigned n, unsigned k, const SolverOptions& opts) {
  check_horizon(n);
  unsigned floor_log2n = 0;
  while ((2U << floor_log2n) <= n) ++floor_log2n;
  const unsigned kk = k + 1 > floor_log2n ? k + 1 - floor_log2n : 0;
  CertifiedValue v = approx_value(e, n, kk, opts);
  const Rat scaled = v.estimate / n;
  const Rat estimate = floor_dyadic(scaled, k + 2);
  v.radius = ceil_dyadic(v.radius / n + (scaled - estimate), k + 8);
  v.estimate = estimate;
  v.normalized = true;
  return v;
}

CertifiedValue evaluate_net(const UnifilarChannel& channel, unsigned n, unsigned M, unsigned eval_exponent,
                            const SolverOptions& opts) {
  check_horizon(n);
  if (M < 1) throw std::invalid_argument("grid resolution M must be at least 1");
  const RelevantGrid grid(channel, n, M, opts.budget);
  const ScanResult scan = scan_net(channel, grid, n, eval_exponent, opts.workers);

  Provenance prov;
  prov.method = "report-bound";
  prov.M = M;
  prov.eta = grid.eta();
  prov.lipschitz = lipschitz_constant(channel, n);
  prov.delta = Rat(prov.lipschitz) * prov.eta;
  prov.omega_sum = omega_sum(n, prov.delta, eval_exponent + kModulusExtraBits);
  prov.eval_exponent = eval_exponent;
  prov.policies_evaluated = scan.evaluated;
  prov.argmax_index = scan.mid_index;
  prov.witness = "grid";
  prov.best_lower = scan.best_lower;
  prov.best_upper = scan.best_upper;
  prov.best_midpoint = scan.best_mid;
  prov.dual_upper = dual_upper_bound(channel, n, eval_exponent + kDualExtraBits);
  prov.required_count = grid.full_count();

  const Rat w = pow2(-static_cast<long>(eval_exponent));
  Rat radius = prov.omega_sum + 2 * w;
  Rat dual_radius = *prov.dual_upper - scan.best_mid;
  if (dual_radius < w) dual_radius = w;
  if (dual_radius < radius) radius = dual_radius;

  CertifiedValue out;
  out.estimate = scan.best_mid;
  out.radius = radius;
  out.horizon = n;
  out.provenance = std::move(prov);
  return out;
}

std::string recheck(const UnifilarChannel& channel, const CertifiedValue& value) {
  const Provenance& p = value.provenance;
  const unsigned n = value.horizon;
  if (n < 1 || n > kMaxHorizon) return "horizon out of range";
  if (value.radius < 0) return "negative radius";
  if (p.lipschitz != lipschitz_constant(channel, n)) return "Lipschitz constant does not match the channel";

  std::optional<Rat> dual;
  if (p.dual_upper) {
    dual = dual_upper_bound(channel, n, p.eval_exponent + kDualExtraBits);
    if (*dual != *p.dual_upper) return "recorded dual bound does not recompute";
  }
  const Rat w = pow2(-static_cast<long>(p.eval_exponent));
  if (p.best_lower > p.best_upper) return "best lower end exceeds best upper end";

  Rat lo, hi;
  if (p.method == "net" || p.method == "report-bound") {
    if (p.M < 1) return "net method without a grid resolution";
    const Rat eta = Rat(BigInt(static_cast<unsigned long>(policy_dimension(n)))) / p.M;
    if (p.eta != eta) return "eta does not equal d/M";
    if (p.delta != Rat(p.lipschitz) * eta) return "delta does not equal L*eta";
    const Rat omega = omega_sum(n, p.delta, p.eval_exponent + kModulusExtraBits);
    if (p.best_upper - p.best_lower > w) return "enclosure ends are inconsistent with the evaluation width";
    if (p.method == "net") {
      lo = p.best_lower;
      hi = p.best_upper + omega;
      if (dual && *dual < hi) hi = *dual;
    } else {
      Rat radius = omega + 2 * w;
      if (dual) {
        Rat dr = *dual - p.best_midpoint;
        if (dr < w) dr = w;
        if (dr < radius) radius = dr;
      }
      lo = p.best_midpoint - radius;
      hi = p.best_midpoint + radius;
    }
  } else if (p.method == "bracket") {
    if (!dual) return "bracket method without a dual bound";
    lo = p.best_lower;
    hi = *dual;
  } else {
    return "unknown method '" + p.method + "'";
  }
  if (value.normalized) {
    lo /= n;
    hi /= n;
  }
  if (value.low() > lo || value.high() < hi) return "claimed interval is tighter than the provenance supports";
  return "";
}

// ---------------------------------------------------------------------------

std::string format_certified_value(const CertifiedValue& v) {
  const Provenance& p = v.provenance;
  std::ostringstream os;
  os << "horizon=" << v.horizon << " normalized=" << (v.normalized ? 1 : 0) << " estimate=" << to_string(v.estimate)
     << " radius=" << to_string(v.radius) << " method=" << p.method << " M=" << p.M << " eta=" << to_string(p.eta)
     << " delta=" << to_string(p.delta) << " lipschitz=" << to_string(p.lipschitz)
     << " omega_sum=" << to_string(p.omega_sum) << " eval_exponent=" << p.eval_exponent
     << " policies=" << p.policies_evaluated << " argmax=" << p.argmax_index << " witness=" << p.witness
     << " best_lower=" << to_string(p.best_lower) << " best_upper=" << to_string(p.best_upper)
     << " best_midpoint=" << to_string(p.best_midpoint)
     << " dual_upper=" << (p.dual_upper ? to_string(*p.dual_upper) : std::string("none"))
     << " required_count=" << to_string(p.required_count);
  return os.str();
}

CertifiedValue parse_certified_value(std::string_view line) {
  std::map<std::string, std::string, std::less<>> fields;
  std::istringstream is{std::string(line)};
  std::string token;
  while (is >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) throw ParseError("certified value: field '" + token + "' lacks '='");
    if (!fields.emplace(token.substr(0, eq), token.substr(eq + 1)).second) {
      throw ParseError("certified value: duplicate field '" + token.substr(0, eq) + "'");
    }
  }
  auto take = [&](std::string_view key) -> const std::string& {
    const auto it = fields.find(key);
    if (it == fields.end()) throw ParseError("certified value: missing field '" + std::string(key) + "'");
    return it->second;
  };
  auto take_u64 = [&](std::string_view key) -> std::uint64_t {
    const std::string& s = take(key);
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
      throw ParseError("certified value: field '" + std::string(key) + "' is not a natural number");
    }
    return std::stoull(s);
  };
  auto take_int = [&](std::string_view key) {
    BigInt v;
    if (v.set_str(take(key), 10) != 0) throw ParseError("certified value: bad integer in '" + std::string(key) + "'");
    return v;
  };

  CertifiedValue v;
  v.horizon = static_cast<unsigned>(take_u64("horizon"));
  const auto normalized = take_u64("normalized");
  if (normalized > 1) throw ParseError("certified value: normalized must be 0 or 1");
  v.normalized = normalized == 1;
  v.estimate = parse_rat(take("estimate"));
  v.radius = parse_rat(take("radius"));
  Provenance& p = v.provenance;
  p.method = take("method");
  p.M = static_cast<unsigned>(take_u64("M"));
  p.eta = parse_rat(take("eta"));
  p.delta = parse_rat(take("delta"));
  p.lipschitz = take_int("lipschitz");
  p.omega_sum = parse_rat(take("omega_sum"));
  p.eval_exponent = static_cast<unsigned>(take_u64("eval_exponent"));
  p.policies_evaluated = take_u64("policies");
  p.argmax_index = take_u64("argmax");
  p.witness = take("witness");
  p.best_lower = parse_rat(take("best_lower"));
  p.best_upper = parse_rat(take("best_upper"));
  p.best_midpoint = parse_rat(take("best_midpoint"));
  if (const std::string& d = take("dual_upper"); d != "none") p.dual_upper = parse_rat(d);
  p.required_count = take_int("required_count");
  if (fields.size() != 19) throw ParseError("certified value: unexpected extra fields");
  return v;
}

}  // namespace fscap

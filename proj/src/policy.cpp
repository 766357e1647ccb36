#include "fscap/policy.hpp"

#include <limits>
#include <sstream>

namespace fscap {

BudgetExceeded::BudgetExceeded(BigInt required, std::uint64_t budget, const std::string& context)
    : std::runtime_error(context + ": requires " + required.get_str() + " policy evaluations, budget is " +
                         std::to_string(budget)),
      required_(std::move(required)),
      budget_(budget) {}

namespace {

std::uint64_t step_offset(unsigned t) {
  // sum_{u=1}^{t-1} 4^{u-1} = (4^{t-1} - 1) / 3
  return ((std::uint64_t{1} << (2 * (t - 1))) - 1) / 3;
}

void check_horizon(unsigned n) {
  if (n < 1) throw std::invalid_argument("horizon must be >= 1");
  if (n > kMaxHorizon) throw std::invalid_argument("horizon exceeds " + std::to_string(kMaxHorizon));
}

std::string bits_to_string(std::uint32_t bits, unsigned len) {
  if (len == 0) return "-";
  std::string out(len, '0');
  for (unsigned i = 0; i < len; ++i) {
    if ((bits >> (len - 1 - i)) & 1U) out[i] = '1';
  }
  return out;
}

std::uint32_t parse_bits(const std::string& s, unsigned len, std::size_t line_no) {
  if (len == 0) {
    if (s != "-") throw ParseError("line " + std::to_string(line_no) + ": expected '-' for empty history");
    return 0;
  }
  if (s.size() != len || s.find_first_not_of("01") != std::string::npos) {
    throw ParseError("line " + std::to_string(line_no) + ": history '" + s + "' must be " +
                     std::to_string(len) + " bits");
  }
  std::uint32_t bits = 0;
  for (char c : s) bits = (bits << 1) | (c == '1' ? 1U : 0U);
  return bits;
}

}  // namespace

std::uint64_t policy_dimension(unsigned n) {
  check_horizon(n);
  return step_offset(n + 1) * (kInputAlphabet - 1);
}

std::uint64_t policy_dimension(const UnifilarChannel&, unsigned n) { return policy_dimension(n); }

std::uint64_t coordinate_index(const History& h) {
  const unsigned len = h.t - 1;
  return step_offset(h.t) + ((static_cast<std::uint64_t>(h.xbits) << len) | h.ybits);
}

History history_at(std::uint64_t index) {
  unsigned t = 1;
  while (step_offset(t + 1) <= index) ++t;
  const std::uint64_t local = index - step_offset(t);
  const unsigned len = t - 1;
  History h;
  h.t = t;
  h.xbits = static_cast<std::uint32_t>(local >> len);
  h.ybits = static_cast<std::uint32_t>(local & ((std::uint64_t{1} << len) - 1));
  return h;
}

CausalPolicy CausalPolicy::from_coordinates(PolicyCoordinates coords) {
  check_horizon(coords.horizon);
  if (coords.theta.size() != policy_dimension(coords.horizon)) {
    throw std::invalid_argument("policy has " + std::to_string(coords.theta.size()) +
                                " coordinates, horizon " + std::to_string(coords.horizon) + " needs " +
                                std::to_string(policy_dimension(coords.horizon)));
  }
  for (std::size_t i = 0; i < coords.theta.size(); ++i) {
    if (!is_probability(coords.theta[i])) {
      throw std::invalid_argument("policy coordinate " + std::to_string(i) + " = " +
                                  to_string(coords.theta[i]) + " outside [0,1]");
    }
  }
  return CausalPolicy(std::move(coords));
}

Rat CausalPolicy::prob(const History& h, unsigned x) const {
  const Rat& one = prob_one(h);
  return x == 1 ? one : Rat(1 - one);
}

CausalPolicy CausalPolicy::with_coordinate(std::uint64_t index, const Rat& value) const {
  PolicyCoordinates c = coords_;
  c.theta.at(index) = value;
  return from_coordinates(std::move(c));
}

CausalPolicy uniform_policy(unsigned n) {
  return CausalPolicy::from_coordinates({n, std::vector<Rat>(policy_dimension(n), Rat(1, 2))});
}

CausalPolicy deterministic_policy(unsigned n, unsigned x) {
  return CausalPolicy::from_coordinates({n, std::vector<Rat>(policy_dimension(n), Rat(x == 1 ? 1 : 0))});
}

Rat l1_distance(const PolicyCoordinates& a, const PolicyCoordinates& b) {
  if (a.theta.size() != b.theta.size()) {
    throw std::invalid_argument("l1_distance: dimension mismatch (" + std::to_string(a.theta.size()) +
                                " vs " + std::to_string(b.theta.size()) + ")");
  }
  Rat sum(0);
  for (std::size_t i = 0; i < a.theta.size(); ++i) sum += abs(a.theta[i] - b.theta[i]);
  return sum;
}

GridNet GridNet::make(unsigned n, unsigned M) {
  if (M < 1) throw std::invalid_argument("grid resolution must be >= 1");
  GridNet net;
  net.M = M;
  net.dimension = policy_dimension(n);
  net.eta = Rat(BigInt(static_cast<unsigned long>(net.dimension)), BigInt(M));
  net.eta.canonicalize();
  return net;
}

BigInt GridNet::count() const {
  BigInt out;
  mpz_ui_pow_ui(out.get_mpz_t(), M + 1UL, dimension);
  return out;
}

GridEnumerator::GridEnumerator(unsigned n, unsigned M, std::uint64_t budget)
    : n_(n), net_(GridNet::make(n, M)) {
  const BigInt count = net_.count();
  if (count > BigInt(static_cast<unsigned long>(budget))) {
    throw BudgetExceeded(count, budget, "grid n=" + std::to_string(n) + " M=" + std::to_string(M));
  }
  size_ = count.get_ui();
  digits_.assign(net_.dimension, 0);
}

CausalPolicy GridEnumerator::at(std::uint64_t index) const {
  if (index >= size_) throw std::out_of_range("grid index out of range");
  PolicyCoordinates c{n_, std::vector<Rat>(net_.dimension)};
  for (std::size_t i = net_.dimension; i-- > 0;) {
    c.theta[i] = Rat(static_cast<long>(index % (net_.M + 1)), static_cast<long>(net_.M));
    c.theta[i].canonicalize();
    index /= (net_.M + 1);
  }
  return CausalPolicy::from_coordinates(std::move(c));
}

bool GridEnumerator::next(CausalPolicy& out) {
  if (position_ >= size_) return false;
  PolicyCoordinates c{n_, std::vector<Rat>(net_.dimension)};
  for (std::size_t i = 0; i < net_.dimension; ++i) {
    c.theta[i] = Rat(static_cast<long>(digits_[i]), static_cast<long>(net_.M));
    c.theta[i].canonicalize();
  }
  out = CausalPolicy::from_coordinates(std::move(c));
  ++position_;
  for (std::size_t i = net_.dimension; i-- > 0;) {
    if (++digits_[i] <= net_.M) break;
    digits_[i] = 0;
  }
  return true;
}

void GridEnumerator::reset() {
  position_ = 0;
  digits_.assign(net_.dimension, 0);
}

std::uint64_t GridEnumerator::nearest_index(const PolicyCoordinates& coords) const {
  if (coords.theta.size() != net_.dimension) throw std::invalid_argument("nearest_index: dimension mismatch");
  std::uint64_t index = 0;
  for (const Rat& v : coords.theta) {
    // round(v*M) with ties toward zero
    const Rat scaled = v * net_.M;
    BigInt fl;
    mpz_fdiv_q(fl.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
    const Rat frac = scaled - Rat(fl);
    unsigned digit = static_cast<unsigned>(fl.get_ui());
    if (frac > Rat(1, 2)) ++digit;
    index = index * (net_.M + 1) + digit;
  }
  return index;
}

std::string format_policy_text(const CausalPolicy& policy) {
  std::ostringstream os;
  os << "fscpolicy1\n";
  os << "horizon " << policy.horizon() << '\n';
  for (std::uint64_t i = 0; i < policy.dimension(); ++i) {
    const History h = history_at(i);
    os << "p " << h.t << ' ' << bits_to_string(h.xbits, h.t - 1) << ' ' << bits_to_string(h.ybits, h.t - 1)
       << ' ' << to_string(policy.coordinates().theta[i]) << '\n';
  }
  return os.str();
}

CausalPolicy parse_policy_text(std::string_view text) {
  std::istringstream is{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  std::optional<unsigned> horizon;
  std::vector<std::optional<Rat>> theta;
  while (std::getline(is, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (!header) {
      if (tok.size() != 1 || tok[0] != "fscpolicy1") throw ParseError(where + "missing 'fscpolicy1' header");
      header = true;
    } else if (tok[0] == "horizon") {
      if (horizon || tok.size() != 2) throw ParseError(where + "usage: horizon <n>");
      const unsigned n = static_cast<unsigned>(std::stoul(tok[1]));
      check_horizon(n);
      horizon = n;
      theta.assign(policy_dimension(n), std::nullopt);
    } else if (tok[0] == "p") {
      if (!horizon) throw ParseError(where + "'p' before 'horizon'");
      if (tok.size() != 5) throw ParseError(where + "usage: p <t> <x-history> <y-history> <rat>");
      const unsigned t = static_cast<unsigned>(std::stoul(tok[1]));
      if (t < 1 || t > *horizon) throw ParseError(where + "step out of range");
      History h{t, parse_bits(tok[2], t - 1, line_no), parse_bits(tok[3], t - 1, line_no)};
      auto& slot = theta[coordinate_index(h)];
      if (slot) throw ParseError(where + "duplicate coordinate");
      slot = parse_rat(tok[4]);
    } else {
      throw ParseError(where + "unknown keyword '" + tok[0] + "'");
    }
  }
  if (!horizon) throw ParseError("missing 'horizon' line");
  PolicyCoordinates c{*horizon, {}};
  for (std::size_t i = 0; i < theta.size(); ++i) {
    if (!theta[i]) throw ParseError("missing coordinate " + std::to_string(i));
    c.theta.push_back(*theta[i]);
  }
  return CausalPolicy::from_coordinates(std::move(c));
}

}  // namespace fscap

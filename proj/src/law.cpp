#include "fscap/law.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace fscap {

namespace {

unsigned bit_at(std::uint32_t bits, unsigned n, unsigned t) { return (bits >> (n - t)) & 1U; }

// Prefix of length len of an n-bit string.
std::uint32_t prefix(std::uint32_t bits, unsigned n, unsigned len) {
  return len == 0 ? 0 : bits >> (n - len);
}

void unroll(const UnifilarChannel& ch, const CausalPolicy& policy, unsigned n, unsigned t, State s,
            std::uint32_t xbits, std::uint32_t ybits, State s1, const Rat& mass,
            std::map<TrajectoryKey, Rat>& out) {
  if (t > n) {
    out.emplace(TrajectoryKey{s1, xbits, ybits}, mass);
    return;
  }
  const History h{t, xbits, ybits};
  for (unsigned x = 0; x < kInputAlphabet; ++x) {
    const Rat px = policy.prob(h, x);
    if (px == 0) continue;
    for (unsigned y = 0; y < kOutputAlphabet; ++y) {
      const Rat& py = ch.output_prob(s, x, y);
      if (py == 0) continue;
      unroll(ch, policy, n, t + 1, ch.next(s, x, y), (xbits << 1) | x, (ybits << 1) | y, s1,
             mass * px * py, out);
    }
  }
}

}  // namespace

Var Var::parse(std::string_view name) {
  if (name.size() < 2) throw std::invalid_argument("unknown variable '" + std::string(name) + "'");
  Var v;
  switch (name[0]) {
    case 'X': v.kind = Kind::X; break;
    case 'Y': v.kind = Kind::Y; break;
    case 'S': v.kind = Kind::S; break;
    default: throw std::invalid_argument("unknown variable '" + std::string(name) + "'");
  }
  const auto digits = name.substr(1);
  if (digits.find_first_not_of("0123456789") != std::string_view::npos || digits[0] == '0' ||
      digits.size() > 4) {
    throw std::invalid_argument("unknown variable '" + std::string(name) + "'");
  }
  v.t = static_cast<unsigned>(std::stoul(std::string(digits)));
  return v;
}

std::string Var::name() const {
  const char c = kind == Kind::X ? 'X' : kind == Kind::Y ? 'Y' : 'S';
  return c + std::to_string(t);
}

std::vector<State> JointLaw::state_path(const TrajectoryKey& key) const {
  std::vector<State> path{key.s1};
  for (unsigned t = 1; t <= n_; ++t) {
    path.push_back(channel_->next(path.back(), bit_at(key.xbits, n_, t), bit_at(key.ybits, n_, t)));
  }
  return path;
}

std::uint32_t JointLaw::value(const TrajectoryKey& key, const Var& v) const {
  switch (v.kind) {
    case Var::Kind::X: return bit_at(key.xbits, n_, v.t);
    case Var::Kind::Y: return bit_at(key.ybits, n_, v.t);
    case Var::Kind::S: {
      State s = key.s1;
      for (unsigned t = 1; t < v.t; ++t) {
        s = channel_->next(s, bit_at(key.xbits, n_, t), bit_at(key.ybits, n_, t));
      }
      return s;
    }
  }
  return 0;
}

Rat JointLaw::total() const {
  Rat sum(0);
  for (const auto& [key, mass] : entries_) sum += mass;
  return sum;
}

JointLaw induced_joint_law(const UnifilarChannel& channel, const CausalPolicy& policy, unsigned n) {
  if (policy.horizon() != n) {
    throw std::invalid_argument("policy horizon " + std::to_string(policy.horizon()) +
                                " does not match law horizon " + std::to_string(n));
  }
  JointLaw law;
  law.n_ = n;
  law.channel_ = std::make_shared<const UnifilarChannel>(channel);
  for (State s = 0; s < channel.state_count(); ++s) {
    if (channel.initial(s) == 0) continue;
    unroll(channel, policy, n, 1, s, 0, 0, s, channel.initial(s), law.entries_);
  }
  return law;
}

Rat trajectory_probability(const UnifilarChannel& channel, const CausalPolicy& policy,
                           const TrajectoryKey& key) {
  const unsigned n = policy.horizon();
  Rat mass = channel.initial(key.s1);
  State s = key.s1;
  for (unsigned t = 1; t <= n; ++t) {
    const unsigned x = bit_at(key.xbits, n, t);
    const unsigned y = bit_at(key.ybits, n, t);
    mass *= policy.prob(History{t, prefix(key.xbits, n, t - 1), prefix(key.ybits, n, t - 1)}, x);
    mass *= channel.output_prob(s, x, y);
    s = channel.next(s, x, y);
  }
  return mass;
}

Rat Marginal::total() const {
  Rat sum(0);
  for (const auto& [k, v] : entries) sum += v;
  return sum;
}

std::vector<Rat> Marginal::masses() const {
  std::vector<Rat> out;
  out.reserve(entries.size());
  for (const auto& [k, v] : entries) out.push_back(v);
  return out;
}

Marginal marginal(const JointLaw& law, const std::vector<Var>& vars) {
  if (vars.empty()) throw std::invalid_argument("marginal: empty variable list");
  std::set<Var> seen;
  for (const Var& v : vars) {
    const unsigned limit = v.kind == Var::Kind::S ? law.horizon() + 1 : law.horizon();
    if (v.t < 1 || v.t > limit) throw std::invalid_argument("unknown variable '" + v.name() + "'");
    if (!seen.insert(v).second) throw std::invalid_argument("duplicate variable '" + v.name() + "'");
  }
  Marginal m;
  m.vars = vars;
  std::vector<std::uint32_t> assignment(vars.size());
  for (const auto& [key, mass] : law.entries()) {
    for (std::size_t i = 0; i < vars.size(); ++i) assignment[i] = law.value(key, vars[i]);
    m.entries[assignment] += mass;
  }
  return m;
}

Marginal marginal(const JointLaw& law, const std::vector<std::string>& names) {
  std::vector<Var> vars;
  vars.reserve(names.size());
  for (const auto& n : names) vars.push_back(Var::parse(n));
  return marginal(law, vars);
}

Rat l1_law_distance(const JointLaw& a, const JointLaw& b) {
  if (a.horizon() != b.horizon() || a.channel().state_count() != b.channel().state_count()) {
    throw std::invalid_argument("l1_law_distance: laws have different shapes");
  }
  Rat sum(0);
  auto ia = a.entries().begin();
  auto ib = b.entries().begin();
  while (ia != a.entries().end() || ib != b.entries().end()) {
    if (ib == b.entries().end() || (ia != a.entries().end() && ia->first < ib->first)) {
      sum += ia->second;
      ++ia;
    } else if (ia == a.entries().end() || ib->first < ia->first) {
      sum += ib->second;
      ++ib;
    } else {
      sum += abs(ia->second - ib->second);
      ++ia;
      ++ib;
    }
  }
  return sum;
}

BigInt lipschitz_constant(const UnifilarChannel& channel, unsigned n) {
  BigInt xs, ys, ss;
  mpz_ui_pow_ui(xs.get_mpz_t(), kInputAlphabet, n);
  mpz_ui_pow_ui(ys.get_mpz_t(), kOutputAlphabet, n);
  mpz_ui_pow_ui(ss.get_mpz_t(), channel.state_count(), n + 1UL);
  return xs * ys * ss * n;
}

std::string format_law_text(const JointLaw& law) {
  std::ostringstream os;
  const unsigned n = law.horizon();
  for (const auto& [key, mass] : law.entries()) {
    os << key.s1 << ' ';
    for (unsigned t = 1; t <= n; ++t) os << bit_at(key.xbits, n, t);
    os << ' ';
    for (unsigned t = 1; t <= n; ++t) os << bit_at(key.ybits, n, t);
    os << ' ' << to_string(mass) << '\n';
  }
  return os.str();
}

}  // namespace fscap

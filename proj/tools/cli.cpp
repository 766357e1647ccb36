#include "cli.hpp"

#include "fscap/certificate.hpp"
#include "fscap/channel.hpp"
#include "fscap/digest.hpp"
#include "fscap/solver.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <optional>
#include <sstream>

namespace fscap::cli {

namespace {

using json = nlohmann::ordered_json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path);
}

std::optional<std::uint64_t> parse_count(const std::string& text, const std::string& what) {
  if (text.empty()) return std::nullopt;
  if (text.find_first_not_of("0123456789") != std::string::npos || text.size() > 19) {
    throw std::runtime_error(what + " must be a positive integer, got '" + text + "'");
  }
  const std::uint64_t v = std::stoull(text);
  if (v == 0) throw std::runtime_error(what + " must be positive");
  return v;
}

// Budget, workers and seed resolved as flags > environment > config file.
struct Resolved {
  std::uint64_t budget = 200000;
  unsigned workers = 1;
  std::uint64_t seed = 0;
};

struct GlobalFlags {
  std::optional<std::uint64_t> budget;
  std::optional<unsigned> workers;
  std::optional<std::uint64_t> seed;
  std::string config;
  bool json = false;
};

Resolved resolve(const GlobalFlags& flags, const std::map<std::string, std::string>& env) {
  Resolved r;
  if (!flags.config.empty()) {
    const json cfg = json::parse(read_file(flags.config));
    if (!cfg.is_object()) throw std::runtime_error("config file must hold a JSON object");
    if (cfg.contains("budget")) r.budget = cfg.at("budget").get<std::uint64_t>();
    if (cfg.contains("workers")) r.workers = cfg.at("workers").get<unsigned>();
    if (cfg.contains("seed")) r.seed = cfg.at("seed").get<std::uint64_t>();
  }
  if (auto it = env.find("FSCAP_BUDGET"); it != env.end()) {
    if (auto v = parse_count(it->second, "FSCAP_BUDGET")) r.budget = *v;
  }
  if (auto it = env.find("FSCAP_WORKERS"); it != env.end()) {
    if (auto v = parse_count(it->second, "FSCAP_WORKERS")) r.workers = static_cast<unsigned>(*v);
  }
  if (flags.budget) r.budget = *flags.budget;
  if (flags.workers) r.workers = *flags.workers;
  if (flags.seed) r.seed = *flags.seed;
  if (r.budget == 0) throw std::runtime_error("budget must be positive");
  if (r.workers == 0) throw std::runtime_error("workers must be positive");
  return r;
}

// The worker count is deliberately absent so records are identical for any
// degree of parallelism.
json config_record(const Resolved& r) { return json{{"budget", r.budget}, {"seed", r.seed}}; }

json provenance_record(const CertifiedValue& v) {
  const Provenance& p = v.provenance;
  return json{{"method", p.method},
              {"M", p.M},
              {"eta", to_string(p.eta)},
              {"delta", to_string(p.delta)},
              {"lipschitz", to_string(p.lipschitz)},
              {"omega_sum", to_string(p.omega_sum)},
              {"eval_exponent", p.eval_exponent},
              {"policies_evaluated", p.policies_evaluated},
              {"argmax_index", p.argmax_index},
              {"witness", p.witness},
              {"best_lower", to_string(p.best_lower)},
              {"best_upper", to_string(p.best_upper)},
              {"dual_upper", p.dual_upper ? json(to_string(*p.dual_upper)) : json(nullptr)},
              {"required_count", to_string(p.required_count)}};
}

std::string decimal(const Rat& v) {
  std::ostringstream os;
  os.precision(10);
  os << v.get_d();
  return os.str();
}

int cmd_validate(const std::string& path, bool as_json, std::ostream& out) {
  const RawChannel raw = parse_channel_text(read_file(path));
  const ValidationOutcome outcome = validate_channel(raw);
  if (as_json) {
    json violations = json::array();
    for (const auto& v : outcome.report.violations) violations.push_back(v.message);
    json rec{{"command", "validate"}, {"path", path}, {"valid", outcome.report.ok()}, {"violations", violations}};
    if (outcome.channel) rec["channel_sha256"] = encoding_hash(encode_channel(*outcome.channel));
    out << rec.dump() << '\n';
  } else if (outcome.report.ok()) {
    out << "valid: " << outcome.channel->state_count() << " states, encoding sha256 "
        << encoding_hash(encode_channel(*outcome.channel)) << '\n';
  } else {
    out << "invalid:\n" << outcome.report.to_string();
  }
  return outcome.report.ok() ? kOk : kInvalid;
}

int cmd_family(unsigned N, const std::string& variant, const std::string& path, bool as_json, std::ostream& out) {
  const DelayedActivationSpec spec{N, parse_variant(variant)};
  const UnifilarChannel channel = make_delayed_activation(spec);
  write_channel_file(path, channel);
  if (!(read_channel_file(path) == channel)) throw std::runtime_error("written file does not round-trip");
  const std::string hash = encoding_hash(encode_channel(channel));
  if (as_json) {
    out << json{{"command", "family"},
                {"N", N},
                {"variant", to_string(spec.variant)},
                {"states", channel.state_count()},
                {"path", path},
                {"channel_sha256", hash}}
               .dump()
        << '\n';
  } else {
    out << hash << '\n';
  }
  return kOk;
}

struct ValueArgs {
  std::string path;
  unsigned n = 1;
  std::string mode = "heuristic";
  unsigned k = 4;
  unsigned M = 1;
  unsigned eval_exponent = 20;
  bool normalized = false;
  unsigned restarts = 8;
  unsigned iterations = 200;
  std::string policy_out;
};

int cmd_value(const ValueArgs& a, const Resolved& cfg, bool as_json, std::ostream& out) {
  const UnifilarChannel channel = read_channel_file(a.path);
  const ChannelEncoding e = encode_channel(channel);
  json rec{{"command", "value"},
           {"channel_sha256", encoding_hash(e)},
           {"horizon", a.n},
           {"mode", a.mode},
           {"normalized", a.normalized}};
  json settings = config_record(cfg);
  SolverOptions sopts{cfg.budget, cfg.workers, cfg.seed};

  if (a.mode == "heuristic") {
    settings["restarts"] = a.restarts;
    settings["iterations"] = a.iterations;
    rec["config"] = settings;
    HeuristicOptions hopts;
    hopts.restarts = a.restarts;
    hopts.iterations = a.iterations;
    hopts.seed = cfg.seed;
    const HeuristicResult h = heuristic_value(channel, a.n, hopts);
    const Rat value = a.normalized ? Rat(h.value / a.n) : h.value;
    const std::string policy_text = format_policy_text(h.policy);
    if (!a.policy_out.empty()) write_file(a.policy_out, policy_text);
    rec["value"] = to_string(value);
    rec["sweeps"] = h.iterations;
    rec["policy_sha256"] = sha256_hex(policy_text);
    if (as_json) {
      out << rec.dump() << '\n';
    } else {
      out << "heuristic lower estimate " << to_string(value) << " (" << decimal(value) << ")\n";
    }
    return kOk;
  }

  CertifiedValue v;
  if (a.mode == "target") {
    settings["k"] = a.k;
    rec["config"] = settings;
    try {
      v = a.normalized ? approx_normalized(e, a.n, a.k, sopts) : approx_value(e, a.n, a.k, sopts);
    } catch (const ApproxBudgetExceeded& ex) {
      rec["error"] = "budget-exceeded";
      rec["required_count"] = to_string(ex.required());
      rec["feasible_k"] = ex.feasible_k() ? json(*ex.feasible_k()) : json(nullptr);
      if (as_json) {
        out << rec.dump() << '\n';
      } else {
        out << "budget exceeded: " << ex.what() << '\n';
      }
      return kBudget;
    }
  } else if (a.mode == "report-bound") {
    settings["M"] = a.M;
    settings["eval_exponent"] = a.eval_exponent;
    rec["config"] = settings;
    v = evaluate_net(channel, a.n, a.M, a.eval_exponent, sopts);
    if (a.normalized) {
      v.estimate /= a.n;
      v.radius /= a.n;
      v.normalized = true;
    }
  } else {
    throw std::runtime_error("unknown mode '" + a.mode + "'");
  }
  rec["estimate"] = to_string(v.estimate);
  rec["radius"] = to_string(v.radius);
  rec["provenance"] = provenance_record(v);
  if (as_json) {
    out << rec.dump() << '\n';
  } else {
    out << "estimate " << to_string(v.estimate) << " (" << decimal(v.estimate) << ")\n"
        << "radius   " << to_string(v.radius) << " (" << decimal(v.radius) << ")\n"
        << "interval [" << decimal(v.low()) << ", " << decimal(v.high()) << "]\n"
        << "record   " << format_certified_value(v) << '\n';
  }
  return kOk;
}

struct TableArgs {
  std::vector<unsigned> N{1, 2};
  unsigned n_from = 1;
  unsigned n_to = 6;
  unsigned k = 4;
  bool brackets = true;
};

int cmd_table(const TableArgs& a, const Resolved& cfg, bool as_json, std::ostream& out) {
  if (a.n_from < 1 || a.n_to < a.n_from) throw std::runtime_error("need 1 <= n-from <= n-to");
  const SolverOptions sopts{cfg.budget, cfg.workers, cfg.seed};
  auto bracket = [&](const UnifilarChannel& c, unsigned n) -> std::optional<CertifiedValue> {
    if (!a.brackets || n > 8) return std::nullopt;
    try {
      return approx_normalized(encode_channel(c), n, a.k, sopts);
    } catch (const BudgetExceeded&) {
      return std::nullopt;
    }
  };
  auto cell = [](const std::optional<CertifiedValue>& v) {
    return v ? json{{"low", to_string(v->low())}, {"high", to_string(v->high())}} : json(nullptr);
  };
  if (!as_json) out << "N  n   good      bad       same-prefix  good bracket            bad bracket\n";
  for (unsigned N : a.N) {
    if (N < 1) throw std::runtime_error("N must be at least 1");
    const DelayedActivationSpec good{N, Variant::Good}, bad{N, Variant::Bad};
    const UnifilarChannel gc = make_delayed_activation(good), bc = make_delayed_activation(bad);
    for (unsigned n = a.n_from; n <= a.n_to; ++n) {
      const Rat ag = closed_form_normalized_value(good, n), ab = closed_form_normalized_value(bad, n);
      const bool same = n <= N + 1;
      const auto gb = bracket(gc, n), bb = bracket(bc, n);
      if (as_json) {
        out << json{{"command", "table"},
                    {"config", config_record(cfg)},
                    {"N", N},
                    {"n", n},
                    {"good", to_string(ag)},
                    {"bad", to_string(ab)},
                    {"indistinguishable", same},
                    {"good_bracket", cell(gb)},
                    {"bad_bracket", cell(bb)}}
                   .dump()
            << '\n';
        continue;
      }
      auto show = [](const std::optional<CertifiedValue>& v) {
        return v ? "[" + decimal(v->low()) + ", " + decimal(v->high()) + "]" : std::string("-");
      };
      std::ostringstream row;
      row << N << "  " << n << "   " << to_string(ag);
      std::string line = row.str();
      line.resize(std::max<std::size_t>(line.size() + 1, 16), ' ');
      line += to_string(ab);
      line.resize(std::max<std::size_t>(line.size() + 1, 26), ' ');
      line += same ? "yes" : "no";
      line.resize(std::max<std::size_t>(line.size() + 1, 39), ' ');
      line += show(gb);
      line.resize(std::max<std::size_t>(line.size() + 1, 63), ' ');
      line += show(bb);
      out << line << '\n';
    }
  }
  return kOk;
}

struct CertifyArgs {
  std::string channel_path;
  std::string encoding_hex;
  std::string q = "0";
  unsigned k = 0;
  unsigned n_cap = 6;
  unsigned M_cap = 8;
  std::string mode = "target";
  unsigned report_grid = 2;
  std::string out_path;
};

int cmd_certify(const CertifyArgs& a, const Resolved& cfg, bool as_json, std::ostream& out) {
  ChannelEncoding e;
  if (!a.channel_path.empty()) {
    e = encode_channel(read_channel_file(a.channel_path));
  } else if (!a.encoding_hex.empty()) {
    e.bytes = from_hex(a.encoding_hex);
    (void)decode_channel(e);
  } else {
    throw std::runtime_error("certify needs --channel or --encoding");
  }
  const ThresholdQuery query = ThresholdQuery::make(e, parse_rat(a.q));
  CheckOptions opts;
  opts.mode = parse_approx_mode(a.mode);
  opts.solver = SolverOptions{cfg.budget, cfg.workers, cfg.seed};
  opts.report_grid = a.report_grid;
  const SearchResult result = certificate_search(query, a.k, a.n_cap, a.M_cap, opts);

  json settings = config_record(cfg);
  settings["k"] = a.k;
  settings["n_cap"] = a.n_cap;
  settings["M_cap"] = a.M_cap;
  settings["mode"] = a.mode;
  if (opts.mode == ApproxMode::ReportBound) settings["report_grid"] = a.report_grid;
  json rec{{"command", "certify"},
           {"channel_sha256", encoding_hash(e)},
           {"q", to_string(query.q)},
           {"config", settings},
           {"cells_examined", result.examined.size()}};
  json frontier = json::array();
  for (const auto& [n, M] : result.indeterminate) frontier.push_back(json::array({n, M}));
  rec["indeterminate"] = frontier;

  if (result.certificate) {
    const std::string text = format_certificate(*result.certificate);
    if (!a.out_path.empty()) write_file(a.out_path, text);
    rec["status"] = "holds";
    rec["n"] = result.certificate->n;
    rec["M"] = result.certificate->M;
    rec["r"] = to_string(*result.certificate->r);
    rec["certificate_sha256"] = sha256_hex(text);
  } else {
    rec["status"] = "exhausted";
  }
  if (as_json) {
    out << rec.dump() << '\n';
  } else if (result.certificate) {
    out << "holding certificate at n=" << result.certificate->n << " M=" << result.certificate->M
        << " r=" << to_string(*result.certificate->r) << '\n';
    if (!a.out_path.empty()) out << "written to " << a.out_path << '\n';
  } else {
    out << "exhausted after " << result.examined.size() << " cells (" << result.indeterminate.size()
        << " indeterminate); this proves nothing about the threshold\n";
  }
  return result.certificate ? kOk : kExhausted;
}

int cmd_verify(const std::string& cert_path, const std::string& channel_path, const Resolved& cfg, bool as_json,
               std::ostream& out) {
  const std::string text = read_file(cert_path);
  std::optional<UnifilarChannel> channel;
  if (!channel_path.empty()) channel = read_channel_file(channel_path);
  const VerifyResult r =
      verify_certificate(text, channel ? &*channel : nullptr, SolverOptions{cfg.budget, cfg.workers, cfg.seed});
  if (as_json) {
    out << json{{"command", "verify"}, {"path", cert_path}, {"verified", r.ok}, {"reason", r.reason}}.dump() << '\n';
  } else {
    out << (r.ok ? "verified" : "rejected: " + r.reason) << '\n';
  }
  return r.ok ? kOk : kInvalid;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const std::map<std::string, std::string>& env) {
  CLI::App app{"Certified finite-horizon feedback capacity tools", "fscap"};
  app.require_subcommand(1);
  GlobalFlags flags;
  std::uint64_t budget = 0, seed = 0;
  unsigned workers = 0;
  auto* budget_opt = app.add_option("--budget", budget, "Cap on policy evaluations")->check(CLI::PositiveNumber);
  auto* workers_opt = app.add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  auto* seed_opt = app.add_option("--seed", seed, "Seed for the heuristic search");
  app.add_option("--config", flags.config, "JSON config file with budget, workers, seed");
  app.add_flag("--json", flags.json, "Emit one JSON record per line");

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Check a channel file");
  validate->add_option("path", validate_path)->required();

  unsigned family_N = 0;
  std::string family_variant, family_out;
  auto* family = app.add_subcommand("family", "Write a delayed-activation channel file");
  family->add_option("--N", family_N, "Delay length, at least 1")->required()->check(CLI::Range(1u, 1000000u));
  family->add_option("--variant", family_variant)->required()->check(CLI::IsMember({"good", "bad"}));
  family->add_option("--out", family_out)->required();

  ValueArgs va;
  auto* value = app.add_subcommand("value", "Estimate V_n or a_n for a channel file");
  value->add_option("path", va.path)->required();
  value->add_option("-n,--horizon", va.n)->required()->check(CLI::Range(1u, kMaxHorizon));
  value->add_option("--mode", va.mode)->check(CLI::IsMember({"heuristic", "target", "report-bound"}));
  value->add_option("-k", va.k, "Target precision exponent");
  value->add_option("-M", va.M, "Grid resolution for report-bound mode")->check(CLI::PositiveNumber);
  value->add_option("--eval-exponent", va.eval_exponent, "Per-policy enclosure width exponent");
  value->add_flag("--normalized", va.normalized, "Report a_n = V_n / n");
  value->add_option("--restarts", va.restarts);
  value->add_option("--iterations", va.iterations);
  value->add_option("--policy-out", va.policy_out, "Write the heuristic witness policy");

  TableArgs ta;
  auto* table = app.add_subcommand("table", "Closed-form family table with certified brackets");
  table->add_option("--N", ta.N)->delimiter(',');
  table->add_option("--n-from", ta.n_from);
  table->add_option("--n-to", ta.n_to);
  table->add_option("-k", ta.k, "Bracket precision exponent");
  bool no_brackets = false;
  table->add_flag("--no-brackets", no_brackets, "Print closed forms only");

  CertifyArgs ca;
  auto* certify = app.add_subcommand("certify", "Search for a threshold certificate");
  auto* ch = certify->add_option("--channel", ca.channel_path);
  certify->add_option("--encoding", ca.encoding_hex, "Hex channel encoding")->excludes(ch);
  certify->add_option("--q", ca.q)->required();
  certify->add_option("-k", ca.k)->required();
  certify->add_option("--n-cap", ca.n_cap)->check(CLI::Range(1u, kMaxHorizon));
  certify->add_option("--M-cap", ca.M_cap)->check(CLI::PositiveNumber);
  certify->add_option("--mode", ca.mode)->check(CLI::IsMember({"target", "report-bound", "closed-form"}));
  certify->add_option("--report-grid", ca.report_grid)->check(CLI::PositiveNumber);
  certify->add_option("--out", ca.out_path, "Certificate file to write");

  std::string verify_path, verify_channel;
  auto* verify = app.add_subcommand("verify", "Replay a certificate file");
  verify->add_option("path", verify_path)->required();
  verify->add_option("--channel", verify_channel, "Channel file the certificate must match");

  std::vector<std::string> argv_store{"fscap"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }
  if (budget_opt->count() > 0) flags.budget = budget;
  if (workers_opt->count() > 0) flags.workers = workers;
  if (seed_opt->count() > 0) flags.seed = seed;
  ta.brackets = !no_brackets;

  try {
    const Resolved cfg = resolve(flags, env);
    err << "workers: " << cfg.workers << '\n';
    if (*validate) return cmd_validate(validate_path, flags.json, out);
    if (*family) return cmd_family(family_N, family_variant, family_out, flags.json, out);
    if (*value) return cmd_value(va, cfg, flags.json, out);
    if (*table) return cmd_table(ta, cfg, flags.json, out);
    if (*certify) return cmd_certify(ca, cfg, flags.json, out);
    if (*verify) return cmd_verify(verify_path, verify_channel, cfg, flags.json, out);
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kFailure;
  }
  return kFailure;
}

}  // namespace fscap::cli

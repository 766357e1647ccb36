#include "fscap/channel.hpp"

#include <fstream>
#include <sstream>
#include <vector>

namespace fscap {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

[[noreturn]] void fail(std::size_t line_no, const std::string& msg) {
  throw ParseError("line " + std::to_string(line_no) + ": " + msg);
}

unsigned long parse_index(const std::string& tok, std::size_t line_no) {
  if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos || tok.size() > 9) {
    fail(line_no, "expected a nonnegative integer, got '" + tok + "'");
  }
  return std::stoul(tok);
}

unsigned parse_bit(const std::string& tok, std::size_t line_no) {
  if (tok != "0" && tok != "1") fail(line_no, "expected a bit, got '" + tok + "'");
  return tok == "1" ? 1U : 0U;
}

}  // namespace

RawChannel parse_channel_text(std::string_view text) {
  std::istringstream is{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  bool seen_header = false;
  bool seen_init = false;
  std::optional<RawChannel> raw;
  std::vector<bool> kernel_seen;

  while (std::getline(is, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto tok = split_ws(line);
    if (tok.empty()) continue;

    if (!seen_header) {
      if (tok.size() != 1 || tok[0] != "fscv1") fail(line_no, "missing 'fscv1' header");
      seen_header = true;
      continue;
    }
    const std::string& kw = tok[0];
    if (kw == "states") {
      if (raw) fail(line_no, "duplicate 'states' line");
      if (tok.size() != 2) fail(line_no, "usage: states <k>");
      raw = RawChannel::with_states(parse_index(tok[1], line_no));
      kernel_seen.assign(raw->kernel.size(), false);
      continue;
    }
    if (!raw) fail(line_no, "'" + kw + "' before 'states'");
    const std::size_t k = raw->state_count;

    if (kw == "label") {
      if (tok.size() != 3) fail(line_no, "usage: label <s> <name>");
      const auto s = parse_index(tok[1], line_no);
      if (s >= k) fail(line_no, "state " + tok[1] + " out of range");
      raw->labels[s] = tok[2];
    } else if (kw == "init") {
      if (seen_init) fail(line_no, "duplicate 'init' line");
      if (tok.size() != k + 1) {
        fail(line_no, "'init' needs " + std::to_string(k) + " entries, got " + std::to_string(tok.size() - 1));
      }
      for (std::size_t s = 0; s < k; ++s) {
        try {
          raw->initial[s] = parse_rat(tok[s + 1]);
        } catch (const ParseError& e) {
          fail(line_no, e.what());
        }
      }
      seen_init = true;
    } else if (kw == "kernel") {
      if (tok.size() != 5) fail(line_no, "usage: kernel <s> <x> <y> <rat>");
      const auto s = parse_index(tok[1], line_no);
      if (s >= k) fail(line_no, "state " + tok[1] + " out of range");
      const auto idx = table_index(static_cast<State>(s), parse_bit(tok[2], line_no), parse_bit(tok[3], line_no));
      if (kernel_seen[idx]) fail(line_no, "duplicate kernel entry");
      kernel_seen[idx] = true;
      try {
        raw->kernel[idx] = parse_rat(tok[4]);
      } catch (const ParseError& e) {
        fail(line_no, e.what());
      }
    } else if (kw == "update") {
      if (tok.size() != 5) fail(line_no, "usage: update <s> <x> <y> <s'>");
      const auto s = parse_index(tok[1], line_no);
      if (s >= k) fail(line_no, "state " + tok[1] + " out of range");
      const auto idx = table_index(static_cast<State>(s), parse_bit(tok[2], line_no), parse_bit(tok[3], line_no));
      if (raw->update[idx]) fail(line_no, "duplicate update entry");
      // Out-of-range targets are left for validation to report.
      raw->update[idx] = static_cast<State>(parse_index(tok[4], line_no));
    } else {
      fail(line_no, "unknown keyword '" + kw + "'");
    }
  }
  if (!seen_header) throw ParseError("empty channel description");
  if (!raw) throw ParseError("missing 'states' line");
  if (!seen_init) throw ParseError("missing 'init' line");
  return *raw;
}

std::string format_channel_text(const UnifilarChannel& channel) {
  std::ostringstream os;
  const std::size_t k = channel.state_count();
  os << "fscv1\n";
  os << "states " << k << '\n';
  for (std::size_t s = 0; s < k; ++s) {
    if (channel.label(static_cast<State>(s)) != std::to_string(s)) {
      os << "label " << s << ' ' << channel.label(static_cast<State>(s)) << '\n';
    }
  }
  os << "init";
  for (std::size_t s = 0; s < k; ++s) os << ' ' << to_string(channel.initial(static_cast<State>(s)));
  os << '\n';
  for (State s = 0; s < k; ++s) {
    for (unsigned x = 0; x < kInputAlphabet; ++x) {
      for (unsigned y = 0; y < kOutputAlphabet; ++y) {
        const Rat& p = channel.output_prob(s, x, y);
        if (p != 0) os << "kernel " << s << ' ' << x << ' ' << y << ' ' << to_string(p) << '\n';
      }
    }
  }
  for (State s = 0; s < k; ++s) {
    for (unsigned x = 0; x < kInputAlphabet; ++x) {
      for (unsigned y = 0; y < kOutputAlphabet; ++y) {
        os << "update " << s << ' ' << x << ' ' << y << ' ' << channel.next(s, x, y) << '\n';
      }
    }
  }
  return os.str();
}

UnifilarChannel read_channel_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return UnifilarChannel::from_raw(parse_channel_text(buf.str()));
}

void write_channel_file(const std::string& path, const UnifilarChannel& channel) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << format_channel_text(channel);
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace fscap

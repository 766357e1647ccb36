#include <doctest.h>

#include "fixtures.hpp"

#include <cstdio>
#include <fstream>

using namespace fscap;
using fscap::testing::bad;
using fscap::testing::good;

namespace {

// encode(Good(N=2)), frozen at first build.
constexpr const char* kGoldenGood2 =
    "46534345010000000400000001000000010000000100000001000000020000000200000002000000020000000300000003000000"
    "030000000300000003000000030000000300000003000000010100000001010000000000000001010000000101000000010100"
    "000000000000010100000001010000000101000000000000000101000000010100000001010000000000000001010000000101"
    "000000010100000000000000010100000001010000000101000000000000000101000000010100000001010000000000000001"
    "010000000000000001010000000101000000010100000001010000000101000000000000000101000000000000000101000000"
    "000000000101";

RawChannel valid_raw() { return good(1).to_raw(); }

}  // namespace

TEST_CASE("family channels validate") {
  for (unsigned N = 1; N <= 4; ++N) {
    for (Variant v : {Variant::Good, Variant::Bad}) {
      const auto outcome = validate_channel(make_delayed_activation({N, v}).to_raw());
      CHECK(outcome.report.ok());
      CHECK(outcome.channel->state_count() == N + 2);
    }
  }
  CHECK(validate_channel(fscap::testing::identity_channel().to_raw()).report.ok());
}

TEST_CASE("delayed activation kernels and update") {
  const auto g1 = good(1);
  CHECK(g1.state_count() == 3);
  CHECK(g1.output_prob(0, 1, 0) == 1);
  CHECK(g1.label(2) == "*");
  CHECK(bad(1).output_prob(2, 0, 1) == Rat(1, 2));
  const auto g2 = good(2);
  for (unsigned x = 0; x < 2; ++x) {
    for (unsigned y = 0; y < 2; ++y) {
      CHECK(g2.next(2, x, y) == 3);
      CHECK(g2.next(3, x, y) == 3);
      CHECK(g2.next(0, x, y) == 1);
    }
  }
  CHECK(g2.initial(0) == 1);
  CHECK_THROWS_AS(make_delayed_activation({0, Variant::Good}), std::invalid_argument);
}

TEST_CASE("full kernel is stochastic in (y, s')") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const auto c = fscap::testing::random_channel(rng, 1 + trial % 4);
    for (State s = 0; s < c.state_count(); ++s) {
      for (unsigned x = 0; x < 2; ++x) {
        Rat sum(0);
        for (unsigned y = 0; y < 2; ++y) {
          for (State t = 0; t < c.state_count(); ++t) sum += c.full_kernel(s, x, y, t);
        }
        CHECK(sum == 1);
      }
    }
  }
}

TEST_CASE("row-sum violation names the row") {
  RawChannel raw = valid_raw();
  raw.kernel[table_index(1, 0, 0)] = Rat(1, 2);
  raw.kernel[table_index(1, 0, 1)] = Rat(1, 3);
  const auto outcome = validate_channel(raw);
  CHECK_FALSE(outcome.channel.has_value());
  REQUIRE(outcome.report.has(Violation::Kind::NonStochasticRow));
  CHECK(outcome.report.to_string().find("s=1") != std::string::npos);
  CHECK(outcome.report.to_string().find("x=0") != std::string::npos);
}

TEST_CASE("every violation is reported") {
  RawChannel raw = valid_raw();
  raw.update[table_index(0, 1, 1)] = std::nullopt;
  raw.initial = {Rat(1, 2), Rat(0), Rat(0)};
  raw.kernel[table_index(2, 1, 1)] = Rat(3, 2);
  const auto report = validate_channel(raw).report;
  CHECK(report.has(Violation::Kind::PartialUpdate));
  CHECK(report.has(Violation::Kind::InitialNotNormalized));
  CHECK(report.has(Violation::Kind::KernelOutOfRange));
  CHECK_THROWS_AS(UnifilarChannel::from_raw(raw), InvalidChannel);

  RawChannel empty;
  CHECK(validate_channel(empty).report.has(Violation::Kind::EmptyStateSet));
  RawChannel out_of_range = valid_raw();
  out_of_range.update[0] = 7;
  CHECK(validate_channel(out_of_range).report.has(Violation::Kind::UpdateOutOfRange));
}

TEST_CASE("perturbing one kernel entry breaks validation") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    RawChannel raw = fscap::testing::random_channel(rng, 1 + trial % 3).to_raw();
    const std::size_t i = rng() % raw.kernel.size();
    Rat delta(static_cast<long>(1 + rng() % 5), static_cast<long>(2 + rng() % 9));
    delta.canonicalize();
    raw.kernel[i] += (rng() % 2 == 0) ? delta : Rat(-delta);
    CHECK_FALSE(validate_channel(raw).report.ok());
  }
}

TEST_CASE("encoding round trip and canonicality") {
  std::mt19937_64 rng(3);
  std::vector<UnifilarChannel> corpus{good(1), bad(1), good(3), bad(2), fscap::testing::identity_channel()};
  for (int i = 0; i < 20; ++i) corpus.push_back(fscap::testing::random_channel(rng, 1 + i % 5));
  for (const auto& c : corpus) {
    const ChannelEncoding e = encode_channel(c);
    const UnifilarChannel back = decode_channel(e);
    CHECK(back == c);
    CHECK(encode_channel(back) == e);
  }
  CHECK(encode_channel(good(1)) != encode_channel(bad(1)));
}

TEST_CASE("golden encoding of Good(N=2)") {
  const ChannelEncoding e = encode_channel(good(2));
  CHECK(to_hex(e.bytes) == kGoldenGood2);
  CHECK(decode_channel(ChannelEncoding{from_hex(kGoldenGood2)}) == good(2));
}

TEST_CASE("malformed encodings") {
  CHECK_THROWS_AS(decode_channel(ChannelEncoding{}), MalformedEncoding);
  std::vector<std::uint8_t> golden = from_hex(kGoldenGood2);
  for (std::size_t cut : {std::size_t{1}, std::size_t{4}, std::size_t{40}, golden.size() - 1}) {
    std::vector<std::uint8_t> truncated(golden.begin(), golden.begin() + static_cast<std::ptrdiff_t>(cut));
    CAPTURE(cut);
    CHECK_THROWS_AS(decode_channel(ChannelEncoding{truncated}), MalformedEncoding);
  }
  std::vector<std::uint8_t> trailing = golden;
  trailing.push_back(0);
  CHECK_THROWS_AS(decode_channel(ChannelEncoding{trailing}), MalformedEncoding);
  std::vector<std::uint8_t> magic = golden;
  magic[0] = 'X';
  try {
    decode_channel(ChannelEncoding{magic});
    FAIL("expected MalformedEncoding");
  } catch (const MalformedEncoding& ex) {
    CHECK(ex.position() == 0);
  }
}

TEST_CASE("well-formed encoding of an invalid channel delegates to validation") {
  std::vector<std::uint8_t> bytes = encode_channel(good(1)).bytes;
  // First kernel rational starts after magic, version, k and 12 update words.
  const std::size_t kernel0 = 4 + 1 + 4 + 12 * 4;
  // 1/1 -> 1/2: numerator length 1, value 1; denominator length 1, value 2.
  REQUIRE(bytes[kernel0 + 4] == 1);
  REQUIRE(bytes[kernel0 + 9] == 1);
  bytes[kernel0 + 9] = 2;
  CHECK_THROWS_AS(decode_channel(ChannelEncoding{bytes}), InvalidChannel);
}

TEST_CASE("text format round trip") {
  for (const auto& c : {good(2), bad(1), fscap::testing::identity_channel()}) {
    const std::string text = format_channel_text(c);
    const RawChannel raw = parse_channel_text(text);
    const UnifilarChannel back = UnifilarChannel::from_raw(raw);
    CHECK(back == c);
    CHECK(back.labels() == c.labels());
    CHECK(format_channel_text(back) == text);
  }
}

TEST_CASE("text format errors carry line numbers") {
  const std::string missing_update = "fscv1\nstates 1\ninit 1\nkernel 0 0 0 1\nkernel 0 1 1 1\n"
                                     "update 0 0 0 0\nupdate 0 0 1 0\nupdate 0 1 0 0\n";
  const auto outcome = validate_channel(parse_channel_text(missing_update));
  CHECK(outcome.report.has(Violation::Kind::PartialUpdate));
  try {
    parse_channel_text("fscv1\nstates 1\ninit 1\nkernel 0 0 0 1\nkernel 0 0 0 1\n");
    FAIL("expected ParseError");
  } catch (const ParseError& ex) {
    CHECK(std::string(ex.what()).find("line 5") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_channel_text("states 1\n"), ParseError);
  CHECK_THROWS_AS(parse_channel_text("fscv1\nstates 1\ninit 1/0\n"), ParseError);
}

TEST_CASE("channel files") {
  const std::string path = "test_channel_roundtrip.fsc";
  write_channel_file(path, bad(3));
  CHECK(read_channel_file(path) == bad(3));
  std::remove(path.c_str());
  CHECK_THROWS(read_channel_file("does/not/exist.fsc"));
}

TEST_CASE("closed-form values") {
  CHECK(closed_form_normalized_value({1, Variant::Good}, 2) == 0);
  CHECK(closed_form_normalized_value({1, Variant::Good}, 4) == Rat(1, 2));
  CHECK(closed_form_normalized_value({2, Variant::Bad}, 7) == 0);
  CHECK(closed_form_capacity({5, Variant::Good}) == 1);
  CHECK(closed_form_capacity({1, Variant::Bad}) == 0);
  const Rat far = closed_form_normalized_value({1, Variant::Good}, 1000);
  CHECK(far == Rat(499, 500));
  CHECK(1 - far <= Rat(1, 100));
}

TEST_CASE("closed-form properties") {
  for (unsigned N = 1; N <= 6; ++N) {
    Rat prev(0);
    for (unsigned n = 1; n <= 200; ++n) {
      const Rat g = closed_form_normalized_value({N, Variant::Good}, n);
      if (n <= N + 1) {
        CHECK(g == 0);
        CHECK(closed_form_normalized_value({N, Variant::Bad}, n) == 0);
      }
      CHECK(g >= prev);
      CHECK(g < 1);
      prev = g;
    }
  }
}

TEST_CASE("family matcher") {
  CHECK(match_delayed_activation(good(3))->N == 3);
  CHECK(match_delayed_activation(bad(2))->variant == Variant::Bad);
  CHECK_FALSE(match_delayed_activation(fscap::testing::identity_channel()).has_value());
}

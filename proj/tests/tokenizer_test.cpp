#include <doctest.h>

#include <cmath>

#include "recobert/error.hpp"
#include "recobert/tokenizer.hpp"
#include "test_util.hpp"

using namespace recobert;

namespace {
using Tokens = std::vector<std::string>;
}

TEST_CASE("tokenize") {
  CHECK(tokenize("Dry, tannic wine.") == Tokens{"dry", ",", "tannic", "wine", "."});
  CHECK(tokenize("").empty());
  CHECK(tokenize("Vulkà  Bianco") == Tokens{"vulkà", "bianco"});
  CHECK(tokenize("VULKÀ") == Tokens{"vulkà"});
  CHECK(tokenize("off-dry\tsweet\n") == Tokens{"off", "-", "dry", "sweet"});
}

TEST_CASE("build_vocab") {
  SUBCASE("min_freq filters") {
    const std::vector<std::string> corpus = {"a a b", "b c"};
    const Vocabulary v = build_vocab(corpus, 2, 100);
    CHECK(v.size() == 7);
    CHECK(v.id("a") == 5);  // a and b both appear twice; ties break lexicographically
    CHECK(v.id("b") == 6);
    CHECK(v.id("c") == kUnk);
  }
  SUBCASE("cap keeps the most frequent") {
    const std::vector<std::string> corpus = {"b a b c"};
    const Vocabulary v = build_vocab(corpus, 1, 6);
    CHECK(v.size() == 6);
    CHECK(v.token(5) == "b");
  }
  SUBCASE("tie broken lexicographically under the cap") {
    const std::vector<std::string> corpus = {"z y x"};
    CHECK(build_vocab(corpus, 1, 6).token(5) == "x");
  }
  SUBCASE("nothing passes") {
    const std::vector<std::string> corpus = {"x"};
    CHECK_THROWS_AS(build_vocab(corpus, 2, 100), Error);
  }
  SUBCASE("deterministic") {
    const std::vector<std::string> corpus = {"red wine dry", "white wine sweet", "dry red"};
    CHECK(build_vocab(corpus, 1, 100) == build_vocab(corpus, 1, 100));
  }
}

TEST_CASE("vocabulary file round trip and hash") {
  recobert::testing::TempDir dir("vocab");
  const std::vector<std::string> corpus = {"red wine dry", "white wine"};
  const Vocabulary v = build_vocab(corpus, 1, 100);
  v.save(dir / "vocab.txt");
  const std::string bytes = read_file(dir / "vocab.txt");
  CHECK(bytes.rfind("#recobert-vocab v1\n", 0) == 0);
  CHECK(bytes.substr(19, 5) == "wine\n");  // first line after the header is id 5
  const Vocabulary back = Vocabulary::load(dir / "vocab.txt");
  CHECK(back == v);
  CHECK(back.hash() == fnv1a64(bytes));
  CHECK_THROWS_AS(Vocabulary::parse("not a vocab\nx\n"), Error);
}

TEST_CASE("encode_pair layout") {
  const Vocabulary v(std::vector<std::string>{"red", "dry", "wine"});
  const InputSequence s = encode_pair(Tokens{"red"}, Tokens{"dry", "wine"}, v, 8);
  CHECK(s.ids == std::vector<TokenId>{kCls, v.id("red"), kSep, v.id("dry"), v.id("wine"), kPad, kPad, kPad});
  CHECK(s.title_span == Span{1, 2});
  CHECK(s.desc_span == Span{3, 5});
  CHECK(s.segments == std::vector<int>{0, 0, 0, 1, 1, 0, 0, 0});
  CHECK(s.pad_len == 3);

  const InputSequence u = encode_pair(Tokens{"zzz"}, Tokens{"dry"}, v, 8);
  CHECK(u.ids[1] == kUnk);

  CHECK_THROWS_AS(encode_pair(Tokens{}, Tokens{"dry"}, v, 8), Error);
  CHECK_THROWS_AS(encode_pair(Tokens{"red"}, Tokens{}, v, 8), Error);
}

TEST_CASE("encode_pair truncation") {
  const Vocabulary v(std::vector<std::string>{"t", "d"});
  const InputSequence s = encode_pair(Tokens(3, "t"), Tokens(100, "d"), v, 16);
  CHECK(s.desc_span.size() == 16 - (3 + 2));
  CHECK(s.pad_len == 0);

  const InputSequence capped = encode_pair(Tokens(50, "t"), Tokens(5, "d"), v, 64, 32);
  CHECK(capped.title_span.size() == 32);
  CHECK(capped.desc_span.size() == 5);

  // title never crowds out the single description slot
  const InputSequence tight = encode_pair(Tokens(10, "t"), Tokens(10, "d"), v, 4);
  CHECK(tight.title_span.size() == 1);
  CHECK(tight.desc_span.size() == 1);
}

TEST_CASE("encode then decode reproduces in-vocabulary title tokens") {
  const std::vector<std::string> corpus = {"a b c d e f g h"};
  const Vocabulary v = build_vocab(corpus, 1, 100);
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    Tokens title, desc;
    const int nt = 1 + static_cast<int>(rng.below(40));
    const int nd = 1 + static_cast<int>(rng.below(40));
    for (int i = 0; i < nt; ++i) title.push_back(std::string(1, static_cast<char>('a' + rng.below(8))));
    for (int i = 0; i < nd; ++i) desc.push_back(std::string(1, static_cast<char>('a' + rng.below(8))));
    const InputSequence s = encode_pair(title, desc, v, 48);
    Tokens decoded;
    for (int p = s.title_span.begin; p < s.title_span.end; ++p) decoded.push_back(v.token(s.ids[p]));
    CHECK(decoded == Tokens(title.begin(), title.begin() + std::min(nt, kDefaultTitleCap)));
  }
}

TEST_CASE("apply_masking") {
  const Vocabulary v(std::vector<std::string>{"a", "b", "c", "d"});
  const InputSequence s = encode_pair(Tokens{"a", "b"}, Tokens{"c", "d", "a"}, v, 10);
  Rng rng(11);

  SUBCASE("rate zero leaves the sequence alone") {
    const MaskedSequence m = apply_masking(s, {0.0, 0.8, 0.1}, v.size(), rng);
    CHECK(m.targets.empty());
    CHECK(m.base.ids == s.ids);
  }
  SUBCASE("saturation with forced MASK replacement") {
    const MaskedSequence m = apply_masking(s, {1.0, 1.0, 0.0}, v.size(), rng);
    CHECK(m.targets.size() == 5);
    for (const Span& span : {s.title_span, s.desc_span})
      for (int p = span.begin; p < span.end; ++p) CHECK(m.base.ids[p] == kMask);
    for (const auto& t : m.targets) CHECK(t.original == s.ids[t.position]);
  }
  SUBCASE("guaranteed minimum and specials untouched") {
    for (int trial = 0; trial < 500; ++trial) {
      const MaskedSequence m = apply_masking(s, {0.01, 0.8, 0.1}, v.size(), rng);
      CHECK(m.targets.size() >= 1);
      CHECK(m.base.ids[0] == kCls);
      CHECK(m.base.ids[s.title_span.end] == kSep);
      for (int p = s.desc_span.end; p < s.max_len(); ++p) CHECK(m.base.ids[p] == kPad);
      for (const auto& t : m.targets) CHECK((s.title_span.contains(t.position) || s.desc_span.contains(t.position)));
    }
  }
}

TEST_CASE("apply_masking selection rate matches the binomial mean") {
  // 20 content positions at rate 0.15: E[selected] = 3.0. The guaranteed
  // minimum adds P(0 selected) = 0.85^20 ~ 0.0388 to the expectation.
  std::vector<std::string> words;
  for (int i = 0; i < 20; ++i) words.push_back("w" + std::to_string(i));
  const Vocabulary v(words);
  const InputSequence s = encode_pair(Tokens(words.begin(), words.begin() + 5), Tokens(words.begin() + 5, words.end()), v, 24);
  REQUIRE(s.title_span.size() + s.desc_span.size() == 20);
  Rng rng(2024);
  double total = 0;
  int mask_count = 0, random_count = 0, keep_count = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const MaskedSequence m = apply_masking(s, {}, v.size(), rng);
    total += static_cast<double>(m.targets.size());
    for (const auto& t : m.targets) {
      if (m.base.ids[t.position] == kMask) ++mask_count;
      else if (m.base.ids[t.position] == t.original) ++keep_count;
      else ++random_count;
    }
  }
  CHECK(std::abs(total / 10000.0 - 3.0) <= 0.15);
  const double n = mask_count + random_count + keep_count;
  CHECK(std::abs(mask_count / n - 0.8) < 0.02);
  // a random replacement can coincide with the original id (1 in 20)
  CHECK(std::abs((random_count + keep_count) / n - 0.2) < 0.02);
}

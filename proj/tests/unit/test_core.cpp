#include <algorithm>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "scsl/core/io.hpp"
#include "scsl/core/parallel.hpp"
#include "scsl/core/random.hpp"
#include "scsl/core/summation.hpp"
#include "scsl/core/text.hpp"
#include "temp_dir.hpp"

using namespace scsl;

TEST_CASE("tokenize strips edge punctuation and lowercases") {
  CHECK(text::tokenize("DELIGHTED!") == std::vector<std::string>{"delighted"});
  CHECK(text::tokenize("  See Rule 12(b)(6).  ") == std::vector<std::string>{"see", "rule", "12(b)(6"});
  CHECK(text::tokenize("--- ...").empty());
  CHECK(text::tokenize("caf\xc3\xa9, na\xc3\xafve") == std::vector<std::string>{"caf\xc3\xa9", "na\xc3\xafve"});
}

TEST_CASE("whitespace split understands unicode spaces") {
  // U+00A0 no-break space and U+3000 ideographic space
  const auto parts = text::split_whitespace("a\xc2\xa0" "b\xe3\x80\x80" "c\td\n");
  CHECK(parts == std::vector<std::string_view>{"a", "b", "c", "d"});
}

TEST_CASE("code point offsets") {
  const auto offs = text::codepoint_byte_offsets("a\xc3\xa9z");
  CHECK(offs == std::vector<std::size_t>{0, 1, 3, 4});
}

TEST_CASE("derive_seed separates streams") {
  CHECK(derive_seed(7, 0) != derive_seed(7, 1));
  CHECK(derive_seed(7, 1) == derive_seed(7, 1));
  CHECK(derive_seed(7, "j1") != derive_seed(7, "j2"));
}

TEST_CASE("uniform_index stays in range and covers it") {
  Rng rng(3);
  std::vector<int> seen(7, 0);
  for (int i = 0; i < 7000; ++i) ++seen[uniform_index(rng, 7)];
  for (int c : seen) CHECK(c > 800);
}

TEST_CASE("shuffle is a seeded permutation") {
  std::vector<int> a(50);
  std::iota(a.begin(), a.end(), 0);
  auto b = a;
  Rng r1(11), r2(11);
  shuffle(std::span(a), r1);
  shuffle(std::span(b), r2);
  CHECK(a == b);
  std::sort(b.begin(), b.end());
  for (int i = 0; i < 50; ++i) CHECK(b[i] == i);
}

TEST_CASE("compensated summation is order independent") {
  std::vector<double> xs;
  Rng rng(5);
  for (int i = 0; i < 10000; ++i) xs.push_back((uniform_unit(rng) - 0.5) * std::pow(10.0, i % 12));
  const double forward = compensated_sum(xs);
  std::reverse(xs.begin(), xs.end());
  CHECK(compensated_sum(xs) == doctest::Approx(forward).epsilon(1e-15));
  CHECK(compensated_mean(std::vector<double>{0.1, 0.2, 0.3}) == doctest::Approx(0.2));
}

TEST_CASE("parallel_for fills every slot and rethrows") {
  std::vector<int> out(1000, -1);
  parallel_for(out.size(), 8, [&](std::size_t i) { out[i] = static_cast<int>(i) * 2; });
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == static_cast<int>(i) * 2);
  CHECK_THROWS_AS(parallel_for(100, 4, [](std::size_t i) { if (i == 37) throw std::runtime_error("x"); }),
                  std::runtime_error);
}

TEST_CASE("atomic write, CRLF lines and checksums") {
  testing::TempDir dir;
  const auto path = dir / "a.txt";
  io::write_file_atomic(path, "one\r\ntwo\nthree\n");
  CHECK(io::read_lines(path) == std::vector<std::string>{"one", "two", "three"});
  CHECK(!std::filesystem::exists(dir / "a.txt.tmp"));
  CHECK(io::file_checksum(path) == "fnv1a64:" + io::hex64(io::fnv1a64("one\r\ntwo\nthree\n")));
  CHECK(io::fnv1a64("") == 0xcbf29ce484222325ULL);
}

TEST_CASE("csv fields") {
  CHECK(io::split_csv_line("a,\"b,c\",,\"d\"\"e\"") == std::vector<std::string>{"a", "b,c", "", "d\"e"});
}

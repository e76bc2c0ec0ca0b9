#include <doctest.h>

#include <sstream>

#include "coalgene/gene_process.hpp"
#include "coalgene/io.hpp"
#include "coalgene/stats.hpp"
#include "test_helpers.hpp"

using namespace coalgene;
using coalgene::testing::make_matrix;

TEST_CASE("matrix CSV round trip preserves carriers and statistics") {
  Rng rng(7);
  const auto [tree, matrix] =
      simulate_sample(9, ModelParams{.theta = 25.0, .rho = 1.0, .core_size = 3}, rng);
  std::stringstream buffer;
  write_matrix_csv(buffer, matrix, {"provenance example"});
  const PresenceMatrix loaded = read_matrix_csv(buffer);
  REQUIRE(loaded.sample_size() == matrix.sample_size());
  REQUIRE(loaded.gene_count() == matrix.gene_count());
  for (std::size_t g = 0; g < matrix.gene_count(); ++g) {
    for (int i = 0; i < matrix.sample_size(); ++i) {
      CHECK(loaded.carried(g, i) == matrix.carried(g, i));
    }
  }
  const StatReport a = compute_stats(matrix);
  const StatReport b = compute_stats(loaded);
  CHECK(a.average_genes == b.average_genes);
  CHECK(a.pairwise_differences == b.pairwise_differences);
  CHECK(a.incongruence == b.incongruence);
  CHECK(a.pangenome == b.pangenome);
  CHECK(a.spectrum == b.spectrum);
}

TEST_CASE("empty matrix file is a header") {
  const PresenceMatrix empty(4);
  std::stringstream buffer;
  write_matrix_csv(buffer, empty);
  CHECK(buffer.str() == "gene_id,s0,s1,s2,s3\n");
  const PresenceMatrix loaded = read_matrix_csv(buffer);
  CHECK(loaded.sample_size() == 4);
  CHECK(loaded.gene_count() == 0);
}

TEST_CASE("matrix parse errors carry line numbers") {
  const auto expect_error = [](const std::string& text, std::size_t line) {
    std::stringstream in(text);
    try {
      (void)read_matrix_csv(in);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line == line);
    }
  };
  expect_error("not_a_header\n", 1);
  expect_error("gene_id\n", 1);  // no strain columns
  expect_error("gene_id,s0,s1\ng1,1\n", 2);
  expect_error("gene_id,s0,s1\ng1,1,2\n", 2);
  expect_error("gene_id,s0,s1\ng1,1,0\ng1,0,1\n", 3);  // duplicate id
  expect_error("gene_id,s0,s1\ng1,0,0\n", 2);          // no carriers
  expect_error("# only comments\n", 1);
  expect_error("gene_id,s0,s1\n,1,0\n", 2);  // empty id
}

TEST_CASE("comments and blank lines are skipped") {
  std::stringstream in(
      "# produced by hand\n"
      "\n"
      "gene_id,a,b,c\n"
      "# a comment between rows\n"
      "x,1,0,1\n");
  const PresenceMatrix m = read_matrix_csv(in);
  CHECK(m.sample_size() == 3);
  CHECK(m.gene_count() == 1);
  CHECK(m.carried(0, 0));
  CHECK(!m.carried(0, 1));
  CHECK(m.carried(0, 2));
}

TEST_CASE("spectrum TSV round trip, optional header") {
  SpectrumCounts spectrum(4);
  spectrum.counts = {5, 0, 2, 7};
  std::stringstream buffer;
  write_spectrum_tsv(buffer, spectrum);
  CHECK(read_spectrum_tsv(buffer) == spectrum);

  std::stringstream headerless("1\t5\n2\t0\n3\t2\n4\t7\n");
  CHECK(read_spectrum_tsv(headerless) == spectrum);
}

TEST_CASE("spectrum parse errors") {
  const auto expect_error = [](const std::string& text, std::size_t line) {
    std::stringstream in(text);
    try {
      (void)read_spectrum_tsv(in);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line == line);
    }
  };
  expect_error("", 0);
  expect_error("k\tcount\n", 1);          // header only; empty
  expect_error("1\t5\n3\t1\n", 2);        // gap in k
  expect_error("1\t5\n2\t-3\n", 2);       // negative count
  expect_error("1\t5\n2\n", 2);           // missing column
  expect_error("2\t5\n", 1);              // must start at k=1
  expect_error("1\t5\n1\t5\n", 2);        // repeated class
}

TEST_CASE("missing files raise parse errors naming the path") {
  CHECK_THROWS_AS((void)read_matrix_csv(std::filesystem::path("/nonexistent/x.csv")),
                  ParseError);
  CHECK_THROWS_AS((void)read_spectrum_tsv(std::filesystem::path("/nonexistent/s.tsv")),
                  ParseError);
}

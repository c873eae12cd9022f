#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "lngp/csv.hpp"
#include "lngp/rng.hpp"
#include "lngp/timeutil.hpp"

using namespace lngp;

TEST_CASE("rng determinism and substreams") {
  RngStream a(42), b(42), c(43);
  for (int i = 0; i < 200; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
  bool differs = false;
  RngStream a2(42);
  for (int i = 0; i < 10; ++i) differs |= (a2.next_u64() != c.next_u64());
  CHECK(differs);

  std::vector<std::uint64_t> seen;
  for (int i = 0; i < 1000; ++i) seen.push_back(derive_seed(7, i));
  std::sort(seen.begin(), seen.end());
  CHECK(std::adjacent_find(seen.begin(), seen.end()) == seen.end());
  CHECK(derive_seed(7, 3) == derive_seed(7, 3));
  CHECK(derive_seed(7, 3) != derive_seed(8, 3));
}

TEST_CASE("rng moments") {
  RngStream rng(123);
  const int n = 100000;
  std::vector<double> u(n), z(n), g(n);
  for (int i = 0; i < n; ++i) {
    u[i] = rng.uniform();
    z[i] = rng.normal();
    g[i] = rng.gamma(3.7, 2.0);
  }
  for (double v : u) {
    REQUIRE(v >= 0.0);
    REQUIRE(v < 1.0);
  }
  CHECK(std::abs(testutil::mean_of(u) - 0.5) < 5.0 * testutil::se_mean(u));
  CHECK(std::abs(testutil::var_of(u) - 1.0 / 12.0) <
        5.0 * testutil::se_var(u));
  CHECK(std::abs(testutil::mean_of(z)) < 5.0 * testutil::se_mean(z));
  CHECK(std::abs(testutil::var_of(z) - 1.0) < 5.0 * testutil::se_var(z));
  CHECK(std::abs(testutil::mean_of(g) - 7.4) < 5.0 * testutil::se_mean(g));
  CHECK(std::abs(testutil::var_of(g) - 14.8) < 5.0 * testutil::se_var(g));

  // Normal draws against the exact CDF.
  CHECK(testutil::ks_distance(z, [](double x) { return norm_cdf(x); }) <
        0.01);
}

TEST_CASE("rng categorical and integer") {
  RngStream rng(5);
  Vector w(3);
  w << 1.0, 0.0, 3.0;
  std::vector<int> counts(3, 0);
  const int n = 40000;
  for (int i = 0; i < n; ++i) ++counts[rng.categorical(w)];
  CHECK(counts[1] == 0);
  const double p0 = 0.25;
  const double se = std::sqrt(p0 * (1 - p0) / n);
  CHECK(std::abs(counts[0] / static_cast<double>(n) - p0) < 5 * se);

  Vector bad(2);
  bad << 0.0, 0.0;
  CHECK_THROWS_AS(rng.categorical(bad), Error);

  std::vector<int> ic(7, 0);
  for (int i = 0; i < 70000; ++i) ++ic[static_cast<int>(rng.integer(7))];
  for (int k = 0; k < 7; ++k)
    CHECK(std::abs(ic[k] / 70000.0 - 1.0 / 7.0) < 0.01);
}

TEST_CASE("timestamp parsing and formatting") {
  CHECK(parse_timestamp("1970-01-01T00:00:00Z") == 0);
  CHECK(parse_timestamp("1970-01-01 00:00:00") == 0);
  CHECK(parse_timestamp("1970-01-02") == 86400);
  CHECK(parse_timestamp("2020-02-29T00:00:00") == 1582934400);
  CHECK(parse_timestamp("2020-03-01") == 1583020800);
  CHECK(format_timestamp(0) == "1970-01-01T00:00:00Z");
  CHECK(format_timestamp(1583020800) == "2020-03-01T00:00:00Z");

  // Round trips, including negative (pre-epoch) times.
  for (std::int64_t t : {-86400LL, 0LL, 1LL, 951782400LL, 4102444799LL})
    CHECK(parse_timestamp(format_timestamp(t)) == t);

  CHECK_THROWS_AS(parse_timestamp("not a time"), ValidationError);
  CHECK_THROWS_AS(parse_timestamp("2020-13-01"), ValidationError);
  CHECK_THROWS_AS(parse_timestamp("2020-02-30"), ValidationError);
  CHECK_THROWS_AS(parse_timestamp("2020-01-01T25:00:00"), ValidationError);
  CHECK_THROWS_AS(parse_timestamp(""), ValidationError);
}

TEST_CASE("csv round trip and errors") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "lngp_csv_test";
  fs::create_directories(dir);
  const std::string path = (dir / "t.csv").string();

  const std::vector<double> vals = {0.1, -0.0, 1e-308, 1.7976931348623157e308,
                                    12345.678901234567};
  CsvWriter w({"a", "b", "c", "d", "e"});
  w.add_row(vals);
  w.add_row({"x", "y", "z", "u", "v"});
  w.write(path);

  CsvTable t = read_csv(path);
  REQUIRE(t.header.size() == 5);
  REQUIRE(t.rows.size() == 2);
  for (int j = 0; j < 5; ++j) {
    const double back = std::strtod(t.rows[0][j].c_str(), nullptr);
    CHECK(back == vals[j]);
  }
  CHECK(t.column("c") == 2);
  CHECK_THROWS_AS(t.column("nope"), ValidationError);
  CHECK_THROWS_AS(read_csv((dir / "missing.csv").string()), ValidationError);

  // Ragged rows are rejected.
  {
    FILE* f = std::fopen((dir / "ragged.csv").string().c_str(), "w");
    std::fputs("a,b\n1,2\n3\n", f);
    std::fclose(f);
  }
  CHECK_THROWS_AS(read_csv((dir / "ragged.csv").string()), ValidationError);

  // format_double is strtod-exact.
  for (double v : vals)
    CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
  fs::remove_all(dir);
}

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>

#include "mmlbn/dataset.hpp"
#include "mmlbn/error.hpp"

using namespace mmlbn;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::Io;
}

DiscreteDataset random_dataset(std::size_t n, const std::vector<int>& arities, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<int>> rows(n, std::vector<int>(arities.size()));
  for (auto& row : rows)
    for (std::size_t i = 0; i < arities.size(); ++i)
      row[i] = static_cast<int>(rng() % static_cast<std::uint64_t>(arities[i]));
  return DiscreteDataset::from_rows(arities, rows);
}

}  // namespace

TEST_CASE("arity is the number of distinct values") {
  const auto ds = parse_csv("A,B,C\na,x,0\nb,y,1\na,z,0\nb,x,1\n");
  CHECK(ds.num_rows() == 4);
  CHECK(ds.arities() == std::vector<int>{2, 3, 2});
  CHECK(ds.variable(0).name == "A");
  CHECK(ds.variable(1).labels == std::vector<std::string>{"x", "y", "z"});
  CHECK(ds.at(2, 1) == 2);
}

TEST_CASE("categories are indexed in first-appearance order") {
  const auto ds = parse_csv("V,W\nzeta,1\nalpha,0\nzeta,0\n");
  CHECK(ds.variable(0).labels == std::vector<std::string>{"zeta", "alpha"});
  CHECK(ds.variable(1).labels == std::vector<std::string>{"1", "0"});
  CHECK(ds.row(1) == std::vector<int>{1, 1});
}

TEST_CASE("missing cells become an extra category") {
  const auto ds = parse_csv("v1,v2\ny,n\n?,n\nn,y\ny,?\n");
  CHECK(ds.arities() == std::vector<int>{3, 3});
  CHECK(ds.variable(0).labels[1] == "?");
}

TEST_CASE("missing cells are rejected on request") {
  CHECK(code_of([] { parse_csv("a,b\n1,?\n2,3\n", MissingPolicy::Reject); }) ==
        ErrorCode::MissingValue);
}

TEST_CASE("a constant column is degenerate") {
  CHECK(code_of([] { parse_csv("a,b\na,1\na,2\n"); }) == ErrorCode::DegenerateVariable);
}

TEST_CASE("ragged rows are a format error") {
  CHECK(code_of([] { parse_csv("a,b\n1,2\n3\n"); }) == ErrorCode::Format);
}

TEST_CASE("whitespace, CRLF, BOM and blank lines are tolerated") {
  const auto ds = parse_csv("\xEF\xBB\xBFx , y\r\n a ,b\r\n\r\nc, d\r\n");
  CHECK(ds.variable(0).name == "x");
  CHECK(ds.num_rows() == 2);
  CHECK(ds.variable(1).labels == std::vector<std::string>{"b", "d"});
}

TEST_CASE("loading a missing file is an io error") {
  CHECK(code_of([] { load_csv("/nonexistent/dir/none.csv"); }) == ErrorCode::Io);
}

TEST_CASE("load_csv reads a file") {
  const auto path = std::filesystem::temp_directory_path() / "mmlbn_dataset_test.csv";
  {
    std::ofstream f(path);
    f << "p,q\n0,1\n1,1\n1,0\n";
  }
  const auto ds = load_csv(path);
  std::filesystem::remove(path);
  CHECK(ds.num_rows() == 3);
  CHECK(ds.num_vars() == 2);
}

TEST_CASE("split sizes round the test fraction") {
  auto zoo = random_dataset(101, {2, 3}, 1);
  auto [train, test] = split_train_test(zoo, 0.1, 7);
  CHECK(train.num_rows() == 91);
  CHECK(test.num_rows() == 10);

  auto small = random_dataset(10, {2, 2}, 2);
  auto [tr, te] = split_train_test(small, 0.1, 3);
  CHECK(tr.num_rows() == 9);
  CHECK(te.num_rows() == 1);
}

TEST_CASE("split is a deterministic partition") {
  // One column carries the row index so rows can be identified after the split.
  std::vector<std::vector<int>> rows;
  for (int r = 0; r < 50; ++r) rows.push_back({r, r % 2});
  const auto ds = DiscreteDataset::from_rows({50, 2}, rows);
  auto [a1, b1] = split_train_test(ds, 0.2, 11);
  auto [a2, b2] = split_train_test(ds, 0.2, 11);
  std::vector<int> ids;
  for (std::size_t r = 0; r < a1.num_rows(); ++r) {
    CHECK(a1.row(r) == a2.row(r));
    ids.push_back(a1.at(r, 0));
  }
  for (std::size_t r = 0; r < b1.num_rows(); ++r) {
    CHECK(b1.row(r) == b2.row(r));
    ids.push_back(b1.at(r, 0));
  }
  std::sort(ids.begin(), ids.end());
  std::vector<int> expect(50);
  std::iota(expect.begin(), expect.end(), 0);
  CHECK(ids == expect);

  auto [a3, b3] = split_train_test(ds, 0.2, 12);
  bool differs = false;
  for (std::size_t r = 0; r < b1.num_rows(); ++r) differs |= b1.at(r, 0) != b3.at(r, 0);
  CHECK(differs);
}

TEST_CASE("split rejects an empty half") {
  auto ds = random_dataset(4, {2, 2}, 5);
  CHECK(code_of([&] { split_train_test(ds, 0.05, 1); }) == ErrorCode::Argument);
  CHECK(code_of([&] { split_train_test(ds, 0.95, 1); }) == ErrorCode::Argument);
}

TEST_CASE("counts tally child by parent configuration") {
  const auto ds = DiscreteDataset::from_rows({2, 2}, {{0, 0}, {1, 0}, {1, 1}, {1, 1}});
  const std::vector<int> parents{1};
  const auto c = counts_for(ds, 0, parents);
  CHECK(c.count(0, 0) == 1);
  CHECK(c.count(0, 1) == 1);
  CHECK(c.count(1, 0) == 0);
  CHECK(c.count(1, 1) == 2);
  CHECK(c.totals == std::vector<std::uint32_t>{2, 2});
}

TEST_CASE("empty parent set gives the marginal histogram") {
  const auto ds = DiscreteDataset::from_rows({3, 2}, {{0, 0}, {2, 1}, {2, 0}, {1, 1}, {2, 1}});
  const auto c = counts_for(ds, 0, {});
  CHECK(c.num_configs() == 1);
  CHECK(c.counts == std::vector<std::uint32_t>{1, 1, 3});
}

TEST_CASE("configuration encoding is first-parent-most-significant") {
  const auto c = ContingencyCounts::empty(2, {3, 4, 2});
  CHECK(c.num_configs() == 24);
  const std::vector<int> v{2, 1, 1};
  CHECK(c.encode_config(v) == static_cast<std::size_t>(2 * 8 + 1 * 2 + 1));
  for (std::size_t cfg = 0; cfg < c.num_configs(); ++cfg)
    CHECK(c.encode_config(c.decode_config(cfg)) == cfg);
}

TEST_CASE("counts are conserved, order invariant and marginalize to the histogram") {
  const std::vector<int> arities{3, 2, 4, 2};
  auto ds = random_dataset(300, arities, 42);
  std::vector<std::size_t> perm(ds.num_rows());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), std::mt19937_64(9));
  const auto shuffled = ds.select_rows(perm);

  const std::vector<std::vector<int>> parent_sets{{}, {1}, {1, 2}, {3, 2, 1}};
  for (const auto& ps : parent_sets) {
    const auto c = counts_for(ds, 0, ps);
    CHECK(c.num_cases() == ds.num_rows());
    CHECK(c.counts == counts_for(shuffled, 0, ps).counts);
    std::vector<std::uint32_t> hist(3, 0);
    for (std::size_t cfg = 0; cfg < c.num_configs(); ++cfg)
      for (int k = 0; k < 3; ++k) hist[k] += c.count(cfg, k);
    CHECK(hist == counts_for(ds, 0, {}).counts);
  }
}

TEST_CASE("counts reject a child among its parents") {
  auto ds = random_dataset(10, {2, 2}, 1);
  const std::vector<int> ps{0};
  CHECK(code_of([&] { counts_for(ds, 0, ps); }) == ErrorCode::Argument);
  const std::vector<int> bad{7};
  CHECK(code_of([&] { counts_for(ds, 0, bad); }) == ErrorCode::Argument);
}

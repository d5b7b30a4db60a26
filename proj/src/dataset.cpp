#include "mmlbn/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>

#include "mmlbn/error.hpp"

namespace mmlbn {

namespace {

constexpr std::size_t kMaxCountCells = std::size_t{1} << 25;
constexpr int kMaxArity = 65535;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_line(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    cells.emplace_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

}  // namespace

DiscreteDataset::DiscreteDataset(std::shared_ptr<const std::vector<VariableMeta>> variables,
                                 std::vector<std::vector<Value>> columns)
    : variables_(std::move(variables)), columns_(std::move(columns)) {
  if (!variables_ || variables_->size() != columns_.size())
    throw Error(ErrorCode::Argument, "dataset: metadata and column count differ");
  rows_ = columns_.empty() ? 0 : columns_.front().size();
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    const auto& meta = (*variables_)[i];
    if (meta.arity < 2)
      throw Error(ErrorCode::DegenerateVariable,
                  "variable '" + meta.name + "' has fewer than two categories");
    if (columns_[i].size() != rows_)
      throw Error(ErrorCode::Format, "dataset: ragged columns");
    for (Value v : columns_[i])
      if (v >= meta.arity)
        throw Error(ErrorCode::Argument,
                    "variable '" + meta.name + "': value out of range");
  }
}

DiscreteDataset DiscreteDataset::from_rows(const std::vector<int>& arities,
                                           const std::vector<std::vector<int>>& rows,
                                           std::vector<std::string> names) {
  auto vars = std::make_shared<std::vector<VariableMeta>>(arities.size());
  for (std::size_t i = 0; i < arities.size(); ++i) {
    auto& meta = (*vars)[i];
    meta.name = i < names.size() ? names[i] : "X" + std::to_string(i);
    meta.arity = arities[i];
    for (int v = 0; v < arities[i]; ++v) meta.labels.push_back(std::to_string(v));
  }
  std::vector<std::vector<Value>> columns(arities.size());
  for (auto& col : columns) col.reserve(rows.size());
  for (const auto& row : rows) {
    if (row.size() != arities.size())
      throw Error(ErrorCode::Format, "from_rows: row width differs from variable count");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (row[i] < 0 || row[i] >= arities[i])
        throw Error(ErrorCode::Argument, "from_rows: value out of range");
      columns[i].push_back(static_cast<Value>(row[i]));
    }
  }
  return DiscreteDataset(std::move(vars), std::move(columns));
}

std::vector<int> DiscreteDataset::arities() const {
  std::vector<int> out;
  out.reserve(num_vars());
  for (const auto& meta : *variables_) out.push_back(meta.arity);
  return out;
}

std::vector<int> DiscreteDataset::row(std::size_t r) const {
  std::vector<int> out(num_vars());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = columns_[i][r];
  return out;
}

DiscreteDataset DiscreteDataset::select_rows(std::span<const std::size_t> rows) const {
  std::vector<std::vector<Value>> columns(num_vars());
  for (std::size_t i = 0; i < columns.size(); ++i) {
    columns[i].reserve(rows.size());
    for (std::size_t r : rows) columns[i].push_back(columns_[i].at(r));
  }
  return DiscreteDataset(variables_, std::move(columns));
}

std::uint64_t ContingencyCounts::num_cases() const {
  return std::accumulate(totals.begin(), totals.end(), std::uint64_t{0});
}

std::vector<int> ContingencyCounts::decode_config(std::size_t config) const {
  std::vector<int> values(parent_arities.size());
  for (std::size_t i = parent_arities.size(); i-- > 0;) {
    values[i] = static_cast<int>(config % parent_arities[i]);
    config /= parent_arities[i];
  }
  return values;
}

std::size_t ContingencyCounts::encode_config(std::span<const int> parent_values) const {
  std::size_t config = 0;
  for (std::size_t i = 0; i < parent_arities.size(); ++i)
    config = config * parent_arities[i] + parent_values[i];
  return config;
}

ContingencyCounts ContingencyCounts::empty(int child_arity, std::vector<int> parent_arities) {
  std::size_t configs = 1;
  for (int r : parent_arities) {
    if (r < 1) throw Error(ErrorCode::Argument, "counts: arity must be positive");
    if (configs > kMaxCountCells / static_cast<std::size_t>(r))
      throw Error(ErrorCode::Capacity, "counts: too many parent configurations");
    configs *= r;
  }
  if (configs * static_cast<std::size_t>(child_arity) > kMaxCountCells)
    throw Error(ErrorCode::Capacity, "counts: table too large");
  ContingencyCounts c;
  c.child_arity = child_arity;
  c.parent_arities = std::move(parent_arities);
  c.counts.assign(configs * child_arity, 0);
  c.totals.assign(configs, 0);
  return c;
}

DiscreteDataset parse_csv(const std::string& text, MissingPolicy missing_policy,
                          const std::string& source) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (trim(line).empty()) continue;
    header = split_line(line);
  }
  if (header.empty()) throw Error(ErrorCode::Format, source + ": missing header row");

  const std::size_t m = header.size();
  std::vector<std::unordered_map<std::string, Value>> index(m);
  std::vector<std::vector<std::string>> labels(m);
  std::vector<std::vector<Value>> columns(m);

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split_line(line);
    if (cells.size() != m)
      throw Error(ErrorCode::Format, source + ":" + std::to_string(line_no) + ": expected " +
                                         std::to_string(m) + " fields, found " +
                                         std::to_string(cells.size()));
    for (std::size_t i = 0; i < m; ++i) {
      if (cells[i] == "?" && missing_policy == MissingPolicy::Reject)
        throw Error(ErrorCode::MissingValue, source + ":" + std::to_string(line_no) +
                                                 ": missing value in column '" + header[i] + "'");
      auto [it, inserted] = index[i].try_emplace(cells[i], static_cast<Value>(labels[i].size()));
      if (inserted) {
        if (labels[i].size() >= kMaxArity)
          throw Error(ErrorCode::Format, source + ": too many categories in '" + header[i] + "'");
        labels[i].push_back(cells[i]);
      }
      columns[i].push_back(it->second);
    }
  }

  auto vars = std::make_shared<std::vector<VariableMeta>>(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (labels[i].size() < 2)
      throw Error(ErrorCode::DegenerateVariable,
                  source + ": column '" + header[i] + "' has fewer than two distinct values");
    (*vars)[i] = VariableMeta{header[i], static_cast<int>(labels[i].size()), std::move(labels[i])};
  }
  return DiscreteDataset(std::move(vars), std::move(columns));
}

DiscreteDataset load_csv(const std::filesystem::path& path, MissingPolicy missing_policy) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), missing_policy, path.string());
}

std::pair<DiscreteDataset, DiscreteDataset> split_train_test(const DiscreteDataset& ds,
                                                             double test_fraction,
                                                             std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw Error(ErrorCode::Argument, "split: test fraction must lie in (0, 1)");
  const std::size_t n = ds.num_rows();
  const auto test_size = static_cast<std::size_t>(std::llround(n * test_fraction));
  if (test_size < 1 || test_size >= n)
    throw Error(ErrorCode::Argument, "split: both halves must be non-empty");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  // Fisher-Yates with an explicit draw so partitions do not depend on the
  // standard library's shuffle.
  for (std::size_t i = n; i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
  std::vector<std::size_t> test(order.begin(), order.begin() + test_size);
  std::vector<std::size_t> train(order.begin() + test_size, order.end());
  std::sort(test.begin(), test.end());
  std::sort(train.begin(), train.end());
  return {ds.select_rows(train), ds.select_rows(test)};
}

ContingencyCounts counts_for(const DiscreteDataset& ds, std::size_t child,
                             std::span<const int> parents) {
  if (child >= ds.num_vars()) throw Error(ErrorCode::Argument, "counts: child out of range");
  std::vector<int> parent_arities;
  for (int p : parents) {
    if (p < 0 || static_cast<std::size_t>(p) >= ds.num_vars())
      throw Error(ErrorCode::Argument, "counts: parent out of range");
    if (static_cast<std::size_t>(p) == child)
      throw Error(ErrorCode::Argument, "counts: child appears in its own parent set");
    parent_arities.push_back(ds.arity(p));
  }
  auto c = ContingencyCounts::empty(ds.arity(child), std::move(parent_arities));
  auto child_col = ds.column(child);
  std::vector<std::span<const Value>> parent_cols;
  for (int p : parents) parent_cols.push_back(ds.column(p));

  for (std::size_t r = 0; r < ds.num_rows(); ++r) {
    std::size_t config = 0;
    for (std::size_t i = 0; i < parent_cols.size(); ++i)
      config = config * c.parent_arities[i] + parent_cols[i][r];
    ++c.counts[config * c.child_arity + child_col[r]];
    ++c.totals[config];
  }
  return c;
}

}  // namespace mmlbn

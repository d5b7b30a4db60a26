#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mmlbn {

using Value = std::uint16_t;

struct VariableMeta {
  std::string name;
  int arity = 0;
  std::vector<std::string> labels;  // labels[v] names category index v
};

enum class MissingPolicy { ExtraCategory, Reject };

/// Immutable categorical data set, stored column-major. Variable metadata is
/// shared between a data set and any splits derived from it.
class DiscreteDataset {
 public:
  DiscreteDataset(std::shared_ptr<const std::vector<VariableMeta>> variables,
                  std::vector<std::vector<Value>> columns);

  /// Builds a data set from row-major integer data; labels become "0", "1", ...
  static DiscreteDataset from_rows(const std::vector<int>& arities,
                                   const std::vector<std::vector<int>>& rows,
                                   std::vector<std::string> names = {});

  std::size_t num_rows() const noexcept { return rows_; }
  std::size_t num_vars() const noexcept { return columns_.size(); }

  int arity(std::size_t var) const { return (*variables_)[var].arity; }
  std::vector<int> arities() const;
  const VariableMeta& variable(std::size_t var) const { return (*variables_)[var]; }
  const std::vector<VariableMeta>& variables() const noexcept { return *variables_; }
  const std::shared_ptr<const std::vector<VariableMeta>>& shared_variables() const noexcept {
    return variables_;
  }

  std::span<const Value> column(std::size_t var) const { return columns_[var]; }
  Value at(std::size_t row, std::size_t var) const { return columns_[var][row]; }
  std::vector<int> row(std::size_t r) const;

  /// Data set made of the given rows, in the given order.
  DiscreteDataset select_rows(std::span<const std::size_t> rows) const;

 private:
  std::shared_ptr<const std::vector<VariableMeta>> variables_;
  std::vector<std::vector<Value>> columns_;
  std::size_t rows_ = 0;
};

/// Child-by-parent-configuration count table N_{k,pi}. Parent configurations
/// are mixed-radix indices with the first parent most significant.
struct ContingencyCounts {
  int child_arity = 0;
  std::vector<int> parent_arities;
  std::vector<std::uint32_t> counts;  // counts[config * child_arity + k]
  std::vector<std::uint32_t> totals;  // totals[config]

  std::size_t num_configs() const noexcept { return totals.size(); }
  std::uint32_t count(std::size_t config, int k) const {
    return counts[config * static_cast<std::size_t>(child_arity) + k];
  }
  std::uint64_t num_cases() const;

  /// Value of each parent in the given configuration.
  std::vector<int> decode_config(std::size_t config) const;
  std::size_t encode_config(std::span<const int> parent_values) const;

  /// Zero table with the given shape.
  static ContingencyCounts empty(int child_arity, std::vector<int> parent_arities);
};

DiscreteDataset load_csv(const std::filesystem::path& path,
                         MissingPolicy missing_policy = MissingPolicy::ExtraCategory);

/// Parses CSV text; `source` is used in diagnostics only.
DiscreteDataset parse_csv(const std::string& text,
                          MissingPolicy missing_policy = MissingPolicy::ExtraCategory,
                          const std::string& source = "<memory>");

/// Returns (train, test). Test size is round(N * test_fraction).
std::pair<DiscreteDataset, DiscreteDataset> split_train_test(const DiscreteDataset& ds,
                                                             double test_fraction,
                                                             std::uint64_t seed);

ContingencyCounts counts_for(const DiscreteDataset& ds, std::size_t child,
                             std::span<const int> parents);

}  // namespace mmlbn

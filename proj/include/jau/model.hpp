#pragma once

// Core value types shared by every stage of dictionary learning.
//
// Signals and atoms are matrix columns. All types are immutable once
// constructed and can be shared read-only between worker threads.

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace jau {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Training signals Y, one signal per column (p x m).
class SignalSet {
 public:
  explicit SignalSet(Matrix data);

  const Matrix& data() const noexcept { return data_; }
  Index dim() const noexcept { return data_.rows(); }
  Index count() const noexcept { return data_.cols(); }

 private:
  Matrix data_;
};

/// Dictionary D with unit-norm atoms as columns (p x n).
class Dictionary {
 public:
  /// Relative tolerance on |‖d‖ - 1| accepted for every atom.
  static constexpr double kNormTolerance = 1e-12;

  /// Throws ConfigError unless every column is finite and unit norm.
  explicit Dictionary(Matrix atoms);

  /// Normalizes each column; throws ConfigError on a (near) zero column.
  static Dictionary normalized(Matrix atoms);

  const Matrix& atoms() const noexcept { return atoms_; }
  auto atom(Index j) const { return atoms_.col(j); }
  Index dim() const noexcept { return atoms_.rows(); }
  Index size() const noexcept { return atoms_.cols(); }

 private:
  Matrix atoms_;
};

struct SparseEntry {
  Index row;
  double value;

  friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

using SparseColumn = std::vector<SparseEntry>;

/// Column-sparse representation matrix X (n x m) plus the row occupancy
/// index: for each row j, the ordered columns I_j that use atom j.
///
/// Entries live in one flat array (column by column, rows ascending). The
/// row index stores, for row j, the column numbers and the flat positions
/// of its entries, so x_{j,I_j} can be read or replaced without searching.
class SparseCode {
 public:
  SparseCode() = default;

  /// Columns may be unsorted; duplicate rows or out-of-range rows throw
  /// ConfigError. Exact zeros are dropped.
  SparseCode(Index rows, std::vector<SparseColumn> columns);

  static SparseCode zeros(Index rows, Index cols);

  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return static_cast<Index>(column_start_.size()) - 1; }
  Index nonzeros() const noexcept { return static_cast<Index>(entries_.size()); }
  Index max_column_nonzeros() const noexcept;

  std::span<const SparseEntry> column(Index c) const noexcept {
    return {entries_.data() + column_start_[c], entries_.data() + column_start_[c + 1]};
  }
  std::span<const SparseEntry> entries() const noexcept { return entries_; }
  std::span<const Index> column_starts() const noexcept { return column_start_; }

  /// I_j: the ordered columns with a nonzero in row j.
  std::span<const Index> row_columns(Index j) const noexcept {
    return {row_columns_.data() + row_start_[j], row_columns_.data() + row_start_[j + 1]};
  }
  /// Flat positions (into entries()) of the nonzeros of row j, aligned with row_columns(j).
  std::span<const Index> row_positions(Index j) const noexcept {
    return {row_positions_.data() + row_start_[j], row_positions_.data() + row_start_[j + 1]};
  }
  /// x_{j,I_j}
  Vector row_values(Index j) const;

  /// Same sparsity pattern with replaced values (one per entry, in entries()
  /// order). Entries whose new value is exactly zero are removed.
  SparseCode with_values(std::span<const double> values) const;

  Matrix to_dense() const;

  friend bool operator==(const SparseCode& a, const SparseCode& b) {
    return a.rows_ == b.rows_ && a.column_start_ == b.column_start_ && a.entries_ == b.entries_;
  }

 private:
  void build_row_index();

  Index rows_ = 0;
  std::vector<Index> column_start_{0};
  std::vector<SparseEntry> entries_;
  std::vector<Index> row_start_{0};
  std::vector<Index> row_columns_;
  std::vector<Index> row_positions_;
};

enum class Algorithm { kAksvd, kSgk, kNsgk, kMod };

std::string_view to_string(Algorithm algorithm) noexcept;
/// Accepts "aksvd", "sgk", "nsgk", "mod" (case-insensitive); throws ConfigError.
Algorithm parse_algorithm(std::string_view name);

struct LearnerConfig {
  Algorithm algorithm = Algorithm::kSgk;
  /// Atoms per Jacobi group; empty means one group holding every atom.
  /// Ignored by MOD.
  std::optional<Index> group_size;
  Index sparsity = 8;
  Index iterations = 10;
  std::uint64_t seed = 0;
  std::size_t threads = 1;

  /// Throws ConfigError when inconsistent with signal dimension p and atom count n.
  void validate(Index p, Index n) const;
  Index resolved_group_size(Index n) const { return group_size.value_or(n); }
};

struct StageTiming {
  double coding_seconds = 0.0;
  double update_seconds = 0.0;
};

/// Degenerate events seen during one iteration's update stage.
struct IterationEvents {
  Index dead_atoms = 0;
  Index degenerate_updates = 0;
  bool regularized = false;
};

struct RunTrace {
  std::vector<double> rmse;
  std::vector<StageTiming> timing;
  std::vector<IterationEvents> events;
  Dictionary final_dictionary;
  SparseCode final_code;
};

/// E = Y - D X, evaluated column by column over the nonzeros of X.
Matrix residual(const SignalSet& signals, const Dictionary& dictionary, const SparseCode& code);

/// ‖Y - D X‖_F / sqrt(p m).
double rmse(const SignalSet& signals, const Dictionary& dictionary, const SparseCode& code);

/// D X as a dense matrix.
Matrix reconstruct(const Dictionary& dictionary, const SparseCode& code);

}  // namespace jau

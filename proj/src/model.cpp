#include "jau/model.hpp"

#include "jau/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

namespace jau {

namespace {

std::string dims(Index rows, Index cols) {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

void check_conformant(const SignalSet& signals, const Dictionary& dictionary,
                      const SparseCode& code) {
  if (dictionary.dim() != signals.dim() || code.rows() != dictionary.size() ||
      code.cols() != signals.count()) {
    throw ConfigError("dimension mismatch: Y is " + dims(signals.dim(), signals.count()) +
                      ", D is " + dims(dictionary.dim(), dictionary.size()) + ", X is " +
                      dims(code.rows(), code.cols()));
  }
}

}  // namespace

SignalSet::SignalSet(Matrix data) : data_(std::move(data)) {
  if (data_.rows() < 1 || data_.cols() < 1) throw ConfigError("signal set must be non-empty");
  if (!data_.allFinite()) throw ConfigError("signal set contains non-finite entries");
}

Dictionary::Dictionary(Matrix atoms) : atoms_(std::move(atoms)) {
  if (atoms_.rows() < 1 || atoms_.cols() < 1) throw ConfigError("dictionary must be non-empty");
  if (!atoms_.allFinite()) throw ConfigError("dictionary contains non-finite entries");
  for (Index j = 0; j < atoms_.cols(); ++j) {
    const double norm = atoms_.col(j).norm();
    if (std::abs(norm - 1.0) > kNormTolerance) {
      throw ConfigError("atom " + std::to_string(j) + " is not unit norm (norm " +
                        std::to_string(norm) + ")");
    }
  }
}

Dictionary Dictionary::normalized(Matrix atoms) {
  for (Index j = 0; j < atoms.cols(); ++j) {
    const double norm = atoms.col(j).norm();
    if (!(norm > 1e-300) || !std::isfinite(norm)) {
      throw ConfigError("cannot normalize atom " + std::to_string(j));
    }
    atoms.col(j) /= norm;
  }
  return Dictionary(std::move(atoms));
}

SparseCode::SparseCode(Index rows, std::vector<SparseColumn> columns) : rows_(rows) {
  if (rows < 0) throw ConfigError("negative row count");
  column_start_.clear();
  column_start_.reserve(columns.size() + 1);
  column_start_.push_back(0);
  std::size_t total = 0;
  for (const auto& col : columns) total += col.size();
  entries_.reserve(total);
  for (auto& col : columns) {
    std::sort(col.begin(), col.end(),
              [](const SparseEntry& a, const SparseEntry& b) { return a.row < b.row; });
    for (std::size_t k = 0; k < col.size(); ++k) {
      if (col[k].row < 0 || col[k].row >= rows) throw ConfigError("sparse entry row out of range");
      if (k > 0 && col[k].row == col[k - 1].row) throw ConfigError("duplicate sparse entry row");
      if (!std::isfinite(col[k].value)) throw ConfigError("non-finite sparse coefficient");
      if (col[k].value != 0.0) entries_.push_back(col[k]);
    }
    column_start_.push_back(static_cast<Index>(entries_.size()));
  }
  build_row_index();
}

SparseCode SparseCode::zeros(Index rows, Index cols) {
  return SparseCode(rows, std::vector<SparseColumn>(static_cast<std::size_t>(cols)));
}

void SparseCode::build_row_index() {
  row_start_.assign(static_cast<std::size_t>(rows_) + 1, 0);
  for (const auto& e : entries_) ++row_start_[e.row + 1];
  for (Index j = 0; j < rows_; ++j) row_start_[j + 1] += row_start_[j];
  row_columns_.resize(entries_.size());
  row_positions_.resize(entries_.size());
  std::vector<Index> fill(row_start_.begin(), row_start_.end() - 1);
  for (Index c = 0; c < cols(); ++c) {
    for (Index k = column_start_[c]; k < column_start_[c + 1]; ++k) {
      const Index slot = fill[entries_[k].row]++;
      row_columns_[slot] = c;
      row_positions_[slot] = k;
    }
  }
}

Index SparseCode::max_column_nonzeros() const noexcept {
  Index best = 0;
  for (Index c = 0; c < cols(); ++c) best = std::max(best, column_start_[c + 1] - column_start_[c]);
  return best;
}

Vector SparseCode::row_values(Index j) const {
  const auto positions = row_positions(j);
  Vector out(static_cast<Index>(positions.size()));
  for (std::size_t k = 0; k < positions.size(); ++k) out[k] = entries_[positions[k]].value;
  return out;
}

SparseCode SparseCode::with_values(std::span<const double> values) const {
  if (values.size() != entries_.size()) throw ConfigError("value count does not match pattern");
  if (std::none_of(values.begin(), values.end(), [](double v) { return v == 0.0; })) {
    SparseCode out = *this;
    for (std::size_t k = 0; k < values.size(); ++k) {
      if (!std::isfinite(values[k])) throw ConfigError("non-finite sparse coefficient");
      out.entries_[k].value = values[k];
    }
    return out;
  }
  std::vector<SparseColumn> columns(static_cast<std::size_t>(cols()));
  for (Index c = 0; c < cols(); ++c) {
    for (Index k = column_start_[c]; k < column_start_[c + 1]; ++k) {
      columns[c].push_back({entries_[k].row, values[k]});
    }
  }
  return SparseCode(rows_, std::move(columns));
}

Matrix SparseCode::to_dense() const {
  Matrix out = Matrix::Zero(rows_, cols());
  for (Index c = 0; c < cols(); ++c) {
    for (const auto& e : column(c)) out(e.row, c) = e.value;
  }
  return out;
}

std::string_view to_string(Algorithm algorithm) noexcept {
  switch (algorithm) {
    case Algorithm::kAksvd: return "aksvd";
    case Algorithm::kSgk: return "sgk";
    case Algorithm::kNsgk: return "nsgk";
    case Algorithm::kMod: return "mod";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "aksvd" || lower == "ak-svd") return Algorithm::kAksvd;
  if (lower == "sgk") return Algorithm::kSgk;
  if (lower == "nsgk") return Algorithm::kNsgk;
  if (lower == "mod") return Algorithm::kMod;
  throw ConfigError("unknown algorithm '" + std::string(name) + "'");
}

void LearnerConfig::validate(Index p, Index n) const {
  if (sparsity < 1) throw ConfigError("sparsity must be positive");
  if (sparsity > p || sparsity > n) {
    throw ConfigError("sparsity " + std::to_string(sparsity) +
                      " exceeds signal dimension or atom count");
  }
  if (iterations < 0) throw ConfigError("iteration count must be nonnegative");
  if (threads < 1) throw ConfigError("thread count must be positive");
  if (group_size && (*group_size < 1 || *group_size > n)) {
    throw ConfigError("group size must lie in 1.." + std::to_string(n));
  }
}

Matrix residual(const SignalSet& signals, const Dictionary& dictionary, const SparseCode& code) {
  check_conformant(signals, dictionary, code);
  Matrix out = signals.data();
  const Matrix& atoms = dictionary.atoms();
  for (Index c = 0; c < code.cols(); ++c) {
    for (const auto& e : code.column(c)) out.col(c) -= e.value * atoms.col(e.row);
  }
  return out;
}

double rmse(const SignalSet& signals, const Dictionary& dictionary, const SparseCode& code) {
  const Matrix e = residual(signals, dictionary, code);
  return e.norm() / std::sqrt(static_cast<double>(e.rows()) * static_cast<double>(e.cols()));
}

Matrix reconstruct(const Dictionary& dictionary, const SparseCode& code) {
  if (code.rows() != dictionary.size()) throw ConfigError("dimension mismatch between D and X");
  Matrix out = Matrix::Zero(dictionary.dim(), code.cols());
  for (Index c = 0; c < code.cols(); ++c) {
    for (const auto& e : code.column(c)) out.col(c) += e.value * dictionary.atom(e.row);
  }
  return out;
}

}  // namespace jau

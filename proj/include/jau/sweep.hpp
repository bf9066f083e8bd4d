#pragma once

// Jacobi atom-update sweeps.
//
// Atoms are split into consecutive groups of `group_size`. Before each
// group the error E = S - D X is recomputed with the atoms committed so far;
// the atoms of the group are then updated independently from that snapshot
// and committed together. Atom j therefore sees the new value of atom i
// exactly when i lies in an earlier group. group_size = 1 is the classic
// sequential sweep, group_size = n updates every atom from the same error.

#include "jau/model.hpp"

#include <algorithm>
#include <vector>

namespace jau {

class GroupSchedule {
 public:
  /// Throws ConfigError unless 1 <= group_size <= atoms.
  GroupSchedule(Index atoms, Index group_size);

  Index atoms() const noexcept { return atoms_; }
  Index group_size() const noexcept { return group_size_; }
  Index group_count() const noexcept { return (atoms_ + group_size_ - 1) / group_size_; }
  Index group_begin(Index group) const noexcept { return group * group_size_; }
  Index group_end(Index group) const noexcept { return std::min((group + 1) * group_size_, atoms_); }
  Index group_of(Index atom) const noexcept { return atom / group_size_; }

 private:
  Index atoms_;
  Index group_size_;
};

enum class UpdateRule { kSgk, kAksvd, kNsgk };

struct SweepStats {
  Index dead_atoms = 0;
  Index degenerate_updates = 0;
};

struct SweepResult {
  Dictionary dictionary;
  /// The input code, with AK-SVD's refreshed coefficients written back.
  SparseCode code;
  SweepStats stats;
};

/// One full sweep over the atoms.
///
/// `signals` is Y, or the NSGK matrix Z; for NSGK `code` must be the
/// previous iteration's representation. The result is bitwise independent
/// of `threads`.
SweepResult sweep(const Dictionary& dictionary, const Matrix& signals, const SparseCode& code,
                  UpdateRule rule, Index group_size, std::size_t threads = 1);

struct ModResult {
  Dictionary dictionary;
  bool regularized = false;
  Index dead_atoms = 0;
};

/// Y Xᵀ (X Xᵀ)^{-1} before normalization. When X Xᵀ is numerically
/// singular a ridge of 1e-10 trace(X Xᵀ)/n is added and `regularized` set.
Matrix mod_least_squares(const SignalSet& signals, const SparseCode& code, bool* regularized = nullptr);

/// MOD dictionary update: least squares, then unit-norm columns. Columns
/// that vanish (unused atoms) are replaced like dead atoms, from the error
/// of the previous dictionary.
ModResult mod_update(const SignalSet& signals, const SparseCode& code, const Dictionary& previous);

}  // namespace jau

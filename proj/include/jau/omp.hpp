#pragma once

// Orthogonal Matching Pursuit with a fixed sparsity target.
//
// Correlations with the residual are tracked through the Gram matrix
// G = DᵀD (c = Dᵀy - G_S x_S), and the least-squares fit on the support is
// maintained with a Cholesky factor of G_SS grown by one row per round.

#include "jau/model.hpp"

namespace jau {

/// Per-worker scratch space. Reusable across signals: every buffer is
/// reset at the start of each encode.
class OmpWorkspace {
 public:
  OmpWorkspace(Index atoms, Index dim, Index sparsity);

 private:
  friend class OmpCoder;
  Vector correlations_;
  Matrix cholesky_;  // lower-triangular factor of G_SS, sparsity x sparsity
  Vector coefficients_;
  Vector rhs_;
  Vector scratch_;
  Vector residual_;
  std::vector<Index> support_;
  std::vector<char> selected_;
};

/// Stopping tolerances of the greedy loop.
struct OmpTolerances {
  /// Stop once ‖r‖ <= relative_residual * ‖y‖.
  double relative_residual = 1e-12;
  /// Schur complement of a candidate atom below this is treated as singular.
  double pivot = 1e-13;
};

/// Encoder bound to one dictionary; holds the dictionary's Gram matrix.
class OmpCoder {
 public:
  OmpCoder(const Dictionary& dictionary, Index sparsity, OmpTolerances tolerances = {});

  Index sparsity() const noexcept { return sparsity_; }
  const Matrix& gram() const noexcept { return gram_; }

  /// Encodes y given its precomputed correlations Dᵀy. Entries are returned
  /// sorted by atom index. A zero or non-finite signal gives an empty column.
  SparseColumn encode(const Eigen::Ref<const Vector>& signal,
                      const Eigen::Ref<const Vector>& correlations, OmpWorkspace& workspace) const;

  SparseColumn encode(const Eigen::Ref<const Vector>& signal, OmpWorkspace& workspace) const;

  OmpWorkspace make_workspace() const {
    return OmpWorkspace(atoms_->cols(), atoms_->rows(), sparsity_);
  }

 private:
  const Matrix* atoms_;
  Matrix gram_;
  Index sparsity_;
  OmpTolerances tolerances_;
};

/// Encodes one signal with at most `sparsity` atoms.
SparseColumn omp_encode_signal(const Dictionary& dictionary, const Eigen::Ref<const Vector>& signal,
                               Index sparsity);

/// Encodes every column of `signals` independently. The result does not
/// depend on `threads`.
SparseCode omp_encode_set(const Dictionary& dictionary, const SignalSet& signals, Index sparsity,
                          std::size_t threads = 1);

}  // namespace jau

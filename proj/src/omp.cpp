#include "jau/omp.hpp"

#include "jau/errors.hpp"
#include "jau/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace jau {

namespace {

// Signals are processed in fixed blocks so the block-level product Dᵀ Y_b
// is the same computation whatever the thread count.
constexpr Index kBlockSignals = 256;

}  // namespace

OmpWorkspace::OmpWorkspace(Index atoms, Index dim, Index sparsity)
    : correlations_(atoms),
      cholesky_(Matrix::Zero(sparsity, sparsity)),
      coefficients_(sparsity),
      rhs_(sparsity),
      scratch_(sparsity),
      residual_(dim),
      selected_(static_cast<std::size_t>(atoms), 0) {
  support_.reserve(static_cast<std::size_t>(sparsity));
}

OmpCoder::OmpCoder(const Dictionary& dictionary, Index sparsity, OmpTolerances tolerances)
    : atoms_(&dictionary.atoms()), sparsity_(sparsity), tolerances_(tolerances) {
  if (sparsity < 1 || sparsity > dictionary.dim() || sparsity > dictionary.size()) {
    throw ConfigError("OMP sparsity must lie in 1..min(p, n), got " + std::to_string(sparsity));
  }
  gram_.noalias() = dictionary.atoms().transpose() * dictionary.atoms();
}

SparseColumn OmpCoder::encode(const Eigen::Ref<const Vector>& signal, OmpWorkspace& ws) const {
  const Vector correlations = atoms_->transpose() * signal;
  return encode(signal, correlations, ws);
}

SparseColumn OmpCoder::encode(const Eigen::Ref<const Vector>& signal,
                              const Eigen::Ref<const Vector>& correlations,
                              OmpWorkspace& ws) const {
  const Matrix& atoms = *atoms_;
  const Index n = atoms.cols();
  SparseColumn out;

  const double signal_norm = signal.norm();
  if (!(signal_norm > 0.0) || !std::isfinite(signal_norm) || !correlations.allFinite()) return out;
  const double stop_norm = tolerances_.relative_residual * signal_norm;

  ws.support_.clear();
  std::fill(ws.selected_.begin(), ws.selected_.end(), 0);
  ws.correlations_ = correlations;
  ws.residual_ = signal;
  double residual_norm = signal_norm;

  for (Index round = 0; round < sparsity_; ++round) {
    if (residual_norm <= stop_norm) break;

    // Most correlated unselected atom; ties go to the lowest index.
    Index best = -1;
    double best_abs = -1.0;
    for (Index i = 0; i < n; ++i) {
      if (ws.selected_[i]) continue;
      const double a = std::abs(ws.correlations_[i]);
      if (a > best_abs) {
        best_abs = a;
        best = i;
      }
    }
    if (best < 0) break;

    // Grow the Cholesky factor of G_SS: solve L w = G_{S,best}.
    const Index k = round;
    double schur = gram_(best, best);
    for (Index r = 0; r < k; ++r) {
      double acc = gram_(ws.support_[r], best);
      for (Index c = 0; c < r; ++c) acc -= ws.cholesky_(r, c) * ws.scratch_[c];
      ws.scratch_[r] = acc / ws.cholesky_(r, r);
      schur -= ws.scratch_[r] * ws.scratch_[r];
    }
    if (!(schur > tolerances_.pivot)) break;
    for (Index c = 0; c < k; ++c) ws.cholesky_(k, c) = ws.scratch_[c];
    ws.cholesky_(k, k) = std::sqrt(schur);
    ws.support_.push_back(best);
    ws.selected_[best] = 1;

    // Least squares on the support: L Lᵀ x = D_Sᵀ y.
    const Index size = k + 1;
    for (Index r = 0; r < size; ++r) {
      double acc = correlations[ws.support_[r]];
      for (Index c = 0; c < r; ++c) acc -= ws.cholesky_(r, c) * ws.rhs_[c];
      ws.rhs_[r] = acc / ws.cholesky_(r, r);
    }
    for (Index r = size - 1; r >= 0; --r) {
      double acc = ws.rhs_[r];
      for (Index c = r + 1; c < size; ++c) acc -= ws.cholesky_(c, r) * ws.coefficients_[c];
      ws.coefficients_[r] = acc / ws.cholesky_(r, r);
    }

    ws.residual_ = signal;
    ws.correlations_ = correlations;
    for (Index r = 0; r < size; ++r) {
      const Index atom = ws.support_[r];
      const double x = ws.coefficients_[r];
      ws.residual_.noalias() -= x * atoms.col(atom);
      ws.correlations_.noalias() -= x * gram_.col(atom);
    }
    residual_norm = ws.residual_.norm();
  }

  out.reserve(ws.support_.size());
  for (std::size_t r = 0; r < ws.support_.size(); ++r) {
    const double x = ws.coefficients_[static_cast<Index>(r)];
    if (x != 0.0 && std::isfinite(x)) out.push_back({ws.support_[r], x});
  }
  std::sort(out.begin(), out.end(),
            [](const SparseEntry& a, const SparseEntry& b) { return a.row < b.row; });
  return out;
}

SparseColumn omp_encode_signal(const Dictionary& dictionary, const Eigen::Ref<const Vector>& signal,
                               Index sparsity) {
  if (signal.size() != dictionary.dim()) throw ConfigError("signal length does not match dictionary");
  const OmpCoder coder(dictionary, sparsity);
  auto ws = coder.make_workspace();
  return coder.encode(signal, ws);
}

SparseCode omp_encode_set(const Dictionary& dictionary, const SignalSet& signals, Index sparsity,
                          std::size_t threads) {
  if (signals.dim() != dictionary.dim()) throw ConfigError("signal dimension does not match dictionary");
  const OmpCoder coder(dictionary, sparsity);
  const Index m = signals.count();
  const Index blocks = (m + kBlockSignals - 1) / kBlockSignals;
  std::vector<SparseColumn> columns(static_cast<std::size_t>(m));

  parallel_for(threads, blocks, [&](Index first, Index last, std::size_t) {
    auto ws = coder.make_workspace();
    Matrix correlations;
    for (Index b = first; b < last; ++b) {
      const Index start = b * kBlockSignals;
      const Index len = std::min(kBlockSignals, m - start);
      correlations.noalias() = dictionary.atoms().transpose() * signals.data().middleCols(start, len);
      for (Index c = 0; c < len; ++c) {
        columns[start + c] = coder.encode(signals.data().col(start + c), correlations.col(c), ws);
      }
    }
  });
  return SparseCode(dictionary.size(), std::move(columns));
}

}  // namespace jau

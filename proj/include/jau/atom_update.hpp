#pragma once

// Per-atom update rules for the K-SVD family.
//
// An atom update sees only the restricted error F = E_{I_j} + d_j x_{j,I_j}
// and the coefficients x_{j,I_j}; every rule here is a pure function of
// that context, so atoms of one group can be updated concurrently.

#include "jau/model.hpp"

#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace jau {

struct AtomContext {
  Index atom = 0;
  std::vector<Index> columns;  // I_j
  Matrix restricted_error;     // F, p x |I_j|
  Vector coefficients;         // x_{j,I_j}
};

/// Atom j is used by no signal.
struct DeadAtom {
  Index atom = 0;
};

/// Below these energies an update is degenerate and handled as a dead atom.
inline constexpr double kDegenerateEnergy = 1e-30;

/// Builds F from the error E = S - D X in effect for atom j.
std::variant<AtomContext, DeadAtom> build_context(const Matrix& error, const Dictionary& dictionary,
                                                  const SparseCode& code, Index j);

/// Same, from raw parts: the current atom, I_j and x_{j,I_j}.
AtomContext build_context(const Matrix& error, Index j, const Eigen::Ref<const Vector>& atom,
                          std::span<const Index> columns, Vector coefficients);

/// Least-squares atom F xᵀ / (x xᵀ), before normalization. Nullopt when degenerate.
std::optional<Vector> sgk_least_squares(const AtomContext& context);

/// SGK: least-squares atom, normalized. Nullopt when degenerate.
std::optional<Vector> sgk_update(const AtomContext& context);

struct AksvdUpdate {
  Vector atom;
  Vector coefficients;  // new x_{j,I_j} = Fᵀ d
};

/// AK-SVD: one power-method step on F. Nullopt when degenerate.
std::optional<AksvdUpdate> aksvd_update(const AtomContext& context);

/// NSGK signal matrix Z = Y + D X_prev - D X_cur.
Matrix nsgk_signal_matrix(const SignalSet& signals, const Dictionary& dictionary,
                          const SparseCode& previous, const SparseCode& current);

struct ReplacementAtom {
  Vector atom;
  Index signal = 0;  // column of E the atom was taken from
};

/// Replacement for a dead atom: the normalized error column with the largest
/// norm among signals not flagged in `used` (ties to the lowest column).
/// Nullopt when every candidate residual norm is below 1e-12; the caller
/// keeps the old atom.
std::optional<ReplacementAtom> replace_dead_atom(const Matrix& error, const std::vector<char>& used);

}  // namespace jau

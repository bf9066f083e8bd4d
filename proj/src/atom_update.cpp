#include "jau/atom_update.hpp"

#include "jau/errors.hpp"

#include <cmath>

namespace jau {

std::variant<AtomContext, DeadAtom> build_context(const Matrix& error, const Dictionary& dictionary,
                                                  const SparseCode& code, Index j) {
  if (error.rows() != dictionary.dim() || error.cols() != code.cols() ||
      code.rows() != dictionary.size() || j < 0 || j >= dictionary.size()) {
    throw ConfigError("build_context: dimension mismatch");
  }
  const auto columns = code.row_columns(j);
  if (columns.empty()) return DeadAtom{j};
  return build_context(error, j, dictionary.atom(j), columns, code.row_values(j));
}

AtomContext build_context(const Matrix& error, Index j, const Eigen::Ref<const Vector>& atom,
                          std::span<const Index> columns, Vector coefficients) {
  AtomContext ctx;
  ctx.atom = j;
  ctx.columns.assign(columns.begin(), columns.end());
  ctx.restricted_error.resize(error.rows(), static_cast<Index>(columns.size()));
  for (std::size_t k = 0; k < columns.size(); ++k) {
    const auto c = static_cast<Index>(k);
    ctx.restricted_error.col(c) = error.col(columns[k]) + coefficients[c] * atom;
  }
  ctx.coefficients = std::move(coefficients);
  return ctx;
}

std::optional<Vector> sgk_least_squares(const AtomContext& ctx) {
  const double energy = ctx.coefficients.squaredNorm();
  if (!(energy >= kDegenerateEnergy)) return std::nullopt;
  Vector direction = ctx.restricted_error * ctx.coefficients;
  if (!(direction.norm() >= kDegenerateEnergy)) return std::nullopt;
  return Vector(direction / energy);
}

std::optional<Vector> sgk_update(const AtomContext& ctx) {
  auto atom = sgk_least_squares(ctx);
  if (!atom) return std::nullopt;
  atom->normalize();
  return atom;
}

std::optional<AksvdUpdate> aksvd_update(const AtomContext& ctx) {
  if (!(ctx.coefficients.squaredNorm() >= kDegenerateEnergy)) return std::nullopt;
  Vector direction = ctx.restricted_error * ctx.coefficients;
  const double norm = direction.norm();
  if (!(norm >= kDegenerateEnergy)) return std::nullopt;
  AksvdUpdate out;
  out.atom = direction / norm;
  out.coefficients = ctx.restricted_error.transpose() * out.atom;
  return out;
}

Matrix nsgk_signal_matrix(const SignalSet& signals, const Dictionary& dictionary,
                          const SparseCode& previous, const SparseCode& current) {
  if (previous.rows() != current.rows() || previous.cols() != current.cols()) {
    throw ConfigError("nsgk_signal_matrix: previous and current codes differ in shape");
  }
  if (previous.rows() != dictionary.size() || previous.cols() != signals.count() ||
      dictionary.dim() != signals.dim()) {
    throw ConfigError("nsgk_signal_matrix: dimension mismatch");
  }
  Matrix z = signals.data();
  const Matrix& atoms = dictionary.atoms();
  for (Index c = 0; c < z.cols(); ++c) {
    for (const auto& e : previous.column(c)) z.col(c) += e.value * atoms.col(e.row);
    for (const auto& e : current.column(c)) z.col(c) -= e.value * atoms.col(e.row);
  }
  return z;
}

std::optional<ReplacementAtom> replace_dead_atom(const Matrix& error, const std::vector<char>& used) {
  Index best = -1;
  double best_norm2 = -1.0;
  for (Index c = 0; c < error.cols(); ++c) {
    if (static_cast<std::size_t>(c) < used.size() && used[c]) continue;
    const double norm2 = error.col(c).squaredNorm();
    if (norm2 > best_norm2) {
      best_norm2 = norm2;
      best = c;
    }
  }
  if (best < 0 || !(std::sqrt(best_norm2) >= 1e-12)) return std::nullopt;
  return ReplacementAtom{error.col(best) / std::sqrt(best_norm2), best};
}

}  // namespace jau

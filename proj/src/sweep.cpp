#include "jau/sweep.hpp"

#include "jau/atom_update.hpp"
#include "jau/errors.hpp"
#include "jau/parallel.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <optional>
#include <string>

namespace jau {

namespace {

// Below this many items per worker a parallel region runs inline.
constexpr Index kMinColumnsPerWorker = 64;

std::size_t workers_for(std::size_t threads, Index items, Index min_per_worker) {
  const Index cap = std::max<Index>(1, items / min_per_worker);
  return std::min<std::size_t>(threads, static_cast<std::size_t>(cap));
}

struct AtomOutcome {
  std::optional<Vector> atom;
  std::optional<Vector> coefficients;
  bool dead = false;
  bool degenerate = false;
};

// E_c = S_c - sum_k x_{k,c} d_k, accumulated in column-entry order so the
// value of a column never depends on which other columns are evaluated.
void evaluate_error_column(const Matrix& signals, const Matrix& atoms, const SparseCode& code,
                           std::span<const double> values, Index c, Matrix& error) {
  error.col(c) = signals.col(c);
  const auto starts = code.column_starts();
  const auto entries = code.entries();
  for (Index k = starts[c]; k < starts[c + 1]; ++k) {
    error.col(c).noalias() -= values[k] * atoms.col(entries[k].row);
  }
}

}  // namespace

GroupSchedule::GroupSchedule(Index atoms, Index group_size) : atoms_(atoms), group_size_(group_size) {
  if (atoms < 1) throw ConfigError("schedule needs at least one atom");
  if (group_size < 1 || group_size > atoms) {
    throw ConfigError("group size must lie in 1.." + std::to_string(atoms) + ", got " +
                      std::to_string(group_size));
  }
}

SweepResult sweep(const Dictionary& dictionary, const Matrix& signals, const SparseCode& code,
                  UpdateRule rule, Index group_size, std::size_t threads) {
  const Index p = dictionary.dim();
  const Index n = dictionary.size();
  const Index m = signals.cols();
  if (signals.rows() != p || code.rows() != n || code.cols() != m) {
    throw ConfigError("sweep: dimension mismatch");
  }
  const GroupSchedule schedule(n, group_size);
  threads = std::max<std::size_t>(threads, 1);

  Matrix atoms = dictionary.atoms();
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(code.nonzeros()));
  for (const auto& e : code.entries()) values.push_back(e.value);

  Matrix error(p, m);
  std::vector<Index> stamp(static_cast<std::size_t>(m), -1);
  std::vector<Index> pending;
  std::vector<char> used_signals(static_cast<std::size_t>(m), 0);
  std::vector<AtomOutcome> outcomes;
  SweepStats stats;

  auto evaluate = [&](Index group) {
    parallel_for(workers_for(threads, static_cast<Index>(pending.size()), kMinColumnsPerWorker),
                 static_cast<Index>(pending.size()), [&](Index first, Index last, std::size_t) {
                   for (Index k = first; k < last; ++k) {
                     evaluate_error_column(signals, atoms, code, values, pending[k], error);
                   }
                 });
    for (Index c : pending) stamp[c] = group;
    pending.clear();
  };

  for (Index group = 0; group < schedule.group_count(); ++group) {
    const Index first_atom = schedule.group_begin(group);
    const Index group_atoms = schedule.group_end(group) - first_atom;

    // Only the columns some atom of this group uses are needed for F.
    for (Index j = first_atom; j < first_atom + group_atoms; ++j) {
      for (Index c : code.row_columns(j)) {
        if (stamp[c] != group) {
          stamp[c] = group;
          pending.push_back(c);
        }
      }
    }
    evaluate(group);

    outcomes.assign(static_cast<std::size_t>(group_atoms), AtomOutcome{});
    parallel_for(threads, group_atoms, [&](Index first, Index last, std::size_t) {
      for (Index k = first; k < last; ++k) {
        const Index j = first_atom + k;
        AtomOutcome& out = outcomes[k];
        const auto columns = code.row_columns(j);
        if (columns.empty()) {
          out.dead = true;
          continue;
        }
        const auto positions = code.row_positions(j);
        Vector x(static_cast<Index>(positions.size()));
        for (std::size_t t = 0; t < positions.size(); ++t) x[static_cast<Index>(t)] = values[positions[t]];
        const AtomContext ctx = build_context(error, j, atoms.col(j), columns, std::move(x));
        if (rule == UpdateRule::kAksvd) {
          if (auto upd = aksvd_update(ctx)) {
            out.atom = std::move(upd->atom);
            out.coefficients = std::move(upd->coefficients);
          } else {
            out.degenerate = true;
          }
        } else {
          out.atom = sgk_update(ctx);
          out.degenerate = !out.atom.has_value();
        }
      }
    });

    const bool needs_replacement = std::any_of(outcomes.begin(), outcomes.end(),
                                               [](const AtomOutcome& o) { return o.dead || o.degenerate; });
    if (needs_replacement) {
      // Replacement compares residuals of every signal at the group snapshot.
      for (Index c = 0; c < m; ++c) {
        if (stamp[c] != group) pending.push_back(c);
      }
      evaluate(group);
      for (Index k = 0; k < group_atoms; ++k) {
        AtomOutcome& out = outcomes[k];
        if (!out.dead && !out.degenerate) continue;
        if (out.dead) ++stats.dead_atoms;
        if (out.degenerate) ++stats.degenerate_updates;
        if (auto rep = replace_dead_atom(error, used_signals)) {
          used_signals[rep->signal] = 1;
          out.atom = std::move(rep->atom);
        }
      }
    }

    for (Index k = 0; k < group_atoms; ++k) {
      const Index j = first_atom + k;
      AtomOutcome& out = outcomes[k];
      if (out.atom) atoms.col(j) = *out.atom;
      if (out.coefficients) {
        const auto positions = code.row_positions(j);
        for (std::size_t t = 0; t < positions.size(); ++t) {
          values[positions[t]] = (*out.coefficients)[static_cast<Index>(t)];
        }
      }
    }
  }

  SparseCode updated = rule == UpdateRule::kAksvd ? code.with_values(values) : code;
  return SweepResult{Dictionary(std::move(atoms)), std::move(updated), stats};
}

Matrix mod_least_squares(const SignalSet& signals, const SparseCode& code, bool* regularized) {
  const Index n = code.rows();
  if (code.cols() != signals.count()) throw ConfigError("mod: dimension mismatch");
  Matrix gram = Matrix::Zero(n, n);
  Matrix cross = Matrix::Zero(signals.dim(), n);
  for (Index c = 0; c < code.cols(); ++c) {
    const auto col = code.column(c);
    for (const auto& a : col) {
      cross.col(a.row) += a.value * signals.data().col(c);
      for (const auto& b : col) gram(a.row, b.row) += a.value * b.value;
    }
  }
  if (regularized) *regularized = false;
  const double trace = gram.trace();
  if (!(trace > 0.0)) return Matrix::Zero(signals.dim(), n);

  Eigen::LLT<Matrix> llt(gram);
  if (llt.info() != Eigen::Success || !(llt.rcond() >= 1e-12)) {
    gram.diagonal().array() += 1e-10 * trace / static_cast<double>(n);
    llt.compute(gram);
    if (regularized) *regularized = true;
  }
  // D G = Y Xᵀ with G symmetric.
  return llt.solve(cross.transpose()).transpose();
}

ModResult mod_update(const SignalSet& signals, const SparseCode& code, const Dictionary& previous) {
  if (previous.size() != code.rows() || previous.dim() != signals.dim()) {
    throw ConfigError("mod: dimension mismatch");
  }
  bool regularized = false;
  Matrix atoms = mod_least_squares(signals, code, &regularized);
  ModResult result{previous, regularized, 0};

  std::optional<Matrix> error;
  std::vector<char> used(static_cast<std::size_t>(signals.count()), 0);
  for (Index j = 0; j < atoms.cols(); ++j) {
    const double norm = atoms.col(j).norm();
    if (norm >= 1e-12 && std::isfinite(norm)) {
      atoms.col(j) /= norm;
      continue;
    }
    ++result.dead_atoms;
    if (!error) error = residual(signals, previous, code);
    if (auto rep = replace_dead_atom(*error, used)) {
      used[rep->signal] = 1;
      atoms.col(j) = rep->atom;
    } else {
      atoms.col(j) = previous.atom(j);
    }
  }
  result.dictionary = Dictionary(std::move(atoms));
  return result;
}

}  // namespace jau

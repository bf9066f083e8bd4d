#include "jau/atom_update.hpp"
#include "jau/omp.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <variant>

using namespace jau;

namespace {

struct Instance {
  Matrix y;
  Dictionary d;
  SparseCode x;
  Matrix e;
};

Instance make_instance(Index p, Index n, Index m, Index s, std::uint64_t seed) {
  Matrix y = oracle::gaussian(p, m, seed);
  Dictionary d = Dictionary::normalized(oracle::gaussian(p, n, seed + 1));
  SparseCode x = oracle::random_code(n, m, s, seed + 2);
  Matrix e = y - d.atoms() * x.to_dense();
  return {std::move(y), std::move(d), std::move(x), std::move(e)};
}

}  // namespace

TEST_SUITE("atom_update") {
  TEST_CASE("an unused atom is reported dead") {
    const Dictionary d = Dictionary::normalized(oracle::gaussian(3, 4, 1));
    const SparseCode x(4, {{{0, 1.0}}, {{2, 1.0}}});
    const Matrix e = Matrix::Zero(3, 2);
    const auto ctx = build_context(e, d, x, 1);
    REQUIRE(std::holds_alternative<DeadAtom>(ctx));
    CHECK(std::get<DeadAtom>(ctx).atom == 1);
  }

  TEST_CASE("with zero error the restricted error is d_j x_j") {
    const Dictionary d = Dictionary::normalized(oracle::gaussian(4, 5, 2));
    const SparseCode x(5, {{{1, 2.0}}, {{0, 1.0}}, {{1, -3.0}, {3, 1.0}}});
    const auto ctx = std::get<AtomContext>(build_context(Matrix::Zero(4, 3), d, x, 1));
    REQUIRE(ctx.columns == std::vector<Index>{0, 2});
    const Matrix expected = d.atom(1) * ctx.coefficients.transpose();
    CHECK((ctx.restricted_error - expected).cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("restricted error matches the leave-one-out oracle") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const Instance in = make_instance(6, 12, 40, 3, 100 * seed);
      const Matrix dense = in.x.to_dense();
      for (Index j = 0; j < 12; ++j) {
        const auto ctx = build_context(in.e, in.d, in.x, j);
        if (std::holds_alternative<DeadAtom>(ctx)) continue;
        const Matrix f = oracle::leave_one_out_error(in.y, in.d.atoms(), dense, j);
        CHECK((std::get<AtomContext>(ctx).restricted_error - f).cwiseAbs().maxCoeff() < 1e-12);
      }
    }
  }

  TEST_CASE("SGK on a single rank-one column") {
    AtomContext ctx;
    ctx.columns = {0};
    ctx.restricted_error = (Matrix(2, 1) << 2.0, 0.0).finished();
    ctx.coefficients = (Vector(1) << 2.0).finished();
    const auto raw = sgk_least_squares(ctx);
    REQUIRE(raw);
    CHECK((*raw)[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK((*raw)[1] == 0.0);
    const auto unit = sgk_update(ctx);
    REQUIRE(unit);
    CHECK((*unit)[0] == doctest::Approx(1.0).epsilon(1e-15));

    ctx.coefficients.setZero();
    CHECK_FALSE(sgk_update(ctx));
  }

  TEST_CASE("SGK least squares solves the normal equation") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const Instance in = make_instance(7, 10, 50, 3, 7 + 31 * seed);
      for (Index j = 0; j < 10; ++j) {
        const auto v = build_context(in.e, in.d, in.x, j);
        if (std::holds_alternative<DeadAtom>(v)) continue;
        const auto& ctx = std::get<AtomContext>(v);
        const auto d = sgk_least_squares(ctx);
        REQUIRE(d);
        const Vector lhs = ctx.coefficients.squaredNorm() * *d;
        const Vector rhs = ctx.restricted_error * ctx.coefficients;
        CHECK((lhs - rhs).norm() <= 1e-10 * std::max(1.0, rhs.norm()));
      }
    }
  }

  TEST_CASE("AK-SVD on an exact rank-one block") {
    const Vector u = (Vector(3) << 1.0, 2.0, 2.0).finished() / 3.0;
    const Vector v = (Vector(4) << 1.0, -2.0, 0.5, 3.0).finished();
    AtomContext ctx;
    ctx.columns = {0, 1, 2, 3};
    ctx.restricted_error = u * v.transpose();
    ctx.coefficients = (Vector(4) << 0.3, -0.1, 0.7, 0.2).finished();
    const auto up = aksvd_update(ctx);
    REQUIRE(up);
    const double sign = up->atom.dot(u) >= 0 ? 1.0 : -1.0;
    CHECK((up->atom - sign * u).norm() < 1e-14);
    CHECK((up->coefficients - sign * v).norm() < 1e-13);
  }

  TEST_CASE("AK-SVD and SGK give the same atom and AK-SVD does not increase the error") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const Instance in = make_instance(8, 14, 60, 4, 999 + seed);
      for (Index j = 0; j < 14; ++j) {
        const auto v = build_context(in.e, in.d, in.x, j);
        if (std::holds_alternative<DeadAtom>(v)) continue;
        const auto& ctx = std::get<AtomContext>(v);
        const auto sgk = sgk_update(ctx);
        const auto ak = aksvd_update(ctx);
        REQUIRE(sgk);
        REQUIRE(ak);
        CHECK((*sgk - ak->atom).norm() < 1e-12);
        const double before = (ctx.restricted_error - in.d.atom(j) * ctx.coefficients.transpose()).norm();
        const double after = (ctx.restricted_error - ak->atom * ak->coefficients.transpose()).norm();
        CHECK(after <= before + 1e-12);
        const double sgk_after = (ctx.restricted_error - *sgk * ctx.coefficients.transpose()).norm();
        CHECK(after <= sgk_after + 1e-12);
      }
    }
  }

  TEST_CASE("NSGK signal matrix cancels when codes agree") {
    const Instance in = make_instance(5, 9, 20, 2, 77);
    const Matrix z = nsgk_signal_matrix(SignalSet(in.y), in.d, in.x, in.x);
    CHECK((z - in.y).cwiseAbs().maxCoeff() < 1e-14);
  }

  TEST_CASE("NSGK signal matrix matches the dense formula") {
    const Instance in = make_instance(5, 9, 20, 2, 78);
    const SparseCode cur = oracle::random_code(9, 20, 3, 79);
    const Matrix z = nsgk_signal_matrix(SignalSet(in.y), in.d, in.x, cur);
    const Matrix expected = in.y + in.d.atoms() * in.x.to_dense() - in.d.atoms() * cur.to_dense();
    CHECK((z - expected).cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("property: NSGK with X_prev = X reduces to SGK on the same input") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const Matrix y = oracle::gaussian(6, 80, 400 + seed);
      const Dictionary d = Dictionary::normalized(oracle::gaussian(6, 12, 500 + seed));
      const SparseCode x = omp_encode_set(d, SignalSet(y), 3);
      const Matrix z = nsgk_signal_matrix(SignalSet(y), d, x, x);
      const Matrix ez = z - d.atoms() * x.to_dense();
      const Matrix ey = y - d.atoms() * x.to_dense();
      for (Index j = 0; j < 12; ++j) {
        const auto a = build_context(ez, d, x, j);
        const auto b = build_context(ey, d, x, j);
        if (std::holds_alternative<DeadAtom>(a)) continue;
        const auto ua = sgk_update(std::get<AtomContext>(a));
        const auto ub = sgk_update(std::get<AtomContext>(b));
        REQUIRE(ua);
        REQUIRE(ub);
        CHECK((*ua - *ub).norm() < 1e-12);
      }
    }
  }

  TEST_CASE("dead atom replacement takes the worst unused column") {
    Matrix e(2, 4);
    e << 1, 0, 3, 0,
         0, 2, 4, 5;
    std::vector<char> used(4, 0);
    auto r = replace_dead_atom(e, used);
    REQUIRE(r);
    CHECK(r->signal == 2);
    CHECK(r->atom[0] == doctest::Approx(0.6));
    CHECK(r->atom[1] == doctest::Approx(0.8));
    used[2] = 1;
    r = replace_dead_atom(e, used);
    REQUIRE(r);
    CHECK(r->signal == 3);  // norm 5 ties with column 2, which is used

    Matrix tie(1, 3);
    tie << -2, 2, 1;
    r = replace_dead_atom(tie, std::vector<char>(3, 0));
    REQUIRE(r);
    CHECK(r->signal == 0);
    CHECK(r->atom[0] == -1.0);

    CHECK_FALSE(replace_dead_atom(Matrix::Zero(3, 5), std::vector<char>(5, 0)));
  }
}

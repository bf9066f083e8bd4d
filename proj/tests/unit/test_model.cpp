#include "jau/errors.hpp"
#include "jau/model.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>

using namespace jau;

TEST_SUITE("model") {
  TEST_CASE("residual with an all-zero code is the signal matrix") {
    const Matrix y = oracle::gaussian(5, 7, 1);
    const Dictionary d = Dictionary::normalized(oracle::gaussian(5, 9, 2));
    const Matrix e = residual(SignalSet(y), d, SparseCode::zeros(9, 7));
    CHECK(e == y);
  }

  TEST_CASE("orthonormal square dictionary represents exactly with s = p") {
    const Index p = 6;
    const Matrix q = Eigen::HouseholderQR<Matrix>(oracle::gaussian(p, p, 3)).householderQ();
    const Dictionary d(q);
    const Matrix y = oracle::gaussian(p, 10, 4);
    const Matrix x = q.transpose() * y;
    std::vector<SparseColumn> cols(10);
    for (Index c = 0; c < 10; ++c)
      for (Index r = 0; r < p; ++r) cols[c].push_back({r, x(r, c)});
    const Matrix e = residual(SignalSet(y), d, SparseCode(p, cols));
    CHECK(e.cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("residual matches the dense oracle on a small instance") {
    const Matrix y = oracle::gaussian(3, 2, 5);
    const Dictionary d = Dictionary::normalized(oracle::gaussian(3, 4, 6));
    const SparseCode x = oracle::random_code(4, 2, 2, 7);
    const Matrix expected = y - d.atoms() * x.to_dense();
    const Matrix e = residual(SignalSet(y), d, x);
    for (Index c = 0; c < 2; ++c)
      for (Index r = 0; r < 3; ++r) CHECK(e(r, c) == doctest::Approx(expected(r, c)).epsilon(1e-14));
  }

  TEST_CASE("rmse of an exact fit is zero and of a known error is analytic") {
    const Dictionary d = Dictionary::normalized(oracle::gaussian(2, 3, 8));
    Matrix y(2, 2);
    y << 3, 4, 0, 0;
    CHECK(rmse(SignalSet(y), d, SparseCode::zeros(3, 2)) == doctest::Approx(2.5).epsilon(1e-15));

    const SparseCode x = oracle::random_code(3, 2, 1, 9);
    const Matrix exact = d.atoms() * x.to_dense();
    CHECK(rmse(SignalSet(exact), d, x) < 1e-15);
  }

  TEST_CASE("dimension mismatch is a configuration error") {
    const Dictionary d = Dictionary::normalized(oracle::gaussian(4, 5, 1));
    CHECK_THROWS_AS(residual(SignalSet(oracle::gaussian(3, 5, 2)), d, SparseCode::zeros(5, 5)), ConfigError);
    CHECK_THROWS_AS(residual(SignalSet(oracle::gaussian(4, 5, 2)), d, SparseCode::zeros(6, 5)), ConfigError);
    CHECK_THROWS_AS(rmse(SignalSet(oracle::gaussian(4, 5, 2)), d, SparseCode::zeros(5, 4)), ConfigError);
  }

  TEST_CASE("property: residual plus reconstruction gives back the signals") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      const Index p = 2 + static_cast<Index>(seed % 7), n = 3 + static_cast<Index>(seed % 11);
      const Index m = 1 + static_cast<Index>(seed % 13), s = 1 + static_cast<Index>(seed % std::min(p, n));
      const Matrix y = oracle::gaussian(p, m, 100 + seed);
      const Dictionary d = Dictionary::normalized(oracle::gaussian(p, n, 200 + seed));
      const SparseCode x = oracle::random_code(n, m, s, 300 + seed);
      const Matrix back = residual(SignalSet(y), d, x) + reconstruct(d, x);
      CHECK((back - y).norm() <= 1e-12 * y.norm());
    }
  }

  TEST_CASE("property: row index is the transpose occupancy of the columns") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      const Index n = 4 + static_cast<Index>(seed % 9), m = 1 + static_cast<Index>(seed % 17);
      const SparseCode x = oracle::random_code(n, m, 1 + static_cast<Index>(seed % 4), seed);
      const Matrix dense = x.to_dense();
      for (Index j = 0; j < n; ++j) {
        const auto expected = oracle::nonzero_columns(dense, j);
        const auto got = x.row_columns(j);
        REQUIRE(got.size() == expected.size());
        CHECK(std::equal(got.begin(), got.end(), expected.begin()));
        const Vector values = x.row_values(j);
        for (std::size_t k = 0; k < expected.size(); ++k) CHECK(values[static_cast<Index>(k)] == dense(j, expected[k]));
      }
    }
  }

  TEST_CASE("property: rmse is invariant under a joint column permutation") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const Index p = 5, n = 8, m = 12;
      const Matrix y = oracle::gaussian(p, m, seed);
      const Dictionary d = Dictionary::normalized(oracle::gaussian(p, n, seed + 50));
      const SparseCode x = oracle::random_code(n, m, 3, seed + 99);
      std::vector<Index> perm(m);
      std::iota(perm.begin(), perm.end(), Index{0});
      Rng rng(seed);
      for (Index k = m - 1; k > 0; --k) std::swap(perm[k], perm[rng.below(static_cast<std::uint64_t>(k + 1))]);
      Matrix yp(p, m);
      std::vector<SparseColumn> cols(m);
      for (Index c = 0; c < m; ++c) {
        yp.col(c) = y.col(perm[c]);
        const auto src = x.column(perm[c]);
        cols[c].assign(src.begin(), src.end());
      }
      CHECK(rmse(SignalSet(yp), d, SparseCode(n, cols)) ==
            doctest::Approx(rmse(SignalSet(y), d, x)).epsilon(1e-13));
    }
  }

  TEST_CASE("sparse code construction rules") {
    SUBCASE("exact zeros are not stored") {
      const SparseCode x(3, {{{0, 1.0}, {2, 0.0}}, {{1, 0.0}}});
      CHECK(x.nonzeros() == 1);
      CHECK(x.row_columns(2).empty());
    }
    SUBCASE("unsorted columns are sorted") {
      const SparseCode x(4, {{{3, 1.0}, {0, 2.0}}});
      CHECK(x.column(0)[0].row == 0);
      CHECK(x.column(0)[1].row == 3);
    }
    SUBCASE("duplicate and out-of-range rows are rejected") {
      CHECK_THROWS_AS(SparseCode(3, {{{1, 1.0}, {1, 2.0}}}), ConfigError);
      CHECK_THROWS_AS(SparseCode(3, {{{3, 1.0}}}), ConfigError);
    }
    SUBCASE("with_values keeps the pattern and drops new zeros") {
      const SparseCode x(3, {{{0, 1.0}, {2, 2.0}}, {{1, 3.0}}});
      const std::vector<double> same{4.0, 5.0, 6.0};
      const SparseCode y = x.with_values(same);
      CHECK(y.column(0)[1].value == 5.0);
      CHECK(y.row_columns(1).size() == 1);
      const std::vector<double> zeroed{4.0, 0.0, 6.0};
      const SparseCode z = x.with_values(zeroed);
      CHECK(z.nonzeros() == 2);
      CHECK(z.row_columns(2).empty());
      CHECK(z.max_column_nonzeros() == 1);
    }
  }

  TEST_CASE("dictionary enforces unit-norm atoms") {
    Matrix a = oracle::gaussian(4, 3, 1);
    CHECK_THROWS_AS(Dictionary{a}, ConfigError);
    const Dictionary d = Dictionary::normalized(a);
    for (Index j = 0; j < 3; ++j) CHECK(std::abs(d.atom(j).norm() - 1.0) < 1e-12);
    a.col(1).setZero();
    CHECK_THROWS_AS(Dictionary::normalized(a), ConfigError);
  }

  TEST_CASE("learner configuration validation") {
    LearnerConfig cfg;
    cfg.sparsity = 4;
    CHECK_NOTHROW(cfg.validate(8, 16));
    CHECK_THROWS_AS(cfg.validate(3, 16), ConfigError);
    CHECK_THROWS_AS(cfg.validate(8, 3), ConfigError);
    cfg.group_size = 17;
    CHECK_THROWS_AS(cfg.validate(8, 16), ConfigError);
    cfg.group_size = 5;  // need not divide n
    CHECK_NOTHROW(cfg.validate(8, 16));
    CHECK(cfg.resolved_group_size(16) == 5);
    cfg.group_size.reset();
    CHECK(cfg.resolved_group_size(16) == 16);
    CHECK(parse_algorithm("NSGK") == Algorithm::kNsgk);
    CHECK_THROWS_AS(parse_algorithm("ksvd"), ConfigError);
  }
}

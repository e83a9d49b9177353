#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "afpr/fft.hpp"
#include "afpr/initializer.hpp"
#include "afpr/sampling.hpp"
#include "support.hpp"

using namespace afpr;
using testing::random_signal;

namespace {

CMatrix random_matrix(Eigen::Index n, std::uint64_t seed) {
  Rng rng(seed);
  CMatrix m(n, n);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = cplx(rng.normal(), rng.normal());
  return m;
}

}  // namespace

TEST_SUITE("initializer") {
  TEST_CASE("seed magnitude examples") {
    const RVector ones = seed_magnitude(ambiguity_map(ComplexSignal::constant(4)));
    for (int p = 0; p < 4; ++p) CHECK(ones[p] == doctest::Approx(4.0));
    const RVector d = seed_magnitude(ambiguity_map(ComplexSignal::delta(4)));
    CHECK(d[0] == doctest::Approx(1.0));
    for (int p = 1; p < 4; ++p) CHECK(d[p] == doctest::Approx(0.0));
    CHECK(seed_magnitude(ambiguity_map(random_signal(16, 1))).minCoeff() >= 0.0);
  }

  TEST_CASE("Parseval form of the seed magnitude") {
    // (1/N) sum_k A[p,k] = sum_n |x[n]|^2 |x[n-p]|^2
    for (std::size_t n : {8u, 17u, 64u}) {
      const auto x = random_signal(n, 10 + n);
      const RVector v = seed_magnitude(ambiguity_map(x));
      RVector oracle(static_cast<Eigen::Index>(n));
      for (std::int64_t p = 0; p < static_cast<std::int64_t>(n); ++p) {
        double acc = 0.0;
        for (std::int64_t m = 0; m < static_cast<std::int64_t>(n); ++m) acc += std::norm(x[m]) * std::norm(x[m - p]);
        oracle[p] = acc;
      }
      CHECK((v - oracle).norm() <= 1e-9 * oracle.norm());
    }
  }

  TEST_CASE("seed vector") {
    const auto A = ambiguity_map(random_signal(16, 2));
    const auto s = seed_vector(A, 5);
    const RVector v = seed_magnitude(A);
    for (std::int64_t p = 0; p < 16; ++p) CHECK(std::abs(s[p]) == doctest::Approx(v[p]));
    CHECK(seed_vector(A, 5) == s);
    CHECK_FALSE(seed_vector(A, 6) == s);

    // masked rows are interpolated instead of left at zero
    const auto mask = make_mask(MaskKind::uniform_delay, MaskParams{2}, 16);
    const RVector vm = seed_magnitude(apply_mask(A, mask), mask);
    CHECK(vm.minCoeff() > 0.0);
    CHECK(vm[0] == doctest::Approx(v[0]));
    CHECK(vm[3] == doctest::Approx(0.5 * (v[2] + v[4])));
  }

  TEST_CASE("build_G") {
    const CMatrix id = build_G(ComplexSignal::delta(4).samples(), 0);
    CHECK((id - CMatrix::Identity(4, 4)).norm() < 1e-15);
    const CMatrix q = build_G(CVector::Constant(4, 0.5), 0);
    CHECK((q.array() - cplx(0.25)).abs().maxCoeff() < 1e-15);
    const CVector w = random_signal(6, 3).samples();
    for (std::int64_t ell : {0, 1, -2, 5}) {
      const CMatrix G = build_G(w, ell);
      for (Eigen::Index r = 0; r + 1 < 6; ++r) {
        for (Eigen::Index c = 0; c < 6; ++c) CHECK(G(r + 1, (c + 1) % 6) == G(r, c));
      }
      // G = F^-1 diag(symbol) F
      const CVector v = random_signal(6, 4).samples();
      const CVector via = fft::inverse(CVector(circulant_symbol(w, ell).cwiseProduct(fft::forward(v))));
      CHECK((G * v - via).norm() <= 1e-12 * (G * v).norm());
    }
  }

  TEST_CASE("proximal least squares") {
    const CVector y = random_signal(8, 5).samples();
    const CVector prev = random_signal(8, 6).samples();
    const CMatrix I = CMatrix::Identity(8, 8);
    CHECK((prox_ls_update(I, y, prev, 1e12) - y).norm() < 1e-9);
    CHECK((prox_ls_update(I, prev, prev, 0.3) - prev).norm() < 1e-14);

    const CMatrix G = random_matrix(8, 7);
    const double lambda = 1.0;
    const CMatrix normal = G.adjoint() * G + I / (2 * lambda);
    const CVector oracle = normal.fullPivLu().solve(G.adjoint() * y + prev / (2 * lambda));
    double cond = 0.0;
    CHECK((prox_ls_update(G, y, prev, lambda, &cond) - oracle).norm() <= 1e-9 * oracle.norm());
    CHECK(cond >= 1.0);

    const CVector w = random_signal(8, 8).samples();
    const CVector circ = prox_ls_update_circulant(circulant_symbol(w, 3), y, prev, 0.7);
    CHECK((circ - prox_ls_update(build_G(w, 3), y, prev, 0.7)).norm() <= 1e-10 * circ.norm());
    CHECK_THROWS_AS(prox_ls_update(G, y, prev, 0.0), InvalidArgument);
  }

  TEST_CASE("leading eigenvector") {
    const CVector x = random_signal(8, 9).samples();
    const auto r1 = leading_eigenvector(x * x.adjoint(), 1000, 1e-12);
    CHECK(std::abs(r1.vector.dot(x)) / x.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r1.eigenvalue == doctest::Approx(x.squaredNorm()));

    const auto ri = leading_eigenvector(CMatrix::Identity(6, 6), 1000, 1e-12);
    CHECK(ri.eigenvalue == doctest::Approx(1.0));
    CHECK(ri.vector.norm() == doctest::Approx(1.0));
    CHECK(ri.degenerate);

    for (std::uint64_t s = 0; s < 5; ++s) {
      const CMatrix M = random_matrix(8, 20 + s);
      const CMatrix H = (M + M.adjoint()) / 2.0;
      Eigen::SelfAdjointEigenSolver<CMatrix> es(H);
      const CVector top = es.eigenvectors().col(7);
      const auto r = leading_eigenvector(M, 20000, 1e-14, s);
      CHECK(std::abs(r.vector.dot(top)) >= 1.0 - 1e-8);
      CHECK(r.eigenvalue == doctest::Approx(es.eigenvalues()[7]).epsilon(1e-10));
      CHECK(r.second == doctest::Approx(es.eigenvalues()[6]).epsilon(1e-3));
      CHECK_FALSE(r.degenerate);
    }
    CHECK_THROWS_AS(leading_eigenvector(random_matrix(8, 40), 2, 1e-15), NumericalFailure);

    // largest magnitudes nearly tie with opposite signs: plain power iteration oscillates
    const CMatrix Q = random_matrix(6, 41).householderQr().householderQ();
    RVector lam(6);
    lam << 2.107, -2.113, 1.0, 0.5, -0.3, 0.1;
    const CMatrix T = Q * lam.cast<cplx>().asDiagonal() * Q.adjoint();
    const auto rt = leading_eigenvector(T, 2000, 1e-12);
    CHECK(rt.eigenvalue == doctest::Approx(2.107).epsilon(1e-9));
    CHECK(std::abs(rt.vector.dot(Q.col(0))) == doctest::Approx(1.0).epsilon(1e-8));
  }

  TEST_CASE("correlation error modulo trivial ambiguities") {
    const auto x = random_signal(12, 11);
    auto y = apply_trivial_transform(x, Shift{5});
    y = apply_trivial_transform(y, Modulate{3});
    y = apply_trivial_transform(y, Reflect{});
    y = apply_trivial_transform(y, Rotate{2.0});
    CHECK(correlation_error(x, y) < 1e-12);
    CHECK(correlation_error(x, random_signal(12, 12)) > 0.1);
  }

  TEST_CASE("impulse is recovered up to trivial ambiguities") {
    const auto d = ComplexSignal::delta(4);
    InitConfig c;
    const auto r = run_initialization(ambiguity_map(d), c, std::nullopt, d);
    CHECK(correlation_error(d, r.x0) < 1e-9);
    CHECK(r.iterations.size() == 2);
  }

  TEST_CASE("initializer improves on the seed vector") {
    for (std::uint64_t s = 0; s < 3; ++s) {
      const auto x = testing::band_signal(64, 30 + s);
      const auto A = ambiguity_map(x);
      InitConfig c;
      c.seed = s;
      const auto r = run_initialization(A, c, std::nullopt, x);
      CHECK(af_distance(A, ambiguity_map(r.x0)) < af_distance(A, ambiguity_map(r.x_init)));
      REQUIRE(r.final_correlation_error.has_value());
      REQUIRE(r.contraction_ratio.has_value());
    }
  }

  TEST_CASE("correlation error contracts at small N") {
    for (std::uint64_t s = 0; s < 3; ++s) {
      const auto x = testing::band_signal(16, 50 + s);
      InitConfig c;
      c.seed = s;
      c.lambda_mode = LambdaMode::premise;
      const auto r = run_initialization(ambiguity_map(x), c, std::nullopt, x);
      CHECK(*r.final_correlation_error < *r.init_correlation_error);
    }
  }

  TEST_CASE("premise lambda satisfies lambda sigma_min^2 > 1/2") {
    const auto x = testing::band_signal(16, 40);
    InitConfig c;
    c.lambda_mode = LambdaMode::premise;
    const auto r = run_initialization(ambiguity_map(x), c, std::nullopt, x);
    for (const auto& it : r.iterations) {
      if (it.sigma_min > 0) CHECK(it.lambda * it.sigma_min * it.sigma_min > 0.5);
    }
  }

  TEST_CASE("scale modes") {
    const auto x = testing::band_signal(32, 41);
    const auto A = ambiguity_map(x);
    InitConfig c;
    c.scale_mode = ScaleMode::fourth_root;
    const auto r = run_initialization(A, c);
    CHECK(r.beta == doctest::Approx(r.beta_fourth_root));
    CHECK(r.x0.norm() == doctest::Approx(r.beta).epsilon(1e-9));
    c.scale_mode = ScaleMode::fit_scale;
    CHECK(run_initialization(A, c).beta > 0.0);
  }

  TEST_CASE("config validation and names") {
    InitConfig c;
    c.iters_T = 0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c = InitConfig{};
    c.lambda = -1;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c = InitConfig{};
    c.premise_margin = 1.0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    CHECK(lambda_mode_from_string(to_string(LambdaMode::premise)) == LambdaMode::premise);
    CHECK(scale_mode_from_string(to_string(ScaleMode::fourth_root)) == ScaleMode::fourth_root);
    CHECK_THROWS_AS(scale_mode_from_string("x"), InvalidArgument);
  }
}

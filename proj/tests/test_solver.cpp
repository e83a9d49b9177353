#include <doctest.h>

#include <algorithm>

#include "afpr/sampling.hpp"
#include "afpr/solver.hpp"
#include "support.hpp"

using namespace afpr;
using testing::random_signal;

TEST_SUITE("solver") {
  TEST_CASE("smoothed objective examples") {
    const auto x = random_signal(8, 1);
    const auto m = make_measurements(ambiguity_map(x));
    CHECK(smoothed_objective(x, m, 0.0) < 1e-28);
    const auto d = ComplexSignal::delta(4);
    CHECK(smoothed_objective(d, make_measurements(ambiguity_map(d)), 1.0) ==
          doctest::Approx((3.0 - std::sqrt(2.0)) / 2.0).epsilon(1e-14));
    // phi_mu grows with mu, so h does too wherever |S_z| >= sqrt(A) on every
    // cell (here z = 2x). Where |S_z| < sqrt(A) a larger mu closes the gap, so
    // h is not monotone in mu for arbitrary z.
    const CVector z = 2.0 * x.samples();
    double prev = smoothed_objective(z, m, 0.0);
    for (double mu = 0.01; mu < 100; mu *= 2) {
      const double h = smoothed_objective(z, m, mu);
      CHECK(h >= prev);
      prev = h;
    }
    const CVector small = 0.1 * x.samples();
    CHECK(smoothed_objective(small, m, 1.0) < smoothed_objective(small, m, 0.0));
  }

  TEST_CASE("gradient vanishes at the truth") {
    const auto x = random_signal(8, 3);
    const auto m = make_measurements(ambiguity_map(x));
    std::size_t skipped = 0;
    CHECK(wirtinger_gradient(x.samples(), m, 0.0, &skipped).norm() < 1e-13);
    CHECK(skipped == 0);
    const auto d = ComplexSignal::delta(4);
    wirtinger_gradient(d.samples(), make_measurements(ambiguity_map(d)), 0.0, &skipped);
    CHECK(skipped == 12);
  }

  TEST_CASE("gradient against central differences") {
    for (std::uint64_t s = 0; s < 5; ++s) {
      const auto x = random_signal(8, 10 + s);
      const auto z = random_signal(8, 20 + s);
      const auto m = make_measurements(ambiguity_map(x));
      CHECK(testing::fd_error(z.samples(), m, 5.0, 1e-6) <= 1e-5);
    }
    const auto x = random_signal(12, 30);
    const auto mask = make_mask(MaskKind::uniform_delay, MaskParams{3}, 12);
    const auto m = make_measurements(apply_mask(ambiguity_map(x), mask), mask);
    CHECK(testing::fd_error(random_signal(12, 31).samples(), m, 2.0, 1e-6) <= 1e-5);
  }

  TEST_CASE("gradient is phase equivariant") {
    const auto m = make_measurements(ambiguity_map(random_signal(8, 40)));
    const auto z = random_signal(8, 41);
    const cplx ph = std::polar(1.0, std::numbers::pi / 3);
    const CVector g = wirtinger_gradient(z.samples(), m, 0.5);
    const CVector gr = wirtinger_gradient(CVector(ph * z.samples()), m, 0.5);
    CHECK((gr - ph * g).norm() <= 1e-12 * g.norm());
  }

  TEST_CASE("minibatch gradient") {
    const std::size_t n = 4;
    const auto x = random_signal(n, 50);
    const auto z = random_signal(n, 51).samples();
    const auto m = make_measurements(ambiguity_map(x));
    const auto cells = m.active_cells();
    REQUIRE(cells.size() == 16);
    const CVector full = wirtinger_gradient(z, m, 0.7);
    CHECK((minibatch_gradient(z, m, 0.7, cells) / 16.0 - full).norm() <= 1e-12 * full.norm());

    // four disjoint batches of Q = 4 average to the full gradient
    CVector mean = CVector::Zero(4);
    for (std::size_t b = 0; b < 4; ++b) {
      const std::span<const Cell> batch(cells.data() + 4 * b, 4);
      mean += minibatch_gradient(z, m, 0.7, batch) / 4.0 / 4.0;
    }
    CHECK((mean - full).norm() <= 1e-10 * full.norm());

    // single cell against the two-term closed form, with sqrt(A) = 0 there
    RMatrix zero = ambiguity_map(x).values();
    zero(1, 2) = 0.0;
    const auto mz = make_measurements(AmbiguityMap(zero));
    const Cell c{1, 2};
    const CVector one = minibatch_gradient(z, mz, 0.3, std::span<const Cell>(&c, 1));
    const ComplexSignal zs(z);
    const auto S = testing::direct_inner_product(zs)(1, 2);
    const double phi = std::sqrt(std::norm(S) + 0.09);
    for (std::int64_t l = 0; l < 4; ++l) {
      const cplx expect = (1.0 - 0.0 / phi) * (S * zs[l - 1] * testing::omega(static_cast<double>(2 * l), 4) +
                                               std::conj(S) * zs[l + 1] * testing::omega(-2.0 * static_cast<double>(l + 1), 4));
      CHECK(std::abs(one[l] - expect) <= 1e-12);
    }
    CHECK_THROWS_AS(minibatch_gradient(z, m, 0.7, std::span<const Cell>()), InvalidArgument);
    const Cell out{4, 0};
    CHECK_THROWS_AS(minibatch_gradient(z, m, 0.7, std::span<const Cell>(&out, 1)), InvalidArgument);
  }

  TEST_CASE("excluded cells leave the objective") {
    const auto x = random_signal(8, 60);
    const auto mask = make_mask(MaskKind::uniform_delay, MaskParams{2}, 8);
    const auto A = apply_mask(ambiguity_map(x), mask);
    const auto ex = make_measurements(A, mask);
    const auto zf = make_measurements(A, mask.with_mode(MaskMode::zero_fill));
    CHECK(ex.active_cells().size() == 32);
    CHECK(zf.active_cells().size() == 64);
    CHECK(smoothed_objective(x, ex, 0.0) < 1e-28);
    CHECK(smoothed_objective(x, zf, 0.0) > 1e-6);
  }

  TEST_CASE("config validation") {
    SolverConfig c;
    CHECK_NOTHROW(c.validate(8));
    c.gamma = 1.0;
    CHECK_THROWS_AS(c.validate(8), InvalidArgument);
    c = SolverConfig{};
    c.alpha = 0.0;
    CHECK_THROWS_AS(c.validate(8), InvalidArgument);
    c = SolverConfig{};
    c.batch_size = 65;
    CHECK_THROWS_AS(c.validate(8), InvalidArgument);
    c = SolverConfig{};
    c.mu0 = -1.0;
    CHECK_THROWS_AS(c.validate(8), InvalidArgument);
  }

  TEST_CASE("started at the optimum with a tiny radius the solver stays there") {
    const auto x = testing::band_signal(16, 5);
    const auto A = ambiguity_map(x);
    SolverConfig c;
    c.mu0 = 1e-12;
    c.epsilon = 1e-16;
    const auto r = run_recovery(A, SamplingMask::full(16), x, c);
    CHECK(af_distance(A, ambiguity_map(r.recovered)) <= 1e-10);
    CHECK(r.final_full_grad_norm <= 1e-10);
    CHECK(r.stop_reason == StopReason::gradient_tolerance);
  }

  TEST_CASE("recovery from a perturbed start, mu trace and determinism") {
    const auto x = testing::band_signal(16, 6);
    const auto A = ambiguity_map(x);
    Rng rng(3);
    CVector x0 = x.samples();
    for (auto& v : x0) v += 0.05 * cplx(rng.normal(), rng.normal());
    SolverConfig c;
    c.seed = 17;
    const auto r = run_recovery(A, SamplingMask::full(16), ComplexSignal(x0), c, x);
    CHECK(af_distance(A, ambiguity_map(r.recovered)) <= 1e-6);
    CHECK(r.final_mu <= 1e-6 * c.mu0);
    for (std::size_t i = 1; i < r.trace.mu_history.size(); ++i) CHECK(r.trace.mu_history[i] <= r.trace.mu_history[i - 1]);
    REQUIRE_FALSE(r.trace.records.empty());
    CHECK(r.trace.records.front().dist_truth.has_value());
    const auto again = run_recovery(A, SamplingMask::full(16), ComplexSignal(x0), c, x);
    CHECK(again.recovered == r.recovered);
    c.seed = 18;
    CHECK_FALSE(run_recovery(A, SamplingMask::full(16), ComplexSignal(x0), c).recovered == r.recovered);
  }

  TEST_CASE("delay residue classes") {
    CHECK(delay_residue_classes(SamplingMask::full(16)) == 1);
    CHECK(delay_residue_classes(make_mask(MaskKind::uniform_delay, MaskParams{2}, 16)) == 2);
    CHECK(delay_residue_classes(make_mask(MaskKind::uniform_delay, MaskParams{4}, 16)) == 4);
    CHECK(delay_residue_classes(make_mask(MaskKind::uniform_delay, MaskParams{3}, 16)) == 1);
    CHECK(delay_residue_classes(make_mask(MaskKind::block_delay, MaskParams{}, 16)) == 1);
  }

  TEST_CASE("support alignment undoes trivial transforms") {
    const auto x = testing::band_signal(32, 7);
    const SupportSpec spec{SupportKind::band_limited, 16, 0};
    auto moved = apply_trivial_transform(x, Modulate{9});
    moved = apply_trivial_transform(moved, Reflect{});
    moved = apply_trivial_transform(moved, Rotate{0.4});
    CHECK(project_support(moved.samples(), spec).norm() < 0.9 * moved.norm());
    const ComplexSignal aligned(align_to_support(moved.samples(), spec));
    CHECK(project_support(aligned.samples(), spec).norm() == doctest::Approx(aligned.norm()).epsilon(1e-12));
    CHECK(af_distance(ambiguity_map(x), ambiguity_map(aligned)) < 1e-12);

    WaveformRecipe r;
    r.n_len = 32;
    r.support = SupportKind::time_limited;
    const auto t = generate(r);
    const auto shifted = apply_trivial_transform(t.signal, Shift{11});
    const CVector back = align_to_support(shifted.samples(), t.support);
    CHECK(project_support(back, t.support).norm() == doctest::Approx(back.norm()).epsilon(1e-12));
    CHECK(align_to_support(x.samples(), SupportSpec{}) == x.samples());
  }

  TEST_CASE("pipeline keeps the best restart and lands on the support") {
    const auto g = generate(WaveformRecipe{.n_len = 16, .seed = 8});
    const auto A = ambiguity_map(g.signal);
    PipelineConfig pc;
    pc.solver.seed = 2;
    const auto r = recover_signal(A, SamplingMask::full(16), testing::random_signal(16, 9, true), g.support, pc);
    REQUIRE(r.restart_fits.size() == 3);
    const auto best = std::min_element(r.restart_fits.begin(), r.restart_fits.end()) - r.restart_fits.begin();
    CHECK(r.chosen_restart == static_cast<std::size_t>(best));
    CHECK(r.coarse.af_distance_to_input == r.restart_fits[r.chosen_restart]);
    CHECK(r.refined.has_value());
    CHECK(r.residue_classes == 1);
    CHECK(check_support(r.recovered, g.support, 1e-12));

    pc.refine = false;
    pc.restarts = 1;
    const auto plain = recover_signal(A, SamplingMask::full(16), testing::random_signal(16, 9, true), g.support, pc);
    CHECK_FALSE(plain.refined.has_value());
    CHECK(plain.recovered == plain.coarse.recovered);
  }

  TEST_CASE("enum names round trip") {
    CHECK(gradient_scaling_from_string(to_string(GradientScaling::sum)) == GradientScaling::sum);
    CHECK(to_string(StopReason::max_iterations) == "max_iterations");
    CHECK_THROWS_AS(gradient_scaling_from_string("median"), InvalidArgument);
  }
}

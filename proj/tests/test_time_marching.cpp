#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "fkcim/cim_solver.hpp"
#include "fkcim/errors.hpp"
#include "fkcim/time_marching.hpp"
#include "oracles.hpp"

using namespace fkcim;

TEST(TmWeight, DiagonalEntry) {
  for (double alpha : {0.3, 0.59, 0.82}) {
    for (int n : {0, 1, 7, 100}) {
      const double expected = std::exp(-0.7 * 0.01) * (std::pow(2.0, alpha + 1.0) - 2.0);
      if (n == 0) continue;
      EXPECT_NEAR(tm_weight(n, n, alpha, 0.7, 0.01), expected, 1e-15);
    }
  }
}

TEST(TmWeight, LinearInterpolationLimit) {
  EXPECT_NEAR(tm_weight(5, 5, 1.0 - 1e-12, 0.0, 0.1), 2.0, 1e-10);
  EXPECT_NEAR(tm_weight(3, 5, 1.0 - 1e-12, 0.0, 0.1), 2.0, 1e-10);
  EXPECT_NEAR(tm_weight(0, 5, 1.0 - 1e-12, 0.0, 0.1), 1.0, 1e-10);
}

TEST(TmWeight, FirstStep) {
  for (double alpha : {0.2, 0.5, 0.9}) {
    EXPECT_NEAR(tm_weight(0, 0, alpha, 1.3, 0.05), alpha * std::exp(-1.3 * 0.05), 1e-15);
  }
}

TEST(TmWeight, NonNegative) {
  std::mt19937_64 rng(71);
  std::uniform_int_distribution<int> nd(0, 10000);
  std::uniform_real_distribution<double> ad(0.01, 0.99);
  for (int n = 0; n <= 200; ++n) {
    for (int j = 0; j <= n; ++j) EXPECT_GE(tm_weight(j, n, 0.59, 0.3, 0.01), 0.0);
  }
  for (int i = 0; i < 20000; ++i) {
    const int n = nd(rng);
    std::uniform_int_distribution<int> jd(0, n);
    EXPECT_GE(tm_weight(jd(rng), n, ad(rng), 2.0 * ad(rng), 0.01), 0.0);
  }
}

TEST(TmWeight, RowSumTelescopes) {
  // sum_j d_{j,n} = d_{0,n} + [(n+1)^(a+1) - n^(a+1)] - 1 = (n+1)^a (1+a) - 1.
  for (double alpha : {0.25, 0.59, 0.82}) {
    for (int n = 0; n <= 100; ++n) {
      double s = 0.0;
      for (int j = 0; j <= n; ++j) s += tm_weight(j, n, alpha, 0.0, 0.1);
      const double expected = std::pow(n + 1.0, alpha) * (1.0 + alpha) - 1.0;
      EXPECT_NEAR(s, expected, 1e-10 * std::max(1.0, expected)) << n;
    }
  }
}

TEST(FirstStep, ZeroData) {
  FkParams p = oracle::example_params();
  p.G10 = p.G20 = 0.0;
  const auto [g1, g2] = tm_first_step(p, 0.01);
  EXPECT_EQ(g1, 0.0);
  EXPECT_EQ(g2, 0.0);
}

TEST(FirstStep, NoSwitchingNoFunctional) {
  const FkParams p{1.0, 1.0, 0.4, 0.7, 1.0, 1.0, 0.5, 0.5, 0.0, 0.3, 0.9};
  const auto [g1, g2] = tm_first_step(p, 0.1);
  EXPECT_DOUBLE_EQ(g1, 0.3);
  EXPECT_DOUBLE_EQ(g2, 0.9);
}

TEST(FirstStep, StepHalvingConsistency) {
  const FkParams p = oracle::example_params();
  const double h = 3.0 / 4096.0;
  // One step of size h against two steps of size h/2 reaching the same time.
  const auto [a1, a2] = tm_first_step(p, h);
  TimeMarcher fine(p, make_grid(h, 2));
  fine.step();
  const SolutionSample b = fine.step();
  EXPECT_LT(std::abs(a1 - b.G1), h);
  EXPECT_LT(std::abs(a2 - b.G2), h);
}

TEST(TmSolve, RowsAndTimes) {
  const auto s = tm_solve(oracle::example_params(), make_grid(3.0, 1));
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].t, 0.0);
  EXPECT_EQ(s[1].t, 3.0);
  EXPECT_EQ(s[0].G1, 0.55);
}

TEST(TmSolve, DiscreteConservation) {
  std::mt19937_64 rng(72);
  for (int i = 0; i < 10; ++i) {
    FkParams p = oracle::random_params(rng);
    p.rho = 0.0;
    if (p.p + p.b < 1.0) {
      p.p = 1.0 - p.p;
      p.b = 1.0 - p.b;
    }
    for (HistoryTerm history : {HistoryTerm::convolution_trapezoid, HistoryTerm::gamma_at_one}) {
      for (const SolutionSample& s : tm_solve(p, make_grid(2.0, 300), {history})) {
        EXPECT_NEAR(s.G1 + s.G2, p.G10 + p.G20, 1e-10);
      }
    }
  }
}

TEST(TmSolve, DecoupledConvergence) {
  for (double alpha : {0.4, 0.59, 0.82}) {
    const FkParams p{1.0, 1.0, alpha, alpha, 1.0, 1.0, 1.0, 0.4, 1.5, 0.55, 0.45};
    double prev = 0.0;
    for (int M : {64, 128, 256, 512}) {
      double err = 0.0;
      for (const SolutionSample& s : tm_solve(p, make_grid(3.0, M))) {
        err = std::max(err, std::abs(s.G1 - oracle::decoupled_solution(0.55, 1.5, s.t)));
        err = std::max(err, std::abs(s.G2 - oracle::decoupled_solution(0.45, 0.6, s.t)));
      }
      if (prev > 0.0) {
        EXPECT_LE(err, 0.5 * prev) << alpha << " " << M;
      }
      prev = err;
    }
  }
}

TEST(TmSolve, ExampleConvergesTowardContourSolution) {
  const FkParams p = oracle::example_params();
  std::vector<double> errs;
  for (int M : {256, 1024, 4096}) {
    const auto tm = tm_solve(p, make_grid(3.0, M));
    std::vector<double> times;
    for (const SolutionSample& s : tm) {
      if (s.t >= 0.6) times.push_back(s.t);
    }
    const auto cim = solve_window(p, ContourKind::hyperbolic, 60, 0.6, 3.0, times).samples;
    double err = 0.0;
    for (std::size_t i = 0; i < cim.size(); ++i) {
      const SolutionSample& s = tm[tm.size() - cim.size() + i];
      err = std::max({err, std::abs(s.G1 - cim[i].G1), std::abs(s.G2 - cim[i].G2)});
    }
    errs.push_back(err);
  }
  EXPECT_LT(errs[1], 0.5 * errs[0]);
  EXPECT_LT(errs[2], 0.5 * errs[1]);
  EXPECT_LT(errs[2], 1e-6);
}

TEST(TmSolve, GammaAtOneHistoryStaysBiased) {
  const FkParams p = oracle::example_params();
  const auto tm = tm_solve(p, make_grid(3.0, 1024), {HistoryTerm::gamma_at_one});
  const auto cim = solve_window(p, ContourKind::hyperbolic, 60, 0.6, 3.0, std::vector<double>{3.0}).samples[0];
  EXPECT_GT(std::max(std::abs(tm.back().G1 - cim.G1), std::abs(tm.back().G2 - cim.G2)), 1e-3);
}

TEST(TmSolve, HistoryVariantsAgreeWithoutFunctional) {
  FkParams p = oracle::example_params();
  p.rho = 0.0;
  const auto a = tm_solve(p, make_grid(3.0, 128), {HistoryTerm::convolution_trapezoid});
  const auto b = tm_solve(p, make_grid(3.0, 128), {HistoryTerm::gamma_at_one});
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].G1, b[i].G1);
    EXPECT_EQ(a[i].G2, b[i].G2);
  }
}

TEST(TimeMarcher, IncrementalSumsMatchRecomputation) {
  TimeMarcher tm(oracle::example_params(), make_grid(3.0, 1000));
  while (!tm.done()) {
    tm.step();
    if (tm.steps_taken() % 100 == 0) {
      for (int state : {1, 2}) {
        EXPECT_NEAR(tm.trapezoid_sum(state), tm.recompute_trapezoid_sum(state), 1e-12);
      }
    }
  }
  EXPECT_EQ(tm.history(1).size(), 1001u);
  EXPECT_EQ(tm.history(1)[0], 0.55);
  EXPECT_EQ(tm.history(2)[0], 0.45);
  EXPECT_THROW(tm.step(), std::logic_error);
  EXPECT_THROW(tm.history(3), std::out_of_range);
}

TEST(TimeMarcher, SingularStep) {
  // With rho = 0 the determinant is 1 - C1 f1 - C2 f2; pick Binv so that it
  // vanishes for h = 1.
  const double f = 1.0 / (0.5 * 1.5 * special::gamma_fn(0.5));
  const double B = 0.5 / f;
  const FkParams p{0.0, 0.0, 0.5, 0.5, B, B, 0.0, 0.0, 0.0, 1.0, 1.0};
  EXPECT_THROW(tm_first_step(p, 1.0), SingularStep);
  EXPECT_NO_THROW(tm_first_step(p, 0.01));
}

TEST(TmGrid, Validation) {
  const TmGrid g = make_grid(3.0, 4096);
  EXPECT_DOUBLE_EQ(g.h * g.M, 3.0);
  EXPECT_THROW(make_grid(0.0, 10), InvalidParameter);
  EXPECT_THROW(make_grid(1.0, 0), InvalidParameter);
}

TEST(TmReference, LookupAtGridPoints) {
  const TmReference ref(oracle::example_params(), 3.0, 64);
  for (std::size_t n = 0; n <= 64; n += 8) {
    const SolutionSample s = ref.value_at(ref.samples()[n].t);
    EXPECT_EQ(s.G1, ref.samples()[n].G1);
    EXPECT_EQ(s.G2, ref.samples()[n].G2);
  }
  const SolutionSample mid = ref.value_at(0.5 * (ref.samples()[3].t + ref.samples()[4].t));
  EXPECT_NEAR(mid.G1, 0.5 * (ref.samples()[3].G1 + ref.samples()[4].G1), 1e-15);
}

TEST(TmReference, ConstantSolutionInterpolates) {
  const TmReference ref({1.0, 1.0, 0.5, 0.5, 1.0, 1.0, 0.0, 0.0, 0.0, 0.7, 0.2}, 2.0, 16);
  const SolutionSample s = ref.value_at(0.0625 + 0.03125);
  EXPECT_EQ(s.G1, 0.7);
  EXPECT_EQ(s.G2, 0.2);
}

TEST(TmReference, OutOfRange) {
  const TmReference ref(oracle::example_params(), 3.0, 16);
  EXPECT_THROW(ref.value_at(-1e-9), std::out_of_range);
  EXPECT_THROW(ref.value_at(3.0 + 1e-9), std::out_of_range);
  EXPECT_NO_THROW(ref.value_at(3.0));
}

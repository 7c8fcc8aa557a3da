#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <numbers>
#include <vector>

#include "fkcim/cim_solver.hpp"
#include "fkcim/errors.hpp"
#include "fkcim/time_marching.hpp"
#include "oracles.hpp"

using namespace fkcim;

namespace {

FkParams decoupled_exponential() { return {1.0, 1.0, 0.82, 0.59, 1.0, 1.0, 1.0, 1.0, 1.5, 0.55, 0.45}; }

std::vector<double> log_times(double t0, double t1, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(t0 * std::pow(t1 / t0, static_cast<double>(i) / (n - 1)));
  return out;
}

std::vector<double> lin_times(double t0, double t1, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(t0 + (t1 - t0) * i / (n - 1));
  return out;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST(Prepare, ZeroInitialDataGivesZeroCache) {
  FkParams p = oracle::example_params();
  p.G10 = p.G20 = 0.0;
  const PreparedIntegrand pi = prepare(Model(p), hyperbolic_optimal(0.1123, 5.0, 3.0, 12));
  for (std::size_t k = 0; k < pi.v1.size(); ++k) {
    EXPECT_EQ(pi.v1[k], Complex(0.0, 0.0));
    EXPECT_EQ(pi.v2[k], Complex(0.0, 0.0));
  }
  const SolutionSample s = evaluate(pi, 2.0);
  EXPECT_EQ(s.G1, 0.0);
  EXPECT_EQ(s.G2, 0.0);
}

TEST(Prepare, CacheMatchesFreshEvaluation) {
  const Model m(oracle::example_params());
  const Contour c = parabolic_optimal(0.9875, 5.0, 3.0, 16);
  const PreparedIntegrand pi = prepare(m, c);
  const std::vector<ContourNode> ns = nodes(c);
  ASSERT_EQ(pi.z.size(), ns.size());
  for (std::size_t k = 0; k < ns.size(); ++k) {
    const LaplaceValue g = m.g_hat(ns[k].z);
    EXPECT_EQ(pi.z[k], ns[k].z);
    EXPECT_EQ(pi.v1[k], g.G1hat * ns[k].dz);
    EXPECT_EQ(pi.v2[k], g.G2hat * ns[k].dz);
  }
}

TEST(Prepare, SingleNode) {
  const Model m(oracle::example_params());
  const PreparedIntegrand pi = prepare(m, HyperbolicContour{20.0, 0.5, 1.0, 0.1123, 1});
  ASSERT_EQ(pi.z.size(), 1u);
  EXPECT_DOUBLE_EQ(pi.z[0].real(), 20.0 * (1.0 - std::sin(1.0)));
  EXPECT_EQ(pi.z[0].imag(), 0.0);
}

TEST(Evaluate, DecoupledExponentialAtUnitTime) {
  const FkParams p = decoupled_exponential();
  for (auto [t0, t1] : {std::pair{0.2, 1.0}, std::pair{1.0, 5.0}}) {
    const WindowSolution w = solve_window(p, ContourKind::hyperbolic, 30, t0, t1, std::vector<double>{1.0});
    const double exact = oracle::decoupled_solution(0.55, 1.5, 1.0);
    EXPECT_LT(std::abs(w.samples[0].G1 - exact) / exact, 1e-8);
    EXPECT_TRUE(w.report.box_check_passed);
  }
}

TEST(Evaluate, DecoupledExponentialAcrossWindow) {
  const FkParams p = decoupled_exponential();
  const std::vector<double> times = log_times(1.0, 5.0, 20);
  for (ContourKind kind : {ContourKind::hyperbolic, ContourKind::parabolic}) {
    const WindowSolution w = solve_window(p, kind, 32, 1.0, 5.0, times);
    for (const SolutionSample& s : w.samples) {
      EXPECT_LT(std::abs(s.G1 / oracle::decoupled_solution(0.55, 1.5, s.t) - 1.0), 1e-8) << s.t;
      EXPECT_LT(std::abs(s.G2 / oracle::decoupled_solution(0.45, 1.5, s.t) - 1.0), 1e-8) << s.t;
    }
    EXPECT_TRUE(w.warnings.empty());
  }
}

TEST(Evaluate, DecoupledConvergesForLargerN) {
  FkParams p = decoupled_exponential();
  p.U2 = 0.3;
  for (int N : {30, 40, 60}) {
    const WindowSolution w = solve_window(p, ContourKind::hyperbolic, N, 0.6, 3.0, lin_times(0.6, 3.0, 9));
    for (const SolutionSample& s : w.samples) {
      EXPECT_LT(std::abs(s.G1 / oracle::decoupled_solution(0.55, 1.5, s.t) - 1.0), 1e-8);
      EXPECT_LT(std::abs(s.G2 / oracle::decoupled_solution(0.45, 0.45, s.t) - 1.0), 1e-8);
    }
  }
}

TEST(Evaluate, ExampleWithEightHyperbolicNodes) {
  const FkParams p = oracle::example_params();
  const TmReference ref(p, 3.0, 4096);
  const SolutionSample r = ref.value_at(3.0);
  const WindowSolution w = solve_window(p, ContourKind::hyperbolic, 8, 0.6, 3.0, std::vector<double>{3.0});
  EXPECT_LE(std::abs(w.samples[0].G1 - r.G1), 1e-4);
  EXPECT_LE(std::abs(w.samples[0].G2 - r.G2), 1e-4);
}

TEST(Evaluate, LinearInInitialData) {
  const FkParams p = oracle::example_params();
  FkParams a = p, b = p;
  a.G20 = 0.0;
  b.G10 = 0.0;
  const std::vector<double> times = lin_times(0.6, 3.0, 17);
  for (ContourKind kind : {ContourKind::parabolic, ContourKind::hyperbolic}) {
    const auto full = solve_window(p, kind, 20, 0.6, 3.0, times).samples;
    const auto only1 = solve_window(a, kind, 20, 0.6, 3.0, times).samples;
    const auto only2 = solve_window(b, kind, 20, 0.6, 3.0, times).samples;
    for (std::size_t i = 0; i < times.size(); ++i) {
      EXPECT_NEAR(only1[i].G1 + only2[i].G1, full[i].G1, 1e-12);
      EXPECT_NEAR(only1[i].G2 + only2[i].G2, full[i].G2, 1e-12);
    }
  }
}

TEST(Evaluate, ConservationWithoutFunctional) {
  FkParams p = oracle::example_params();
  p.rho = 0.0;
  const std::vector<double> times = lin_times(0.6, 3.0, 41);
  for (ContourKind kind : {ContourKind::parabolic, ContourKind::hyperbolic}) {
    for (int N : {16, 32}) {
      for (const SolutionSample& s : solve_window(p, kind, N, 0.6, 3.0, times).samples) {
        EXPECT_LE(std::abs(s.G1 + s.G2 - 1.0), 1e-6) << N << " " << s.t;
      }
    }
  }
}

TEST(Evaluate, AgreesWithFineTimeMarching) {
  const FkParams p = oracle::example_params();
  const TmReference ref(p, 3.0, 1 << 15);
  // Compare at the grid points nearest to 0.6, 0.75, ..., 3.
  std::vector<double> times;
  std::vector<SolutionSample> expected;
  for (double t : lin_times(0.6, 3.0, 17)) {
    const auto n = static_cast<std::size_t>(std::lround(t / ref.grid().h));
    expected.push_back(ref.samples()[n]);
    times.push_back(ref.samples()[n].t);
  }
  for (ContourKind kind : {ContourKind::parabolic, ContourKind::hyperbolic}) {
    const auto got = solve_window(p, kind, 40, 0.6, 3.0, times).samples;
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_LE(std::abs(got[i].G1 - expected[i].G1), 5e-5);
      EXPECT_LE(std::abs(got[i].G2 - expected[i].G2), 5e-5);
    }
  }
}

TEST(Evaluate, BitIdenticalRepeats) {
  const FkParams p = oracle::example_params();
  const std::vector<double> times = lin_times(0.6, 3.0, 17);
  const auto a = solve_window(p, ContourKind::parabolic, 24, 0.6, 3.0, times).samples;
  const auto b = solve_window(p, ContourKind::parabolic, 24, 0.6, 3.0, times).samples;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_TRUE(same_bits(a[i].G1, b[i].G1));
    EXPECT_TRUE(same_bits(a[i].G2, b[i].G2));
  }
}

TEST(Evaluate, CauchyInNodeCount) {
  const FkParams p = oracle::example_params();
  const std::vector<double> t{3.0};
  for (ContourKind kind : {ContourKind::parabolic, ContourKind::hyperbolic}) {
    const SolutionSample base = solve_window(p, kind, 32, 0.6, 3.0, t).samples[0];
    for (int N = 33; N <= 64; ++N) {
      const SolutionSample s = solve_window(p, kind, N, 0.6, 3.0, t).samples[0];
      EXPECT_LE(std::abs(s.G1 - base.G1), 1e-6) << N;
      EXPECT_LE(std::abs(s.G2 - base.G2), 1e-6) << N;
    }
  }
}

TEST(Evaluate, LiteralFullWeightDiverges) {
  const FkParams p = oracle::example_params();
  const std::vector<double> t{3.0};
  SolveOptions literal;
  literal.literal_full_weight_k0 = true;
  const SolutionSample half = solve_window(p, ContourKind::hyperbolic, 40, 0.6, 3.0, t).samples[0];
  const SolutionSample full = solve_window(p, ContourKind::hyperbolic, 40, 0.6, 3.0, t, literal).samples[0];
  EXPECT_GT(std::abs(full.G1 - half.G1), 1e-3);
}

TEST(Evaluate, OverflowGuard) {
  const PreparedIntegrand pi = prepare(Model(oracle::example_params()), ParabolicContour{10.0, 0.1, 0.9, 5});
  EXPECT_NO_THROW(evaluate(pi, 69.0));
  try {
    evaluate(pi, 71.0);
    FAIL() << "expected OverflowError";
  } catch (const OverflowError& e) {
    EXPECT_NE(std::string(e.what()).find("k=0"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("Lambda"), std::string::npos);
  }
}

TEST(SolveWindow, SingleTimeUsesUnitRatioParameters) {
  const FkParams p = oracle::example_params();
  const WindowSolution w = solve_window(p, ContourKind::parabolic, 20, 2.0, 2.0, std::vector<double>{2.0});
  const ParabolicContour expected = parabolic_optimal(kDefaultStripA, 1.0, 2.0, 20);
  const auto& got = std::get<ParabolicContour>(w.contour);
  EXPECT_EQ(got.eta, expected.eta);
  EXPECT_EQ(got.h, expected.h);
}

TEST(SolveWindow, WarnsOutsideWindow) {
  const WindowSolution w =
      solve_window(oracle::example_params(), ContourKind::hyperbolic, 20, 0.6, 3.0, std::vector<double>{0.3, 1.0, 4.0});
  EXPECT_EQ(w.samples.size(), 3u);
  EXPECT_EQ(w.warnings.size(), 2u);
}

TEST(SolveWindow, ExampleContoursNeedTheCertificate) {
  const WindowSolution w =
      solve_window(oracle::example_params(), ContourKind::parabolic, 10, 0.6, 3.0, std::vector<double>{3.0});
  EXPECT_FALSE(w.report.box_check_passed);
  ASSERT_TRUE(w.report.certificate.has_value());
  EXPECT_TRUE(w.report.certificate->passed);
}

TEST(SolveWindow, RejectsContourThatEnclosesAZero) {
  const FkParams p{0.0, 0.0, 0.5, 0.5, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0};
  EXPECT_THROW(solve_window(p, ContourKind::parabolic, 10, 0.6, 3.0, std::vector<double>{3.0}), ContourInvalid);
}

TEST(SolveWindow, RejectsBadWindow) {
  const FkParams p = oracle::example_params();
  EXPECT_THROW(solve_window(p, ContourKind::parabolic, 10, 0.0, 3.0, std::vector<double>{1.0}), InvalidParameter);
  EXPECT_THROW(solve_window(p, ContourKind::parabolic, 10, 2.0, 1.0, std::vector<double>{1.0}), InvalidParameter);
}

TEST(PartitionWindows, CoversRange) {
  const auto w = partition_windows(1e3, 1e6, 50.0);
  ASSERT_EQ(w.size(), 2u);
  EXPECT_EQ(w[0].first, 1e3);
  EXPECT_EQ(w[0].second, 5e4);
  EXPECT_EQ(w[1].first, 5e4);
  EXPECT_EQ(w[1].second, 2.5e6);
  const auto exact = partition_windows(1.0, 25.0, 5.0);
  ASSERT_EQ(exact.size(), 2u);
  EXPECT_EQ(exact[1].second, 25.0);
  const auto single = partition_windows(2.0, 2.0, 10.0);
  ASSERT_EQ(single.size(), 1u);
  EXPECT_EQ(single[0].second, 20.0);
  EXPECT_EQ(partition_windows(2.0, 2.0, 1.0).size(), 1u);
  EXPECT_THROW(partition_windows(0.0, 1.0, 5.0), InvalidParameter);
}

TEST(RoundoffFloor, ScalesWithLargestTerm) {
  const ParabolicContour c{2.0, 0.1, 0.9, 10};
  EXPECT_DOUBLE_EQ(roundoff_floor(c, 3.0), 100.0 * std::numeric_limits<double>::epsilon() * std::exp(6.0));
}

TEST(DecayFit, RecoversSyntheticRate) {
  std::vector<ErrorPoint> pts;
  for (int N = 2; N <= 30; N += 2) pts.push_back({N, 3.7 * std::exp(-0.5 * N), 0.0});
  const DecayFit f = error_decay_fit(pts);
  EXPECT_NEAR(f.rate, 0.5, 1e-10);
  EXPECT_NEAR(std::exp(f.log_coeff), 3.7, 1e-8);
  EXPECT_EQ(f.used, pts.size());
}

TEST(DecayFit, IgnoresPointsAtTheFloor) {
  std::vector<ErrorPoint> pts;
  for (int N = 2; N <= 20; ++N) pts.push_back({N, std::max(std::exp(-1.2 * N), 1e-8), 2e-8});
  const DecayFit f = error_decay_fit(pts);
  EXPECT_NEAR(f.rate, 1.2, 1e-10);
  EXPECT_EQ(f.used, 13u);
}

TEST(DecayFit, InsufficientData) {
  std::vector<ErrorPoint> pts{{2, 1e-2, 0.0}, {3, 1e-3, 0.0}, {4, 1e-4, 0.0}, {5, 1e-12, 1e-10}};
  EXPECT_THROW(error_decay_fit(pts), InsufficientData);
}

TEST(DecayFit, RatesNearTheory) {
  const FkParams p = oracle::example_params();
  const std::vector<double> times = lin_times(0.6, 3.0, 17);
  for (ContourKind kind : {ContourKind::parabolic, ContourKind::hyperbolic}) {
    const ContourKind other = kind == ContourKind::parabolic ? ContourKind::hyperbolic : ContourKind::parabolic;
    const auto ref = solve_window(p, other, 64, 0.6, 3.0, times).samples;
    std::vector<ErrorPoint> pts;
    for (int N = 2; N <= 24; ++N) {
      const WindowSolution w = solve_window(p, kind, N, 0.6, 3.0, times);
      double e = 0.0;
      for (std::size_t i = 0; i < times.size(); ++i) {
        e = std::max({e, std::abs(w.samples[i].G1 - ref[i].G1), std::abs(w.samples[i].G2 - ref[i].G2)});
      }
      pts.push_back({N, e, std::max(roundoff_floor(w.contour, 3.0), 1e-9)});
    }
    const double theory = kind == ContourKind::parabolic
                              ? parabolic_decay_rate(kDefaultStripA, 5.0)
                              : hyperbolic_Q(hyperbolic_optimal_alpha(kDefaultDelta, 5.0), kDefaultDelta, 5.0);
    const DecayFit f = error_decay_fit(pts);
    EXPECT_LT(std::abs(f.rate - theory) / theory, 0.3) << f.rate << " vs " << theory;
  }
}

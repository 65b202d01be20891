/* Copyright 2026 The XCT Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "xct/solver.hpp"

namespace xct {
namespace {

struct Problem {
  ScanGeometry g;
  CsrMatrix a;
  MultiVector y;
};

Problem MakeProblem(int n, int k, int slices, PhantomKind kind = PhantomKind::kSheppLogan) {
  Problem p;
  p.g = MakeGeometry(k, slices, n, 0.0, kPi);
  p.a = BuildSystemMatrix(p.g);
  const Volume x = GeneratePhantom(kind, n, slices, 5);
  const Volume y = SimulateMeasurements(p.g, p.a, x, 0.0, 0);
  p.y = MultiVector(p.a.num_rows, slices);
  p.y.values = y.values;
  return p;
}

double MaxRelDiff(const MultiVector& a, const MultiVector& b) {
  double err = 0.0, peak = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    err = std::max(err, std::abs(a.values[i] - b.values[i]));
    peak = std::max(peak, std::abs(b.values[i]));
  }
  return err / peak;
}

SolveConfig Iters(int n, Precision p = Precision::kDouble) {
  SolveConfig c;
  c.max_iters = n;
  c.precision = p;
  return c;
}

PartitionConfig Partition(int pd, Precision p = Precision::kDouble, int ff = 4) {
  PartitionConfig c;
  c.pd = pd;
  c.precision = p;
  c.ffactor = ff;
  return c;
}

// Returns NaN from the chosen projection onwards.
class PoisonedOperator : public LinearOperator {
 public:
  PoisonedOperator(CsrMatrix a, std::size_t bad_from) : inner_(std::move(a)), bad_from_(bad_from) {}
  std::size_t rows() const override { return inner_.rows(); }
  std::size_t cols() const override { return inner_.cols(); }
  Precision precision() const override { return Precision::kMixed; }
  MultiVector Apply(const MultiVector& x) override {
    MultiVector out = inner_.Apply(x);
    if (++calls_ >= bad_from_) out.values[0] = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  MultiVector ApplyTranspose(const MultiVector& y) override { return inner_.ApplyTranspose(y); }

 private:
  ReferenceOperator inner_;
  std::size_t bad_from_;
  std::size_t calls_ = 0;
};

TEST(SolveConfig, Validation) {
  SolveConfig c;
  EXPECT_NO_THROW(c.Validate());
  c.max_iters = 0;
  EXPECT_THROW(c.Validate(), std::invalid_argument);
  c.max_iters = 10;
  c.early_stop_iters = 11;
  EXPECT_THROW(c.Validate(), std::invalid_argument);
  c.early_stop_iters = 10;
  EXPECT_NO_THROW(c.Validate());
  c.ffactor = 51;
  EXPECT_THROW(c.Validate(), std::invalid_argument);
}

TEST(Cgls, IdentityConvergesInOneStep) {
  ReferenceOperator op(Identity(20));
  MultiVector y(20, 3);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> gauss;
  for (double& v : y.values) v = gauss(rng);
  const SolveResult r = CglsSolve(op, y, Iters(10));
  EXPECT_EQ(r.iterations, 1);
  ASSERT_EQ(r.residual_history.size(), 1u);
  EXPECT_EQ(r.residual_history[0], 0.0);
  for (std::size_t i = 0; i < y.values.size(); ++i) EXPECT_NEAR(r.x.values[i], y.values[i], 1e-15);
}

TEST(Cgls, MatchesKrylovOracle) {
  const Problem p = MakeProblem(16, 24, 1);
  std::vector<double> y(p.y.values.begin(), p.y.values.end());
  for (int k : {1, 3, 6}) {
    ReferenceOperator op(p.a);
    const SolveResult r = CglsSolve(op, p.y, Iters(k));
    const std::vector<double> want = oracle::KrylovLeastSquares(p.a, y, k);
    MultiVector w(want.size(), 1);
    w.values = want;
    EXPECT_LE(MaxRelDiff(r.x, w), 1e-8) << "k=" << k;
  }
}

TEST(Cgls, OperatorCountsAndHistory) {
  const Problem p = MakeProblem(32, 48, 2);
  ReferenceOperator op(p.a);
  const SolveResult r = CglsSolve(op, p.y, Iters(30));
  EXPECT_EQ(r.iterations, 30);
  EXPECT_EQ(r.counters.projections, 30u);
  EXPECT_EQ(r.counters.backprojections, 31u);
  ASSERT_EQ(r.residual_history.size(), 30u);
  ASSERT_EQ(r.time_history.size(), 30u);
  for (std::size_t i = 0; i < 30; ++i) {
    EXPECT_TRUE(std::isfinite(r.residual_history[i]));
    if (i > 0) {
      EXPECT_LE(r.residual_history[i], r.residual_history[i - 1] * (1 + 1e-10));
      EXPECT_GE(r.time_history[i], r.time_history[i - 1]);
    }
  }
}

TEST(Cgls, ResidualMatchesDirectEvaluation) {
  const Problem p = MakeProblem(16, 24, 2);
  ReferenceOperator op(p.a);
  const SolveResult r = CglsSolve(op, p.y, Iters(8));
  const MultiVector ax = SpmmReference(p.a, r.x);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < ax.values.size(); ++i) {
    num += (p.y.values[i] - ax.values[i]) * (p.y.values[i] - ax.values[i]);
    den += p.y.values[i] * p.y.values[i];
  }
  EXPECT_NEAR(r.residual_history.back(), std::sqrt(num / den), 1e-10);
}

TEST(Cgls, EarlyStop) {
  const Problem p = MakeProblem(16, 24, 1);
  SolveConfig c = Iters(30);
  c.early_stop_iters = 24;
  ReferenceOperator op(p.a);
  const SolveResult r = CglsSolve(op, p.y, c);
  EXPECT_EQ(r.iterations, 24);
  EXPECT_EQ(r.counters.projections, 24u);
  EXPECT_EQ(r.counters.backprojections, 25u);

  c.early_stop_iters = 1;
  ReferenceOperator op1(p.a);
  const SolveResult first = CglsSolve(op1, p.y, c);
  ReferenceOperator op2(p.a);
  const SolveResult one = CglsSolve(op2, p.y, Iters(1));
  EXPECT_EQ(first.iterations, 1);
  EXPECT_EQ(first.x.values, one.x.values);

  EXPECT_FALSE(EarlyStop(Iters(30), std::vector<double>(29, 1.0)));
  EXPECT_THROW(EarlyStop(c, {}), std::invalid_argument);
}

TEST(Cgls, DivergenceNamesIterationAndMode) {
  const Problem p = MakeProblem(16, 24, 1);
  PoisonedOperator op(p.a, 3);
  try {
    CglsSolve(op, p.y, Iters(10));
    FAIL() << "expected divergence";
  } catch (const SolverDivergence& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("iteration 3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("mixed"), std::string::npos) << msg;
  }
}

TEST(Cgls, RejectsShapeMismatch) {
  ReferenceOperator op(Identity(4));
  EXPECT_THROW(CglsSolve(op, MultiVector(5, 1), Iters(2)), std::invalid_argument);
}

TEST(PartitionedOperator, MatchesReferenceProducts) {
  const Problem p = MakeProblem(32, 48, 3);
  ReferenceOperator ref(p.a);
  PartitionedOperator op(p.g, p.a, Partition(4));
  const MultiVector ax = op.Apply(MultiVector(p.a.num_cols, 3));
  for (double v : ax.values) EXPECT_EQ(v, 0.0);
  MultiVector x(p.a.num_cols, 3);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (double& v : x.values) v = unit(rng);
  EXPECT_LE(MaxRelDiff(op.Apply(x), ref.Apply(x)), 1e-12);
  EXPECT_LE(MaxRelDiff(op.ApplyTranspose(p.y), ref.ApplyTranspose(p.y)), 1e-12);
  EXPECT_EQ(op.counters().projections, 2u);
  EXPECT_EQ(op.counters().backprojections, 1u);
  EXPECT_GT(op.counters().comm_bytes, 0.0);
  EXPECT_GT(op.counters().flops, 0.0);
  EXPECT_EQ(op.tomogram_parts().size(), 4u);
  EXPECT_EQ(op.projection_plan().levels.size(), 3u);
}

TEST(PartitionedOperator, ReducedPrecisionProductsWithinTolerance) {
  const Problem p = MakeProblem(32, 48, 2);
  ReferenceOperator ref(p.a);
  MultiVector x(p.a.num_cols, 2);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (double& v : x.values) v = unit(rng);
  const MultiVector want = ref.Apply(x);
  for (auto [mode, tol] : {std::pair{Precision::kSingle, 1e-5}, std::pair{Precision::kMixed, 2e-3},
                           std::pair{Precision::kHalf, 2e-2}}) {
    PartitionedOperator op(p.g, p.a, Partition(4, mode));
    EXPECT_LE(MaxRelDiff(op.Apply(x), want), tol) << PrecisionName(mode);
    EXPECT_EQ(op.quantization().underflows, 0u);
  }
}

TEST(PartitionedOperator, PartitionInvariance) {
  const Problem p = MakeProblem(32, 48, 3);
  std::vector<MultiVector> xs;
  for (int pd : {1, 4, 6}) {
    PartitionedOperator op(p.g, p.a, Partition(pd));
    xs.push_back(CglsSolve(op, p.y, Iters(5)).x);
  }
  EXPECT_LE(MaxRelDiff(xs[1], xs[0]), 1e-10);
  EXPECT_LE(MaxRelDiff(xs[2], xs[0]), 1e-10);
}

// Rounding differences from the summation order grow along the Krylov
// recurrence, so long runs agree to a looser bound.
TEST(PartitionedOperator, PartitionInvarianceLongRun) {
  const Problem p = MakeProblem(32, 48, 3);
  std::vector<SolveResult> runs;
  for (int pd : {1, 4, 6}) {
    PartitionedOperator op(p.g, p.a, Partition(pd));
    runs.push_back(CglsSolve(op, p.y, Iters(30)));
  }
  for (std::size_t k = 1; k < runs.size(); ++k) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < runs[0].x.values.size(); ++i) {
      const double d = runs[k].x.values[i] - runs[0].x.values[i];
      num += d * d;
      den += runs[0].x.values[i] * runs[0].x.values[i];
    }
    EXPECT_LE(std::sqrt(num / den), 1e-4);
    EXPECT_NEAR(runs[k].residual_history.back(), runs[0].residual_history.back(),
                1e-3 * runs[0].residual_history.back());
  }
}

TEST(PartitionedOperator, BatchGroupsAndDirectPlansAgree) {
  const Problem p = MakeProblem(32, 48, 5);
  PartitionConfig base = Partition(4);
  PartitionedOperator one(p.g, p.a, base);
  base.pb = 2;
  base.hierarchical = false;
  PartitionedOperator two(p.g, p.a, base);
  EXPECT_EQ(two.placement().slots.size(), 8u);
  const MultiVector a = CglsSolve(one, p.y, Iters(6)).x;
  const MultiVector b = CglsSolve(two, p.y, Iters(6)).x;
  EXPECT_LE(MaxRelDiff(a, b), 1e-10);
}

TEST(PartitionedOperator, FfactorInvariance) {
  const Problem p = MakeProblem(32, 48, 3);
  for (auto [mode, tol] : {std::pair{Precision::kDouble, 1e-10}, std::pair{Precision::kMixed, 0.0}}) {
    PartitionedOperator f1(p.g, p.a, Partition(4, mode, 1));
    PartitionedOperator f16(p.g, p.a, Partition(4, mode, 16));
    const MultiVector a = CglsSolve(f1, p.y, Iters(8, mode)).x;
    const MultiVector b = CglsSolve(f16, p.y, Iters(8, mode)).x;
    EXPECT_LE(MaxRelDiff(a, b), tol) << PrecisionName(mode);
  }
}

TEST(PartitionedOperator, NormalizationTransparentInDouble) {
  const Problem p = MakeProblem(32, 48, 2);
  PartitionConfig c = Partition(4);
  PartitionedOperator with(p.g, p.a, c);
  c.normalize = false;
  PartitionedOperator without(p.g, p.a, c);
  const MultiVector a = CglsSolve(with, p.y, Iters(5)).x;
  const MultiVector b = CglsSolve(without, p.y, Iters(5)).x;
  EXPECT_LE(MaxRelDiff(a, b), 1e-12);
}

TEST(PartitionedOperator, WorkerCountIsInvisible) {
  const Problem p = MakeProblem(32, 48, 3);
  PartitionConfig c = Partition(6, Precision::kMixed);
  PartitionedOperator serial(p.g, p.a, c);
  c.workers = 4;
  PartitionedOperator threaded(p.g, p.a, c);
  EXPECT_EQ(CglsSolve(serial, p.y, Iters(5, Precision::kMixed)).x.values,
            CglsSolve(threaded, p.y, Iters(5, Precision::kMixed)).x.values);
}

TEST(PartitionedOperator, RejectsBadConfig) {
  const Problem p = MakeProblem(16, 24, 1);
  EXPECT_THROW(PartitionedOperator(p.g, p.a, Partition(0)), std::invalid_argument);
  EXPECT_THROW(PartitionedOperator(p.g, p.a, Partition(1, Precision::kDouble, 60)), std::invalid_argument);
  EXPECT_THROW(PartitionedOperator(p.g, p.a, Partition(5)), std::invalid_argument);
  const auto other = MakeGeometry(24, 1, 8, 0.0, kPi);
  EXPECT_THROW(PartitionedOperator(other, p.a, Partition(1)), std::invalid_argument);
}

TEST(MixedPrecision, ConvergesAndDecreasesEarly) {
  const Problem p = MakeProblem(32, 48, 2);
  PartitionedOperator op(p.g, p.a, Partition(4, Precision::kMixed));
  const SolveResult r = CglsSolve(op, p.y, Iters(24, Precision::kMixed));
  ASSERT_EQ(r.residual_history.size(), 24u);
  for (std::size_t i = 1; i < 10; ++i) EXPECT_LT(r.residual_history[i], r.residual_history[i - 1]);
  EXPECT_LT(r.residual_history.back(), 0.05);
}

TEST(Report, Columns) {
  EXPECT_THROW(ResidualCurveReport({}), std::invalid_argument);
  EXPECT_THROW(ResidualCurveReport({{"double", {}, {}}}), std::invalid_argument);
  const std::string csv = ResidualCurveReport(
      {{"double", {0.5, 0.25}, {0.1, 0.2}}, {"mixed", {0.5, 0.3, 0.2}, {0.1, 0.2, 0.3}}});
  std::istringstream in(csv);
  std::string header, line;
  std::getline(in, header);
  EXPECT_EQ(header, "iteration,double_residual,double_time_s,mixed_residual,mixed_time_s");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 4);
  }
  EXPECT_EQ(rows, 3);
}

}  // namespace
}  // namespace xct

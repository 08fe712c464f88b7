#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "planted.hpp"
#include "rbstc/errors.hpp"
#include "rbstc/stability.hpp"

using namespace rbstc;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd diag(std::initializer_list<double> d) {
  VectorXd v(static_cast<int>(d.size()));
  int i = 0;
  for (double x : d) v(i++) = x;
  return v.asDiagonal();
}

struct Setup {
  Partition part;
  std::vector<MatrixXd> gs;
  ConeView view;
  Spectrum spec;
};

// Region 0 is a narrow cone around `axis` (polyhedral), region 1 the rest.
Setup around(const MatrixXd& g, const VectorXd& axis, double h = 0.5) {
  const int n = static_cast<int>(g.rows());
  Eigen::JacobiSVD<MatrixXd> svd(axis.transpose(), Eigen::ComputeFullV);
  MatrixXd perp = svd.matrixV().rightCols(n - 1);
  MatrixXd normals(2 * (n - 1), n);
  for (int j = 0; j < n - 1; ++j) {
    normals.row(2 * j) = (h * axis.normalized() + perp.col(j)).transpose();
    normals.row(2 * j + 1) = (h * axis.normalized() - perp.col(j)).transpose();
  }
  Setup s{Partition::polyhedral({normals, MatrixXd::Zero(1, n)}, {0.1, 0.2}),
          {g, MatrixXd::Identity(n, n)}, {}, eig(g)};
  s.view = region_view(s.part, s.gs, 0);
  return s;
}

Setup whole(const MatrixXd& g) {
  Setup s{planted::whole_space(static_cast<int>(g.rows())), {g}, {}, eig(g)};
  s.view = region_view(s.part, s.gs, 0);
  return s;
}

const PisCandidate& only_pir(const std::vector<PisCandidate>& c) {
  EXPECT_EQ(c.size(), 1u);
  return c.at(0);
}

}  // namespace

TEST(Classify, DominantSimpleRayIsAsymptoticallyStable) {
  auto s = around(diag({2, 1, 0.5}), VectorXd::Unit(3, 0));
  auto c_all = find_pirs(s.view, s.spec);
  const auto& c = only_pir(c_all);
  auto v = classify(c, s.view, s.spec);
  EXPECT_EQ(v.verdict, Verdict::AsymptoticallyStable);
  EXPECT_EQ(v.defective, Defect::No);
  EXPECT_GT(v.interior_margin, 0.0);
  EXPECT_EQ(v.partition.q2.size(), 1u);
  EXPECT_EQ(v.partition.q4.size(), 2u);
  ProbeOptions opt;
  EXPECT_EQ(empirical_probe(c, s.view, s.part, s.gs, opt).verdict, Verdict::AsymptoticallyStable);
}

TEST(Classify, SubdominantRayIsUnstable) {
  auto s = around(diag({2, 1, 0.5}), VectorXd::Unit(3, 1));
  auto c_all = find_pirs(s.view, s.spec);
  const auto& c = only_pir(c_all);
  auto v = classify(c, s.view, s.spec);
  EXPECT_EQ(v.verdict, Verdict::Unstable);
  EXPECT_EQ(v.partition.q1.size(), 1u);
  EXPECT_EQ(empirical_probe(c, s.view, s.part, s.gs).verdict, Verdict::Unstable);
}

TEST(Classify, RotationPlaneIsStableNotAsymptotic) {
  // G orthogonal on a plane, with an equal-magnitude eigenvalue off it
  MatrixXd g = MatrixXd::Zero(3, 3);
  g.topLeftCorner(2, 2) << std::cos(1.0), -std::sin(1.0), std::sin(1.0), std::cos(1.0);
  g(2, 2) = 1.0;
  auto s = whole(g);
  auto subs = find_invariant_subspaces(s.view, s.spec);
  const PisCandidate* plane = nullptr;
  for (const auto& c : subs)
    if (c.kind == PisCandidate::Kind::Plane) plane = &c;
  ASSERT_NE(plane, nullptr);
  auto v = classify(*plane, s.view, s.spec);
  EXPECT_EQ(v.verdict, Verdict::Stable);
  EXPECT_EQ(empirical_probe(*plane, s.view, s.part, s.gs).verdict, Verdict::Stable);
}

TEST(Classify, HypothesisViolationOnBoundary) {
  // eigenvector on the boundary x1 = 0 of region 0 = {x1 >= 0}
  MatrixXd n0(1, 2);
  n0 << 1, 0;
  auto part = Partition::polyhedral({n0, -n0}, {0.1, 0.2});
  std::vector<MatrixXd> gs{diag({1, 2}), MatrixXd::Identity(2, 2)};
  auto view = region_view(part, gs, 0);
  auto spec = eig(gs[0]);
  auto pirs = find_pirs(view, spec);
  const PisCandidate* e2 = nullptr;
  for (const auto& p : pirs)
    if (std::abs(p.rays[0](1)) > 0.5) e2 = &p;
  ASSERT_NE(e2, nullptr);
  EXPECT_THROW(classify(*e2, view, spec), HypothesisViolation);
}

TEST(Classify, UnsupportedForms) {
  auto s = whole(diag({2, -2}));
  auto u = find_union_of_rays(s.view, s.spec);
  ASSERT_FALSE(u.candidates.empty());
  EXPECT_THROW(classify(u.candidates[0], s.view, s.spec), UnsupportedCandidate);

  auto w = whole(diag({2, 1, 0.5}));
  auto subs = find_invariant_subspaces(w.view, w.spec);
  const PisCandidate* multi = nullptr;
  for (const auto& c : subs)
    if (c.kind == PisCandidate::Kind::Subspace && c.clusters.size() > 1) multi = &c;
  ASSERT_NE(multi, nullptr);
  EXPECT_THROW(classify(*multi, w.view, w.spec), UnsupportedCandidate);

  PisCandidate bare = find_pirs(w.view, w.spec)[0];
  EXPECT_THROW(classify_general(bare, w.view, w.spec), UnsupportedCandidate);
}

TEST(ClassifyGeneral, TwoRayUnionCases) {
  auto s = whole(diag({2, -2}));
  for (const auto& c : find_union_of_rays(s.view, s.spec).candidates) {
    auto v = classify_general(c, s.view, s.spec);
    EXPECT_EQ(v.verdict, Verdict::Stable);
    EXPECT_EQ(classify_any(c, s.view, s.spec).verdict, Verdict::Stable);
  }
}

TEST(ClassifyGeneral, PlantedUnionStableAndDominantOutsiderUnstable) {
  std::mt19937_64 rng(71);
  for (bool outsider : {false, true}) {
    planted::JordanBuilder jb(5);
    jb.real(1.0).real(-1.0).real(outsider ? 1.7 : 0.5).real(-0.3).real(0.1);
    auto in = planted::make(jb.j, rng, "");
    VectorXd v0 = in.V.col(0).normalized(), v1 = in.V.col(1).normalized();
    VectorXd r1 = (v0 + v1).normalized(), r2 = (v0 - v1).normalized();
    auto part = build_cone_partition({r1, r2, -r1, -r2, in.V.col(2).normalized()}, {0.2, 0.2, 0.1, 0.15, 0.3});
    std::vector<MatrixXd> gs{MatrixXd::Identity(5, 5), MatrixXd::Identity(5, 5), in.G,
                             MatrixXd::Identity(5, 5)};
    auto view = region_view(part, gs, 2);
    auto spec = eig(in.G);
    const PisCandidate* u = nullptr;
    auto found = find_union_of_rays(view, spec);
    for (const auto& c : found.candidates)
      if (c.verified && c.distance(r1) < 1e-8 && c.distance(r2) < 1e-8) u = &c;
    ASSERT_NE(u, nullptr);
    auto v = classify_general(*u, view, spec);
    EXPECT_EQ(v.verdict, outsider ? Verdict::Unstable : Verdict::Stable);
    EXPECT_EQ(empirical_probe(*u, view, part, gs).verdict, outsider ? Verdict::Unstable : Verdict::Stable);
  }
}

TEST(Classify, VerdictLatticeOnTheoremSuite) {
  std::mt19937_64 rng(72);
  for (int k = 0; k < 3 * planted::kTheoremBranches; ++k) {
    auto tc = planted::theorem_case(k, rng);
    auto s = whole(tc.in.G);
    auto cands = find_pirs(s.view, s.spec);
    for (auto& c : find_invariant_subspaces(s.view, s.spec)) cands.push_back(c);
    const PisCandidate* c = planted::pick(cands, tc);
    ASSERT_NE(c, nullptr) << tc.in.branch;
    auto v = classify(*c, s.view, s.spec);
    EXPECT_EQ(v.verdict, tc.expected) << tc.in.branch;
    std::map<std::string, std::string> r;
    for (const auto& cl : v.reasons) r[cl.name] = cl.value;
    if (v.verdict == Verdict::AsymptoticallyStable) {
      EXPECT_EQ(r["stable"], "true");
      EXPECT_EQ(r["others_strictly_smaller"], "true");
    }
    if (v.verdict == Verdict::Unstable) EXPECT_EQ(r["stable"], "false");
    if (v.verdict == Verdict::Stable) EXPECT_EQ(r["asymptotically_stable"], "false");
    // defective stability implies asymptotic stability
    if (v.defective == Defect::Yes && r["stable"] == "true") {
      EXPECT_EQ(v.verdict, Verdict::AsymptoticallyStable);
    }
    EXPECT_EQ(v.partition.q1.size() + v.partition.q2.size() + v.partition.q3.size() +
                  v.partition.q4.size(),
              5u);
  }
}

TEST(Probe, SerialAndParallelAgree) {
  auto s = around(diag({2, 1, 0.5}), VectorXd::Unit(3, 0));
  auto c_all = find_pirs(s.view, s.spec);
  const auto& c = only_pir(c_all);
  ProbeOptions a, b;
  a.exec = Exec::Serial;
  b.exec = Exec::Parallel;
  set_max_threads(4);
  auto ra = empirical_probe(c, s.view, s.part, s.gs, a);
  auto rb = empirical_probe(c, s.view, s.part, s.gs, b);
  set_max_threads(0);
  ASSERT_EQ(ra.levels.size(), rb.levels.size());
  for (size_t i = 0; i < ra.levels.size(); ++i) {
    EXPECT_EQ(ra.levels[i].max_distance, rb.levels[i].max_distance);
    EXPECT_EQ(ra.levels[i].final_distance, rb.levels[i].final_distance);
  }
}

#include <gtest/gtest.h>

#include "helpers.hpp"

using namespace lplab;

namespace {

SpaceParams params(double s, double p, double q, int L = 1) {
  SpaceParams P;
  P.s = s;
  P.p = p;
  P.q = q;
  P.L = L;
  return P;
}

SampledField single_band(const GridSpec& g, int j, std::uint64_t seed) {
  TestFunctionSpec s;
  s.family = "random_band";
  s.band = j;
  s.seed = seed;
  return band_project(sample_family(s, g), build_band_system(g), j);
}

}  // namespace

TEST(Scaling, SingleBandLpExact) {
  GridSpec g = th::grid(1, 1024);
  SampledField f = dyadic_dilate(single_band(g, 4, 3), 1);
  for (Scale sc : {Scale::F, Scale::B})
    for (double s : {0.5, 1.25}) {
      SpaceParams P = params(s, 2, 2);
      P.scale = sc;
      ScalingReport r = scaling_experiment(f, "lp", P, QuadratureSpec{}, {-1, 0, 1});
      EXPECT_TRUE(r.pass);
      EXPECT_DOUBLE_EQ(r.expected_exponent, s - 0.5);
      for (const auto& e : r.entries) {
        if (e.m == 0) {
          EXPECT_EQ(e.ratio, 1.0);
          continue;
        }
        EXPECT_NEAR(e.measured_exponent, s - 0.5, 1e-10);
      }
    }
}

TEST(Scaling, DifferenceRatio) {
  GridSpec g = th::grid(1, 1024);
  TestFunctionSpec s;
  s.sigma = 0.05;
  s.bandlimit = 96.0;
  SampledField f = sample_family(s, g);
  ScalingReport r = scaling_experiment(f, "diff", params(0.75, 2, 2), QuadratureSpec{}, {0, 1});
  EXPECT_EQ(r.entries[0].ratio, 1.0);
  EXPECT_NEAR(r.entries[1].ratio, std::exp2(0.25), 0.05 * std::exp2(0.25));
  EXPECT_TRUE(r.pass);
  EXPECT_DOUBLE_EQ(r.tolerance, 0.07);
}

TEST(Scaling, AliasingPropagates) {
  GridSpec g = th::grid(1, 256);
  try {
    scaling_experiment(th::mode(g, {100, 0, 0}), "lp", params(0.5, 2, 2), QuadratureSpec{}, {1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::AliasingError);
  }
}

TEST(Equivalence, IdenticalPair) {
  GridSpec g = th::grid(1, 1024);
  auto corpus = default_corpus(g, 128.0);
  corpus.resize(4);
  EquivalenceReport r = equivalence_experiment(corpus, "lp", "lp", params(0.5, 2, 2), g, QuadratureSpec{});
  EXPECT_EQ(r.spread, 1.0);
  EXPECT_EQ(r.dilation_drift, 0.0);
  for (const auto& e : r.entries) EXPECT_EQ(e.ratio, 1.0);
  EXPECT_EQ(r.verdict, "PASS");
}

TEST(Equivalence, SingleBandDrift) {
  GridSpec g = th::grid(1, 1024);
  TestFunctionSpec s;
  s.family = "random_band";
  s.band = 4;
  s.seed = 5;
  s.id = "band4";
  EquivalenceReport r = equivalence_experiment({s}, "lp", "diff", params(0.5, 2, 2), g, QuadratureSpec{});
  ASSERT_EQ(r.entries.size(), 1u);
  EXPECT_FALSE(r.entries[0].excluded);
  EXPECT_LE(r.dilation_drift, 1e-3);
  EXPECT_TRUE(r.hypothesis.satisfied);
}

TEST(Equivalence, OutsideWindowIsNoVerdict) {
  GridSpec g = th::grid(2, 64);
  auto corpus = default_corpus(g, 7.0);
  corpus.resize(2);
  SpaceParams P = params(0.5, 2, 2, 2);
  P.r = 1.5;
  QuadratureSpec q;
  q.tau_octaves = 2;
  EquivalenceReport r = equivalence_experiment(corpus, "lp", "max:S", P, g, q);
  EXPECT_FALSE(r.hypothesis.satisfied);
  EXPECT_EQ(r.verdict, "NO-VERDICT");
  EXPECT_EQ(r.entries.size(), 2u);
}

TEST(Ppn, IdentityCase) {
  GridSpec g = th::grid(1, 1024);
  SampledField u = th::random_bandlimited(g, 8.0, 2);
  for (double p : {1.0, 2.0, kInf}) {
    PPNReport r = ppn_probe(u, 8.0, {0}, p, p, {8.0, 16.0, 32.0});
    for (double v : r.ratios) EXPECT_EQ(v, 1.0);
    EXPECT_TRUE(r.pass);
  }
}

TEST(Ppn, FirstDerivativeStable) {
  GridSpec g = th::grid(1, 1024);
  SampledField u = th::random_bandlimited(g, 8.0, 3);
  PPNReport r = ppn_probe(u, 8.0, {1}, 2.0, 2.0, {8.0, 16.0, 32.0});
  EXPECT_LE(r.max_over_min, 1.01);
  EXPECT_TRUE(r.pass);
  try {
    ppn_probe(u, 8.0, {1}, 2.0, 1.0, {8.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidExponent);
  }
}

TEST(KernelDecay, WindowGeometry) {
  GridSpec g{2, 256, 128.0};
  KernelWindow w;
  w.a = 0.25;
  w.b = 2.0;
  w.c = 2.0;
  w.gauss = 0.0;
  KernelDecayReport r = kernel_decay_probe(w, 1, 4, g, {1.0, 2.0}, 1);
  EXPECT_TRUE(std::isfinite(r.slope));
  EXPECT_TRUE(std::isfinite(r.amplitude_ratio));
  EXPECT_LT(r.slope, 0.0);
  w.rescale = 0;
  try {
    kernel_decay_probe(w, 1, 4, g, {1.0, 2.0}, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::GeometryViolated);
  }
  EXPECT_THROW(kernel_decay_probe(KernelWindow{}, 0, 4, g, {1.0}, 1), Error);
}

TEST(KernelDecay, AmplitudeAcrossTau) {
  GridSpec g{2, 256, 128.0};
  KernelDecayReport r = kernel_decay_probe(KernelWindow{}, 1, 4, g, {1.0, 2.0}, 1);
  EXPECT_LE(r.amplitude_ratio, 2.0);
  EXPECT_LE(r.slope, -3.5);
}

TEST(Divergence, Rates) {
  GridSpec g = th::grid(1, 1024);
  TestFunctionSpec s;
  s.sigma = 0.05;
  SampledField f = sample_family(s, g);
  DivergenceReport up = divergence_probe(f, params(2.0, 2, 2, 1), QuadratureSpec{}, 4);
  EXPECT_EQ(up.verdict, "DIVERGENT-GEOMETRIC");
  for (double gr : up.growth) EXPECT_NEAR(gr, 2.0, 0.6);
  DivergenceReport down = divergence_probe(f, params(0.5, 2, 2, 1), QuadratureSpec{}, 4);
  EXPECT_EQ(down.verdict, "CONVERGENT");
  EXPECT_LT(down.growth.back(), 1.05);
  DivergenceReport zero = divergence_probe(th::constant(g, 1.0), params(2.0, 2, 2, 1), QuadratureSpec{}, 2);
  EXPECT_EQ(zero.verdict, "CONVERGENT-ZERO");
}

TEST(Slice, Support) {
  GridSpec g = th::grid(2, 64);
  DyadicBandSystem sys = build_band_system(g);
  SampledField f = th::noise(g, 3);
  for (int j = sys.j_min(); j <= sys.j_max(); ++j)
    for (int axis : {1, 2}) EXPECT_LE(slice_support_check(f, sys, j, axis).max_violation, 1e-12);
  EXPECT_EQ(slice_support_check(th::constant(g, 0.0), sys, 2, 1).max_violation, 0.0);
  SampledField fj = add(band_project(f, sys, 2), th::mode(g, {20, 0, 0}), 0.01);
  SliceReport bad = slice_violation(fj, 2, 1);
  EXPECT_GT(bad.max_violation, 1e-6);
  EXPECT_FALSE(bad.pass);
  try {
    slice_support_check(th::noise(th::grid(1, 64), 1), build_band_system(th::grid(1, 64)), 2, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimensionTooLow);
  }
}

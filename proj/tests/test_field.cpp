#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>

#include "helpers.hpp"

using namespace lplab;

TEST(Field, MakeFieldBasics) {
  GridSpec g = th::grid(1, 64);
  EXPECT_EQ(lp_norm(th::constant(g, 0.0), 2.0), 0.0);
  EXPECT_DOUBLE_EQ(th::constant(g, 1.0).max_abs(), 1.0);
  try {
    make_field(std::vector<double>(63, 1.0), g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ShapeMismatch);
  }
  std::vector<double> v(64, 0.0);
  v[5] = std::nan("");
  try {
    make_field(v, g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonFiniteSample);
  }
}

TEST(Field, BadGrid) {
  EXPECT_THROW(th::constant(th::grid(1, 100), 1.0), Error);
  EXPECT_THROW(th::constant(th::grid(4, 8), 1.0), Error);
}

TEST(Corpus, GaussianPeak) {
  GridSpec g = th::grid(1, 512);
  TestFunctionSpec s;
  s.sigma = 0.05;
  s.center = {0.5};
  SampledField f = sample_family(s, g);
  EXPECT_DOUBLE_EQ(f[256].real(), 1.0);
}

TEST(Corpus, RandomBandSpectrum) {
  GridSpec g = th::grid(1, 512);
  TestFunctionSpec s;
  s.family = "random_band";
  s.band = 3;
  s.seed = 7;
  SpectralField c = dft_forward(sample_family(s, g));
  double inside = 0.0, outside = 0.0;
  for_each_mode(g, [&](std::size_t idx, const std::array<double, 3>& xi) {
    double r = std::abs(xi[0]), a = std::abs(c.coeffs()[idx]);
    if (r >= 4.0 && r < 16.0)
      inside = std::max(inside, a);
    else
      outside = std::max(outside, a);
  });
  EXPECT_GT(inside, 0.0);
  EXPECT_LE(outside, 1e-15 * inside);
}

TEST(Corpus, WindowedPolynomialAnnihilated) {
  GridSpec g = th::grid(1, 512);
  TestFunctionSpec s;
  s.family = "windowed_polynomial";
  s.sigma = 0.05;
  s.coeffs = {0.25, 1.0};
  SampledField f = sample_family(s, g);
  double t = 2.0 * g.spacing();
  SampledField d = axis_difference(f, t, 1, 2);
  double worst = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    double x = f.coord(i, 0) - 0.5;
    if (x >= -s.sigma && x + 2.0 * t <= s.sigma) worst = std::max(worst, std::abs(d[i]));
  }
  EXPECT_LE(worst, 1e-12);
}

TEST(Corpus, Errors) {
  GridSpec g = th::grid(1, 256);
  TestFunctionSpec s;
  s.sigma = 1e-4;
  EXPECT_THROW(sample_family(s, g), Error);
  s = TestFunctionSpec{};
  s.family = "random_band";
  s.band = 12;
  EXPECT_THROW(sample_family(s, g), Error);
  s.family = "nope";
  EXPECT_THROW(sample_family(s, g), Error);
}

TEST(Corpus, DefaultCorpusDeterministic) {
  GridSpec g = th::grid(1, 1024);
  auto specs = default_corpus(g, 128.0);
  ASSERT_EQ(specs.size(), 12u);
  for (const auto& s : specs) {
    SampledField a = sample_family(s, g), b = sample_family(s, g);
    EXPECT_EQ(a.samples(), b.samples()) << s.id;
    EXPECT_TRUE(a.is_real()) << s.id;
  }
}

TEST(Dft, ConstantAndMode) {
  GridSpec g = th::grid(1, 64);
  SpectralField c = dft_forward(th::constant(g, 1.0));
  EXPECT_NEAR(std::abs(c.at({0, 0, 0})), 1.0, 1e-15);
  double rest = 0.0;
  for (std::size_t i = 1; i < c.coeffs().size(); ++i) rest = std::max(rest, std::abs(c.coeffs()[i]));
  EXPECT_LE(rest, 1e-15);

  SpectralField m = dft_forward(th::mode(g, {3, 0, 0}));
  for (std::size_t i = 0; i < m.coeffs().size(); ++i)
    EXPECT_NEAR(std::abs(m.coeffs()[i]), i == 3 ? 1.0 : 0.0, 1e-13);
}

TEST(Dft, Roundtrip) {
  for (int dim = 1; dim <= 3; ++dim) {
    GridSpec g = th::grid(dim, dim == 3 ? 16 : 64);
    SampledField f = th::noise(g, 100 + dim);
    SampledField back = dft_inverse(dft_forward(f));
    EXPECT_LE(max_abs_diff(f, back), 1e-12 * f.max_abs());
  }
}

TEST(Dft, Parseval) {
  GridSpec g = th::grid(2, 32, 2.0);
  for (int i = 0; i < 100; ++i) {
    SampledField f = th::noise(g, 1000 + i);
    SpectralField c = dft_forward(f);
    double coef = 0.0;
    for (const auto& v : c.coeffs()) coef += std::norm(v);
    double phys = std::pow(lp_norm(f, 2.0), 2);
    EXPECT_NEAR(coef * c.parseval_factor(), phys, 1e-10 * phys);
  }
}

TEST(LpNorm, ConstantAndHomogeneity) {
  GridSpec g = th::grid(2, 32);
  for (double p : {0.5, 1.0, 2.0, 3.5}) EXPECT_NEAR(lp_norm(th::constant(g, 2.5), p), 2.5, 1e-12);
  SampledField f = th::noise(g, 3);
  for (double p : {0.5, 1.0, 2.0, kInf}) EXPECT_NEAR(lp_norm(scale(f, cplx(0.0, -3.0)), p), 3.0 * lp_norm(f, p), 1e-12 * lp_norm(f, p));
  EXPECT_DOUBLE_EQ(lp_norm(f, kInf), f.max_abs());
  EXPECT_THROW(lp_norm(f, 0.0), Error);
  EXPECT_THROW(lp_norm(f, -1.0), Error);
}

TEST(LpNorm, GaussianClosedForm) {
  GridSpec g = th::grid(1, 1024);
  TestFunctionSpec s;
  s.sigma = 0.05;
  double expected = std::pow(s.sigma * s.sigma * kPi / 2.0, 0.25);
  EXPECT_NEAR(lp_norm(sample_family(s, g), 2.0), expected, 1e-6);
}

TEST(LpNorm, Monotone) {
  GridSpec g = th::grid(1, 128);
  SampledField f = th::noise(g, 5);
  std::vector<double> big = f.magnitudes();
  std::mt19937_64 gen(9);
  for (double& v : big) v += std::uniform_real_distribution<double>(0.0, 1.0)(gen);
  for (double p : {0.5, 1.0, 2.0, kInf}) EXPECT_GE(lp_norm(make_field(big, g), p), lp_norm(f, p));
}

TEST(Dilate, Basics) {
  GridSpec g = th::grid(1, 64);
  SampledField m3 = th::mode(g, {3, 0, 0});
  EXPECT_EQ(dyadic_dilate(m3, 0).samples(), m3.samples());
  EXPECT_LE(max_abs_diff(dyadic_dilate(m3, 1), th::mode(g, {6, 0, 0})), 1e-12);
  try {
    dyadic_dilate(m3, -1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonDivisibleSpectrum);
  }
  try {
    dyadic_dilate(th::mode(g, {20, 0, 0}), 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::AliasingError);
  }
}

TEST(Dilate, PointwiseAndInverse) {
  GridSpec g = th::grid(2, 32);
  SampledField f = th::random_bandlimited(g, 6.0, 21);
  SampledField d = dyadic_dilate(f, 1);
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto ix = unravel(g, i);
    std::array<std::int64_t, 3> y{2 * ix[0], 2 * ix[1], 0};
    EXPECT_NEAR(std::abs(d[i] - f[ravel(g, y)]), 0.0, 1e-12);
  }
  EXPECT_LE(max_abs_diff(dyadic_dilate(d, -1), f), 1e-12);
}

TEST(Translate, Properties) {
  GridSpec g = th::grid(2, 32);
  SampledField f = th::random_bandlimited(g, 10.0, 4);
  EXPECT_LE(max_abs_diff(translate(f, {0.0, 0.0}), f), 1e-14);
  double base = lp_norm(f, 2.0);
  for (auto sh : std::vector<std::vector<double>>{{0.013, 0.2}, {0.77, -0.31}})
    EXPECT_NEAR(lp_norm(translate(f, sh), 2.0), base, 1e-12 * base);
  EXPECT_LE(max_abs_diff(translate(f, {g.spacing(), 0.0}), index_shift(f, {1, 0, 0})), 1e-12);
  EXPECT_LE(max_abs_diff(translate(translate(f, {0.1, 0.02}), {0.03, -0.4}), translate(f, {0.13, -0.38})), 1e-12);
  EXPECT_THROW(translate(f, {0.1}), Error);
}

TEST(Io, Roundtrip) {
  GridSpec g = th::grid(2, 16, 3.0);
  SampledField f = add(th::noise(g, 8), th::mode(g, {1, 2, 0}), cplx(0.0, 1.0));
  std::string path = (std::filesystem::temp_directory_path() / "lplab_io_roundtrip.field").string();
  write_field(path, f);
  SampledField back = read_field(path);
  std::remove(path.c_str());
  EXPECT_EQ(back.grid(), g);
  EXPECT_EQ(back.samples(), f.samples());
  EXPECT_THROW(read_field("/nonexistent/lplab.field"), Error);
}

// Splits a 2-D field into dyadic bands and prints the L2 norm of each band.

#include <cstdio>

#include <lplab/lplab.hpp>

int main() {
  using namespace lplab;
  GridSpec g{2, 128, 1.0};
  TestFunctionSpec spec;
  spec.family = "weierstrass";
  spec.a = 0.5;
  spec.b = 3.0;
  spec.terms = 8;
  SampledField f = sample_family(spec, g);

  DyadicBandSystem sys = build_band_system(g);
  BandDecomposition d = decompose(f, sys, true);
  std::printf("lowpass  %10.6f\n", lp_norm(*d.lowpass, 2.0));
  for (const auto& b : d.bands) std::printf("band %2d  %10.6f\n", b.j, lp_norm(b.field, 2.0));
  std::printf("roundtrip error %.3g\n", max_abs_diff(reconstruct(d), f));
}

// Band and difference quasinorms of one gaussian across smoothness s.

#include <cstdio>

#include <lplab/lplab.hpp>

int main() {
  using namespace lplab;
  GridSpec g{1, 1024, 1.0};
  TestFunctionSpec spec;
  spec.family = "gaussian";
  spec.sigma = 0.05;
  SampledField f = sample_family(spec, g);

  std::printf("%5s %12s %12s %8s %s\n", "s", "lp", "diff", "ratio", "flag");
  for (double s : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    SpaceParams P;
    P.s = s;
    QuasinormResult a = evaluate(f, parse_characterization("lp"), P, QuadratureSpec{}, 0);
    QuasinormResult b = evaluate(f, parse_characterization("diff"), P, QuadratureSpec{}, 0);
    std::printf("%5.2f %12.6g %12.6g %8.4f %s\n", s, a.value, b.value, a.value / b.value, flag_name(b.flag));
  }
}

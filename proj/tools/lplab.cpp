#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include <lplab/lplab.hpp>

using lplab::json;

namespace {

struct Flags {
  std::string config, input, out, name, family = "gaussian", corpus, scale = "F";
  int dim = 1, N = 256, L = 1, levels = 4, j = -1000, axis = 0;
  double B = 1.0, s = 0.5, p = 2.0, q = 2.0, r = 1.0, sigma = 0.05, bandlimit = 0.0;
  bool inhomogeneous = false;
  std::vector<std::string> chars, pair;
  std::vector<int> m_values, orders;
  std::vector<double> h;
  std::string variant = "HL";
  double t = 1.0;
};

void common(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "JSON config; its values override flags");
  app->add_option("--dim", f.dim, "dimension");
  app->add_option("--N", f.N, "points per axis");
  app->add_option("--B", f.B, "box length");
  app->add_option("--s", f.s, "smoothness");
  app->add_option("--p", f.p, "integrability exponent");
  app->add_option("--q", f.q, "summability exponent");
  app->add_option("--L", f.L, "difference order");
  app->add_option("--r", f.r, "Peetre exponent");
  app->add_option("--scale,--space", f.scale, "F or B");
  app->add_flag("--inhomogeneous", f.inhomogeneous, "inhomogeneous variant");
  app->add_option("--family", f.family, "test function family");
  app->add_option("--sigma", f.sigma, "test function width");
  app->add_option("--corpus", f.corpus, "'default' for the built-in corpus");
  app->add_option("--bandlimit", f.bandlimit, "spectral cutoff for the default corpus");
  app->add_option("--input,--in", f.input, "field file");
  app->add_option("--out", f.out, "output directory");
  app->add_option("--name", f.name, "artifact name");
}

json to_json(const Flags& f, const std::string& command, const std::string& experiment) {
  json j;
  j["command"] = command;
  if (!experiment.empty()) j["experiment"] = experiment;
  if (!f.name.empty()) j["name"] = f.name;
  j["grid"] = {{"dim", f.dim}, {"N", f.N}, {"B", f.B}};
  j["space"] = {{"s", f.s}, {"p", f.p}, {"q", f.q}, {"L", f.L}, {"r", f.r}, {"scale", f.scale}, {"homogeneous", !f.inhomogeneous}};
  if (!f.input.empty()) {
    j["io"]["input"] = f.input;
  } else if (f.corpus == "default") {
    j["corpus"] = {{"default", true}, {"bandlimit", f.bandlimit}};
  } else if (experiment != "kernel-decay") {
    j["corpus"] = json::array({{{"family", f.family}, {"sigma", f.sigma}}});
  }
  if (!f.out.empty()) j["io"]["output_dir"] = f.out;
  if (!f.chars.empty()) j["characterizations"] = f.chars;
  if (!f.pair.empty()) j["pair"] = f.pair;
  if (!f.m_values.empty()) j["m_values"] = f.m_values;
  if (command == "diff") {
    j["difference"] = {{"write_fields", true}};
    if (!f.h.empty()) j["difference"]["h"] = f.h;
  }
  if (command == "maximal") j["maximal"] = {{"variant", f.variant}, {"t", f.t}, {"write_fields", true}};
  if (command == "bands") j["bands"] = {{"write_fields", true}};
  if (experiment == "divergence") j["divergence"] = {{"levels", f.levels}};
  if (experiment == "kernel-decay" && !f.orders.empty()) j["kernel"] = {{"N", f.orders}};
  if (experiment == "slice-support") {
    j["slice"] = json::object();
    if (f.j != -1000) j["slice"]["bands"] = {f.j};
    if (f.axis > 0) j["slice"]["axes"] = {f.axis};
  }
  return j;
}

int report_error(const lplab::Error& e) {
  json err = {{"verdict", "FAIL"}, {"error", {{"kind", lplab::kind_name(e.kind())}, {"message", e.what()}}}};
  std::cerr << err.dump() << "\n";
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lplab: Littlewood-Paley quasinorms of sampled functions"};
  app.set_help_flag("--help", "print help");
  app.require_subcommand(0, 1);
  Flags f;
  app.add_option("--config", f.config, "JSON config; its command field picks the subcommand");
  app.add_option("--out", f.out, "output directory");
  std::string command, experiment;

  auto add = [&](const std::string& name, const std::string& help) {
    CLI::App* sub = app.add_subcommand(name, help);
    common(sub, f);
    sub->callback([&, name] {
      if (command.empty()) command = name;
    });
    return sub;
  };
  auto* norm = add("norm", "evaluate quasinorms");
  norm->add_option("--char,--characterization", f.chars, "characterization ids (lp, diff, gagliardo, axis, axis:J, max:S ...)");
  auto* bands = add("bands", "band decomposition");
  (void)bands;
  auto* diff = add("diff", "iterated differences");
  diff->add_option("--step,--h", f.h, "step vector h");
  auto* maximal = add("maximal", "maximal functions");
  maximal->add_option("--variant", f.variant, "HL, PEETRE, SPHERE_S, BALL_V, POINT_D");
  maximal->add_option("--t", f.t, "scale parameter");
  add("corpus", "materialize test functions");
  add("suite", "run every config in a runs array");

  CLI::App* verify = app.add_subcommand("verify", "verification experiments");
  verify->require_subcommand(1);
  for (const char* ex : {"scaling", "equivalence", "ppn", "kernel-decay", "divergence", "slice-support"}) {
    CLI::App* sub = verify->add_subcommand(ex, std::string(ex) + " experiment");
    common(sub, f);
    std::string e = ex;
    sub->callback([&, e] {
      command = "verify";
      experiment = e;
    });
    if (e == "scaling") {
      sub->add_option("--char", f.chars, "characterization ids");
      sub->add_option("--m", f.m_values, "dilation exponents");
    }
    if (e == "equivalence") sub->add_option("--pair", f.pair, "two characterization ids")->expected(2);
    if (e == "divergence") sub->add_option("--levels", f.levels, "h_min halvings");
    if (e == "kernel-decay") sub->add_option("--order", f.orders, "decay orders N to test");
    if (e == "slice-support") {
      sub->add_option("--j", f.j, "band index");
      sub->add_option("--axis", f.axis, "slice axis");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (command.empty() && f.config.empty()) {
    std::cerr << app.help();
    return 2;
  }

  try {
    json j = to_json(f, command, experiment);
    if (!f.config.empty()) {
      std::ifstream in(f.config);
      if (!in) lplab::fail(lplab::ErrorKind::IoError, "cannot open config " + f.config);
      std::stringstream ss;
      ss << in.rdbuf();
      try {
        j = json::parse(ss.str());
      } catch (const json::exception& e) {
        lplab::fail(lplab::ErrorKind::ConfigParseError, std::string("invalid JSON: ") + e.what());
      }
      if (!j.is_object()) lplab::fail(lplab::ErrorKind::ConfigParseError, "config must be a JSON object");
      if (!j.contains("command") && !command.empty()) j["command"] = command;
      if (!j.contains("experiment") && !experiment.empty()) j["experiment"] = experiment;
      if (!f.out.empty() && !(j.contains("io") && j["io"].contains("output_dir"))) j["io"]["output_dir"] = f.out;
    }
    lplab::RunConfig cfg = lplab::parse_config(j);
    lplab::RunResult res = lplab::run_config(cfg);
    lplab::emit(res, cfg.name, cfg.output_dir);
    std::cout << cfg.name << ": " << res.verdict << "\n";
    return res.status;
  } catch (const lplab::Error& e) {
    return report_error(e);
  }
}

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bands.hpp"
#include "corpus.hpp"
#include "differences.hpp"
#include "error.hpp"
#include "field.hpp"
#include "io.hpp"
#include "maximal.hpp"
#include "quadrature.hpp"
#include "quasinorms.hpp"
#include "verify.hpp"

namespace lplab {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

struct RunConfig {
  std::string command;
  std::string experiment;
  std::string name;
  GridSpec grid{1, 256, 1.0};
  SpaceParams space;
  QuadratureSpec quad;
  std::vector<TestFunctionSpec> corpus;
  std::string input;
  std::string output_dir;
  json raw;  // command-specific sections
  std::vector<RunConfig> runs;
};

struct CsvRow {
  std::string function_id;
  std::string characterization;
  double s, p, q;
  int L;
  double value;
  std::string flag;
};

struct RunResult {
  int status = 0;
  std::string verdict = "OK";
  std::vector<CsvRow> rows;
  ojson summary;
  std::vector<std::pair<std::string, SampledField>> fields;
};

inline std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_text(const std::vector<CsvRow>& rows) {
  std::string out = "function_id,characterization,s,p,q,L,value,flag\n";
  for (const auto& r : rows) {
    out += r.function_id + "," + r.characterization + "," + fmt_num(r.s) + "," + fmt_num(r.p) + "," + fmt_num(r.q) +
           "," + std::to_string(r.L) + "," + fmt_num(r.value) + "," + r.flag + "\n";
  }
  return out;
}

// JSON cannot hold inf or nan; both go out as strings.
inline ojson jnum(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

namespace detail {

[[noreturn]] inline void bad(const std::string& msg) { fail(ErrorKind::ConfigParseError, msg); }

inline void allow_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) bad(where + " must be an object");
  std::set<std::string> ok(keys.begin(), keys.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!ok.count(it.key())) bad("unknown key '" + it.key() + "' in " + where);
}

inline double get_real(const json& v, const std::string& what) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    if (s == "inf" || s == "infinity" || s == "Infinity") return kInf;
    if (s == "-inf") return -kInf;
  }
  bad(what + " must be a number or \"inf\"");
}

inline int get_int(const json& v, const std::string& what) {
  if (!v.is_number_integer()) bad(what + " must be an integer");
  return v.get<int>();
}

inline std::vector<double> get_reals(const json& v, const std::string& what) {
  if (!v.is_array()) bad(what + " must be an array");
  std::vector<double> out;
  for (const auto& e : v) out.push_back(get_real(e, what));
  return out;
}

inline std::vector<int> get_ints(const json& v, const std::string& what) {
  if (!v.is_array()) bad(what + " must be an array");
  std::vector<int> out;
  for (const auto& e : v) out.push_back(get_int(e, what));
  return out;
}

inline std::string get_str(const json& v, const std::string& what) {
  if (!v.is_string()) bad(what + " must be a string");
  return v.get<std::string>();
}

template <class T>
void opt(const json& j, const char* key, T& dst) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  std::string what = key;
  if constexpr (std::is_same_v<T, double>) dst = get_real(v, what);
  else if constexpr (std::is_same_v<T, int>) dst = get_int(v, what);
  else if constexpr (std::is_same_v<T, std::int64_t>) {
    if (!v.is_number_integer()) bad(what + " must be an integer");
    dst = v.get<std::int64_t>();
  } else if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) bad(what + " must be a boolean");
    dst = v.get<bool>();
  } else if constexpr (std::is_same_v<T, std::string>) dst = get_str(v, what);
  else if constexpr (std::is_same_v<T, std::vector<double>>) dst = get_reals(v, what);
  else if constexpr (std::is_same_v<T, std::vector<int>>) dst = get_ints(v, what);
  else if constexpr (std::is_same_v<T, std::uint64_t>) {
    if (!v.is_number_unsigned()) bad(what + " must be a nonnegative integer");
    dst = v.get<std::uint64_t>();
  } else {
    static_assert(sizeof(T) == 0, "unsupported option type");
  }
}

inline TestFunctionSpec parse_function(const json& j) {
  allow_keys(j, "corpus entry",
             {"family", "id", "sigma", "center", "frequency", "band", "seed", "coeffs", "a", "b", "terms", "bandlimit"});
  TestFunctionSpec t;
  opt(j, "family", t.family);
  opt(j, "id", t.id);
  opt(j, "sigma", t.sigma);
  opt(j, "center", t.center);
  opt(j, "frequency", t.frequency);
  opt(j, "band", t.band);
  opt(j, "seed", t.seed);
  opt(j, "coeffs", t.coeffs);
  opt(j, "a", t.a);
  opt(j, "b", t.b);
  opt(j, "terms", t.terms);
  opt(j, "bandlimit", t.bandlimit);
  static const std::set<std::string> families{"gaussian",      "modulated_gaussian",  "smooth_bump",
                                              "random_band",   "windowed_polynomial", "weierstrass"};
  if (!families.count(t.family)) bad("unknown family '" + t.family + "'");
  if (t.id.empty()) t.id = t.family;
  return t;
}

inline std::vector<TestFunctionSpec> parse_corpus(const json& j, const GridSpec& g) {
  if (j.is_string()) {
    if (j.get<std::string>() != "default") bad("corpus must be \"default\", an object or an array");
    return default_corpus(g);
  }
  if (j.is_array()) {
    std::vector<TestFunctionSpec> out;
    for (const auto& e : j) out.push_back(parse_function(e));
    return out;
  }
  allow_keys(j, "corpus", {"default", "bandlimit", "ids"});
  double bl = 0.0;
  opt(j, "bandlimit", bl);
  auto all = default_corpus(g, bl);
  if (!j.contains("ids")) return all;
  std::vector<TestFunctionSpec> out;
  for (const auto& id : j.at("ids")) {
    std::string s = get_str(id, "corpus.ids");
    auto it = std::find_if(all.begin(), all.end(), [&](const TestFunctionSpec& t) { return t.id == s; });
    if (it == all.end()) bad("no corpus member '" + s + "'");
    out.push_back(*it);
  }
  return out;
}

inline Scale parse_scale(const std::string& s) {
  if (s == "F") return Scale::F;
  if (s == "B") return Scale::B;
  bad("scale must be F or B");
}

}  // namespace detail

inline RunConfig parse_config(const json& j) {
  using namespace detail;
  allow_keys(j, "config",
             {"command", "experiment", "name", "grid", "space", "quad", "corpus", "characterizations", "pair",
              "m_values", "tolerance", "thresholds", "difference", "maximal", "ppn", "kernel", "divergence", "slice",
              "bands", "io", "runs"});
  RunConfig c;
  c.raw = j;
  if (!j.contains("command")) bad("missing command");
  c.command = get_str(j.at("command"), "command");
  static const std::set<std::string> commands{"bands", "diff", "maximal", "norm", "verify", "corpus", "suite"};
  if (!commands.count(c.command)) bad("unknown command '" + c.command + "'");
  opt(j, "experiment", c.experiment);
  opt(j, "name", c.name);
  if (c.name.empty()) c.name = c.command == "verify" ? c.experiment : c.command;
  if (c.command == "suite") {
    if (!j.contains("runs") || !j.at("runs").is_array() || j.at("runs").empty()) bad("suite needs a nonempty runs array");
    json base = j;
    base.erase("runs");
    base.erase("name");
    std::set<std::string> names;
    for (const auto& r : j.at("runs")) {
      json merged = base;
      merged.merge_patch(r);
      RunConfig sub = parse_config(merged);
      if (sub.command == "suite") bad("nested suites are not supported");
      if (!names.insert(sub.name).second) bad("duplicate run name '" + sub.name + "'");
      c.runs.push_back(std::move(sub));
    }
    if (j.contains("io")) {
      allow_keys(j.at("io"), "io", {"input", "output_dir"});
      opt(j.at("io"), "output_dir", c.output_dir);
    }
    return c;
  }
  if (c.command == "verify") {
    static const std::set<std::string> ex{"scaling", "equivalence", "ppn", "kernel-decay", "divergence", "slice-support"};
    if (!ex.count(c.experiment)) bad("unknown verify experiment '" + c.experiment + "'");
  }
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    allow_keys(g, "grid", {"dim", "N", "B"});
    opt(g, "dim", c.grid.dim);
    opt(g, "N", c.grid.N);
    opt(g, "B", c.grid.B);
  }
  if (j.contains("space")) {
    const json& s = j.at("space");
    allow_keys(s, "space", {"s", "p", "q", "L", "r", "scale", "homogeneous"});
    opt(s, "s", c.space.s);
    opt(s, "p", c.space.p);
    opt(s, "q", c.space.q);
    opt(s, "L", c.space.L);
    opt(s, "r", c.space.r);
    std::string sc = "F";
    opt(s, "scale", sc);
    c.space.scale = parse_scale(sc);
    opt(s, "homogeneous", c.space.homogeneous);
  }
  if (j.contains("quad")) {
    const json& q = j.at("quad");
    allow_keys(q, "quad",
               {"h_min", "h_max", "radial_nodes_per_octave", "sphere_nodes", "t_nodes_per_octave",
                "tau_nodes_per_octave", "tau_octaves", "sup_radial_nodes_per_octave", "sup_sphere_nodes"});
    opt(q, "h_min", c.quad.h_min);
    opt(q, "h_max", c.quad.h_max);
    opt(q, "radial_nodes_per_octave", c.quad.radial_nodes_per_octave);
    opt(q, "sphere_nodes", c.quad.sphere_nodes);
    opt(q, "t_nodes_per_octave", c.quad.t_nodes_per_octave);
    opt(q, "tau_nodes_per_octave", c.quad.tau_nodes_per_octave);
    opt(q, "tau_octaves", c.quad.tau_octaves);
    opt(q, "sup_radial_nodes_per_octave", c.quad.sup_radial_nodes_per_octave);
    opt(q, "sup_sphere_nodes", c.quad.sup_sphere_nodes);
  }
  if (j.contains("io")) {
    const json& io = j.at("io");
    allow_keys(io, "io", {"input", "output_dir"});
    opt(io, "input", c.input);
    opt(io, "output_dir", c.output_dir);
  }
  // Everything below turns library errors into config errors.
  try {
    if (!c.input.empty()) {
      if (!std::filesystem::exists(c.input)) bad("input file not found: " + c.input);
      c.grid = read_field(c.input).grid();
    }
    c.grid.validate();
    c.space.validate();
    if (c.command != "corpus" && c.command != "bands") c.quad.validate(c.grid);
    if (j.contains("corpus")) c.corpus = parse_corpus(j.at("corpus"), c.grid);
    for (const auto& t : c.corpus) sample_family(t, c.grid);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConfigParseError) throw;
    bad(e.what());
  }
  if (c.corpus.empty() && c.input.empty() && c.command != "verify") bad("config needs a corpus or an input file");
  if (c.command == "verify" && c.experiment != "kernel-decay" && c.corpus.empty() && c.input.empty())
    bad("experiment needs a corpus or an input file");
  return c;
}

inline RunConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::ConfigParseError, std::string("invalid JSON: ") + e.what());
  }
  return parse_config(j);
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::IoError, "cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

namespace detail {

struct Input {
  std::string id;
  SampledField field;
};

inline std::vector<Input> inputs(const RunConfig& c) {
  std::vector<Input> out;
  if (!c.input.empty()) {
    out.push_back({std::filesystem::path(c.input).stem().string(), read_field(c.input)});
    return out;
  }
  for (const auto& t : c.corpus) out.push_back({t.id, sample_family(t, c.grid)});
  return out;
}

inline ojson grid_json(const GridSpec& g) { return ojson{{"dim", g.dim}, {"N", g.N}, {"B", jnum(g.B)}}; }

inline ojson space_json(const SpaceParams& P) {
  return ojson{{"s", jnum(P.s)},  {"p", jnum(P.p)},
               {"q", jnum(P.q)},  {"L", P.L},
               {"r", jnum(P.r)},  {"scale", scale_name(P.scale)},
               {"homogeneous", P.homogeneous}};
}

inline ojson quad_json(const QuadratureSpec& q) {
  return ojson{{"h_min", jnum(q.h_min)},
               {"h_max", jnum(q.h_max)},
               {"radial_nodes_per_octave", q.radial_nodes_per_octave},
               {"sphere_nodes", q.sphere_nodes},
               {"t_nodes_per_octave", q.t_nodes_per_octave},
               {"tau_nodes_per_octave", q.tau_nodes_per_octave},
               {"tau_octaves", q.tau_octaves},
               {"sup_radial_nodes_per_octave", q.sup_radial_nodes_per_octave},
               {"sup_sphere_nodes", q.sup_sphere_nodes}};
}

inline ojson result_json(const QuasinormResult& r) {
  ojson ps = ojson::array();
  for (const auto& c : r.per_scale) ps.push_back(ojson{{"scale", jnum(c.scale)}, {"contribution", jnum(c.contribution)}});
  return ojson{{"characterization", r.characterization},
               {"value", jnum(r.value)},
               {"flag", flag_name(r.flag)},
               {"nodes", r.nodes},
               {"scale_kind", r.scale_kind},
               {"per_scale_exponent", jnum(r.per_scale_exponent)},
               {"per_scale", ps},
               {"lowpass_norm", jnum(r.lowpass_norm)},
               {"truncation",
                {{"low_tail", jnum(r.truncation.low_tail)},
                 {"high_tail", jnum(r.truncation.high_tail)},
                 {"large_h_bound", jnum(r.truncation.large_h_bound)},
                 {"truncated_energy", jnum(r.truncation.truncated_energy)}}}};
}

inline CsvRow row(const std::string& id, const std::string& ch, const SpaceParams& P, double value,
                  const std::string& flag = "OK") {
  return {id, ch, P.s, P.p, P.q, P.L, value, flag};
}

inline void set_verdict(RunResult& r, const std::string& v) {
  r.verdict = v;
  r.status = v == "FAIL" ? 1 : 0;
}

inline std::vector<std::string> characterizations(const RunConfig& c, std::vector<std::string> dflt) {
  if (!c.raw.contains("characterizations")) return dflt;
  std::vector<std::string> out;
  for (const auto& e : c.raw.at("characterizations")) out.push_back(get_str(e, "characterizations"));
  for (const auto& id : out) parse_characterization(id);
  return out;
}

inline Flag worse(Flag a, Flag b) {
  if (a == Flag::DIVERGENT || b == Flag::DIVERGENT) return Flag::DIVERGENT;
  if (a == Flag::TRUNCATION_WARN || b == Flag::TRUNCATION_WARN) return Flag::TRUNCATION_WARN;
  return Flag::OK;
}

inline void run_norm(const RunConfig& c, RunResult& out) {
  auto ids = characterizations(c, {"lp"});
  ojson res = ojson::array();
  for (const auto& in : inputs(c)) {
    for (const auto& id : ids) {
      QuasinormResult r = evaluate(in.field, parse_characterization(id), c.space, c.quad, 0);
      out.rows.push_back(row(in.id, id, c.space, r.value, flag_name(r.flag)));
      ojson e = result_json(r);
      e["function_id"] = in.id;
      res.push_back(e);
    }
  }
  out.summary["results"] = res;
}

inline void run_corpus(const RunConfig& c, RunResult& out) {
  ojson res = ojson::array();
  for (auto& in : inputs(c)) {
    out.rows.push_back(row(in.id, "max_abs", c.space, in.field.max_abs()));
    res.push_back(ojson{{"function_id", in.id}, {"max_abs", jnum(in.field.max_abs())}, {"file", in.id + ".field"}});
    out.fields.emplace_back(in.id + ".field", std::move(in.field));
  }
  out.summary["results"] = res;
}

inline void run_bands(const RunConfig& c, RunResult& out) {
  double sharp = 1.0;
  bool inhom = !c.space.homogeneous, write = false;
  if (c.raw.contains("bands")) {
    const json& b = c.raw.at("bands");
    allow_keys(b, "bands", {"sharpness", "inhomogeneous", "write_fields"});
    opt(b, "sharpness", sharp);
    opt(b, "inhomogeneous", inhom);
    opt(b, "write_fields", write);
  }
  DyadicBandSystem sys = build_band_system(c.grid, sharp);
  double pou = 0.0;
  for_each_mode(c.grid, [&](std::size_t, const std::array<double, 3>& xi) {
    double r = norm3(xi, c.grid.dim);
    if (r >= std::exp2(sys.j_min()) && r <= std::exp2(sys.j_max())) pou = std::max(pou, std::abs(sys.partition_sum(r, false) - 1.0));
  });
  ojson res = ojson::array();
  for (const auto& in : inputs(c)) {
    BandDecomposition d = decompose(in.field, sys, inhom);
    SampledField back = reconstruct(d);
    double err = max_abs_diff(back, in.field);
    ojson bands = ojson::array();
    if (d.lowpass) {
      double v = lp_norm(*d.lowpass, c.space.p);
      out.rows.push_back(row(in.id, "lowpass", c.space, v));
      if (write) out.fields.emplace_back(in.id + ".lowpass.field", *d.lowpass);
    }
    for (const auto& b : d.bands) {
      double v = lp_norm(b.field, c.space.p);
      out.rows.push_back(row(in.id, "band:" + std::to_string(b.j), c.space, v));
      bands.push_back(ojson{{"j", b.j}, {"lp_norm", jnum(v)}});
      if (write) out.fields.emplace_back(in.id + ".band" + std::to_string(b.j) + ".field", b.field);
    }
    res.push_back(ojson{{"function_id", in.id},
                        {"bands", bands},
                        {"reconstruction_error", jnum(err)},
                        {"truncated_energy", jnum(d.truncated_energy)},
                        {"dc_energy", jnum(d.dc_energy)}});
  }
  out.summary["j_min"] = sys.j_min();
  out.summary["j_max"] = sys.j_max();
  out.summary["partition_deviation"] = jnum(pou);
  out.summary["results"] = res;
}

inline void run_diff(const RunConfig& c, RunResult& out) {
  DifferenceSpec spec{c.space.L, std::vector<double>(c.grid.dim, 0.0), DiffMethod::Spectral};
  spec.h[0] = c.grid.spacing();
  bool write = false;
  if (c.raw.contains("difference")) {
    const json& d = c.raw.at("difference");
    allow_keys(d, "difference", {"L", "h", "method", "write_fields"});
    opt(d, "L", spec.L);
    opt(d, "h", spec.h);
    std::string m = "spectral";
    opt(d, "method", m);
    if (m == "shift") spec.method = DiffMethod::Shift;
    else if (m != "spectral") bad("difference.method must be shift or spectral");
    opt(d, "write_fields", write);
  }
  check_spec(c.grid, spec);
  ojson res = ojson::array();
  std::string ch = "diff:L=" + std::to_string(spec.L);
  for (const auto& in : inputs(c)) {
    SampledField d = iterated_difference(in.field, spec);
    double v = lp_norm(d, c.space.p);
    out.rows.push_back(row(in.id, ch, c.space, v));
    res.push_back(ojson{{"function_id", in.id}, {"lp_norm", jnum(v)}, {"max_abs", jnum(d.max_abs())}});
    if (write) out.fields.emplace_back(in.id + ".diff.field", std::move(d));
  }
  out.summary["results"] = res;
}

inline void run_maximal(const RunConfig& c, RunResult& out) {
  MaximalSpec spec;
  spec.L = c.space.L;
  spec.r = c.space.r;
  spec.variant = MaximalVariant::HL;
  bool write = false;
  std::string vname = "HL";
  if (c.raw.contains("maximal")) {
    const json& m = c.raw.at("maximal");
    allow_keys(m, "maximal", {"variant", "t", "h", "L", "r", "rule", "write_fields"});
    opt(m, "variant", vname);
    opt(m, "t", spec.t);
    opt(m, "h", spec.h);
    opt(m, "L", spec.L);
    opt(m, "r", spec.r);
    std::string rule = "exact";
    opt(m, "rule", rule);
    if (rule == "quadrature") spec.rule = MeanRule::Quadrature;
    else if (rule != "exact") bad("maximal.rule must be exact or quadrature");
    opt(m, "write_fields", write);
  }
  static const std::map<std::string, MaximalVariant> names{{"HL", MaximalVariant::HL},
                                                           {"PEETRE", MaximalVariant::PEETRE},
                                                           {"SPHERE_S", MaximalVariant::SPHERE_S},
                                                           {"BALL_V", MaximalVariant::BALL_V},
                                                           {"POINT_D", MaximalVariant::POINT_D}};
  auto it = names.find(vname);
  if (it == names.end()) bad("unknown maximal variant '" + vname + "'");
  spec.variant = it->second;
  if (spec.variant == MaximalVariant::POINT_D && spec.h.empty()) {
    spec.h.assign(c.grid.dim, 0.0);
    spec.h[0] = spec.t;
  }
  ojson res = ojson::array();
  for (const auto& in : inputs(c)) {
    SampledField m;
    if (spec.variant == MaximalVariant::HL) m = hardy_littlewood_max(in.field);
    else if (spec.variant == MaximalVariant::PEETRE) m = peetre_max(in.field, spec.t, spec.r);
    else m = mean_difference_max(in.field, spec, c.quad);
    double v = lp_norm(m, c.space.p);
    out.rows.push_back(row(in.id, "maximal:" + vname, c.space, v));
    res.push_back(ojson{{"function_id", in.id}, {"lp_norm", jnum(v)}, {"max", jnum(m.max_abs())}});
    if (write) out.fields.emplace_back(in.id + ".max.field", std::move(m));
  }
  out.summary["variant"] = vname;
  out.summary["results"] = res;
}

inline void run_scaling(const RunConfig& c, RunResult& out) {
  auto ids = characterizations(c, {"lp"});
  std::vector<int> ms{-1, 0, 1};
  double tol = -1.0;
  opt(c.raw, "m_values", ms);
  if (ms.empty()) bad("m_values must not be empty");
  opt(c.raw, "tolerance", tol);
  int lift = std::max(0, -*std::min_element(ms.begin(), ms.end()));
  bool pass = true;
  ojson res = ojson::array();
  for (const auto& in : inputs(c)) {
    SampledField base = dyadic_dilate(in.field, lift);
    for (const auto& id : ids) {
      ScalingReport rep = scaling_experiment(base, id, c.space, c.quad, ms, tol);
      ojson ents = ojson::array();
      for (const auto& e : rep.entries) {
        out.rows.push_back(row(in.id + "@m=" + std::to_string(e.m), id, c.space, e.value, flag_name(e.flag)));
        ents.push_back(ojson{{"m", e.m},
                             {"value", jnum(e.value)},
                             {"normalized", jnum(e.normalized)},
                             {"ratio", jnum(e.ratio)},
                             {"measured_exponent", jnum(e.measured_exponent)},
                             {"raw_exponent", jnum(e.raw_exponent)},
                             {"error", jnum(e.error)},
                             {"flag", flag_name(e.flag)},
                             {"pass", e.pass}});
      }
      pass = pass && rep.pass;
      res.push_back(ojson{{"function_id", in.id},
                          {"characterization", id},
                          {"base_value", jnum(rep.base_value)},
                          {"expected_exponent", jnum(rep.expected_exponent)},
                          {"tolerance", jnum(rep.tolerance)},
                          {"entries", ents},
                          {"pass", rep.pass}});
    }
  }
  out.summary["base_dilation"] = lift;
  out.summary["results"] = res;
  set_verdict(out, pass ? "PASS" : "FAIL");
}

inline void run_equivalence(const RunConfig& c, RunResult& out) {
  if (!c.raw.contains("pair") || !c.raw.at("pair").is_array() || c.raw.at("pair").size() != 2)
    bad("equivalence needs a pair of characterizations");
  std::string a = get_str(c.raw.at("pair")[0], "pair"), b = get_str(c.raw.at("pair")[1], "pair");
  parse_characterization(a);
  parse_characterization(b);
  EquivalenceThresholds th;
  if (c.raw.contains("thresholds")) {
    const json& t = c.raw.at("thresholds");
    allow_keys(t, "thresholds", {"spread_max", "drift_max"});
    opt(t, "spread_max", th.spread_max);
    opt(t, "drift_max", th.drift_max);
  }
  if (c.corpus.empty()) bad("equivalence needs a corpus");
  EquivalenceReport rep = equivalence_experiment(c.corpus, a, b, c.space, c.grid, c.quad, th);
  ojson ents = ojson::array();
  for (const auto& e : rep.entries) {
    out.rows.push_back(row(e.spec.id, a + "/" + b, c.space, e.ratio, flag_name(worse(e.flag_a, e.flag_b))));
    ents.push_back(ojson{{"function_id", e.spec.id},
                         {"a", jnum(e.a)},
                         {"b", jnum(e.b)},
                         {"ratio", jnum(e.ratio)},
                         {"a_dilated", jnum(e.a2)},
                         {"b_dilated", jnum(e.b2)},
                         {"ratio_dilated", jnum(e.ratio2)},
                         {"drift", jnum(e.drift)},
                         {"flag_a", flag_name(e.flag_a)},
                         {"flag_b", flag_name(e.flag_b)},
                         {"excluded", e.excluded},
                         {"note", e.note}});
  }
  out.summary["pair"] = {a, b};
  out.summary["theorems"] = rep.theorems;
  out.summary["hypothesis"] = ojson{{"satisfied", rep.hypothesis.satisfied}, {"window", rep.hypothesis.window}};
  out.summary["thresholds"] = ojson{{"spread_max", jnum(th.spread_max)}, {"drift_max", jnum(th.drift_max)}};
  out.summary["spread"] = jnum(rep.spread);
  out.summary["dilation_drift"] = jnum(rep.dilation_drift);
  out.summary["evidence"] = "ratio stability over a finite corpus is evidence, not proof";
  out.summary["results"] = ents;
  set_verdict(out, rep.verdict);
}

inline void run_ppn(const RunConfig& c, RunResult& out) {
  double t0 = 8.0;
  std::vector<double> ts{8.0, 16.0, 32.0};
  std::vector<std::vector<int>> alphas;
  std::vector<std::pair<double, double>> pq{{2.0, 2.0}};
  if (c.raw.contains("ppn")) {
    const json& j = c.raw.at("ppn");
    allow_keys(j, "ppn", {"t0", "t_list", "alphas", "exponents"});
    opt(j, "t0", t0);
    opt(j, "t_list", ts);
    if (j.contains("alphas"))
      for (const auto& a : j.at("alphas")) alphas.push_back(get_ints(a, "ppn.alphas"));
    if (j.contains("exponents")) {
      pq.clear();
      for (const auto& e : j.at("exponents")) {
        auto v = get_reals(e, "ppn.exponents");
        if (v.size() != 2) bad("ppn.exponents entries are [p, q]");
        pq.emplace_back(v[0], v[1]);
      }
    }
  }
  if (alphas.empty()) alphas.push_back(std::vector<int>(c.grid.dim, 0));
  auto in = inputs(c);
  bool pass = true;
  ojson res = ojson::array();
  for (const auto& u : in) {
    for (const auto& al : alphas) {
      for (auto [p, q] : pq) {
        PPNReport rep = ppn_probe(u.field, t0, al, p, q, ts);
        std::string ms;
        for (int a : al) ms += (ms.empty() ? "" : ";") + std::to_string(a);
        SpaceParams P = c.space;
        P.p = p;
        P.q = q;
        out.rows.push_back(row(u.id, "ppn:alpha=" + ms, P, rep.max_over_min));
        ojson ratios = ojson::array();
        for (double r : rep.ratios) ratios.push_back(jnum(r));
        res.push_back(ojson{{"function_id", u.id},
                            {"alpha", al},
                            {"p", jnum(p)},
                            {"q", jnum(q)},
                            {"t_list", ts},
                            {"ratios", ratios},
                            {"max_over_min", jnum(rep.max_over_min)},
                            {"pass", rep.pass}});
        pass = pass && rep.pass;
      }
    }
  }
  out.summary["results"] = res;
  set_verdict(out, pass ? "PASS" : "FAIL");
}

inline void run_kernel(const RunConfig& c, RunResult& out) {
  KernelWindow w;
  int L = 1, dirs = 8;
  std::vector<int> Ns{4};
  std::vector<double> taus{1.0, 1.5, 2.0};
  if (c.raw.contains("kernel")) {
    const json& j = c.raw.at("kernel");
    allow_keys(j, "kernel", {"window", "L", "N", "taus", "directions"});
    if (j.contains("window")) {
      const json& wj = j.at("window");
      allow_keys(wj, "kernel.window", {"a", "b", "c", "ramp", "sharpness", "gauss", "rescale"});
      opt(wj, "a", w.a);
      opt(wj, "b", w.b);
      opt(wj, "c", w.c);
      opt(wj, "ramp", w.ramp);
      opt(wj, "sharpness", w.sharpness);
      opt(wj, "gauss", w.gauss);
      opt(wj, "rescale", w.rescale);
    }
    opt(j, "L", L);
    opt(j, "N", Ns);
    opt(j, "taus", taus);
    opt(j, "directions", dirs);
  }
  if (Ns.empty()) bad("kernel.N must list at least one order");
  bool pass = true;
  ojson res = ojson::array();
  KernelDecayReport rep = kernel_decay_probe(w, L, Ns.front(), c.grid, taus, dirs);
  for (int N : Ns) {
    bool ok = std::isfinite(rep.slope) && rep.slope <= -(N - 0.5) && rep.amplitude_ratio <= 2.0;
    SpaceParams P = c.space;
    P.L = L;
    out.rows.push_back(row("kernel", "kernel-decay:N=" + std::to_string(N), P, rep.slope));
    res.push_back(ojson{{"N", N}, {"slope", jnum(rep.slope)}, {"amplitude_ratio", jnum(rep.amplitude_ratio)}, {"pass", ok}});
    pass = pass && ok;
  }
  ojson slopes = ojson::array(), amps = ojson::array();
  for (double s : rep.slopes) slopes.push_back(jnum(s));
  for (double a : rep.amplitudes) amps.push_back(jnum(a));
  out.summary["support"] = {jnum(rep.support_lo), jnum(rep.support_hi)};
  out.summary["fit_points"] = rep.fit_points;
  out.summary["slopes"] = slopes;
  out.summary["amplitudes"] = amps;
  out.summary["results"] = res;
  set_verdict(out, pass ? "PASS" : "FAIL");
}

inline void run_divergence(const RunConfig& c, RunResult& out) {
  int levels = 4;
  if (c.raw.contains("divergence")) {
    const json& j = c.raw.at("divergence");
    allow_keys(j, "divergence", {"levels"});
    opt(j, "levels", levels);
  }
  bool pass = true;
  ojson res = ojson::array();
  for (const auto& in : inputs(c)) {
    DivergenceReport rep = divergence_probe(in.field, c.space, c.quad, levels);
    for (std::size_t i = 0; i < rep.values.size(); ++i)
      out.rows.push_back(row(in.id + "@h_min=" + fmt_num(rep.h_mins[i]), "diff", c.space, rep.values[i]));
    ojson h = ojson::array(), v = ojson::array(), g = ojson::array();
    for (double x : rep.h_mins) h.push_back(jnum(x));
    for (double x : rep.values) v.push_back(jnum(x));
    for (double x : rep.growth) g.push_back(jnum(x));
    res.push_back(ojson{{"function_id", in.id}, {"h_min", h}, {"values", v}, {"growth", g}, {"verdict", rep.verdict}, {"pass", rep.pass}});
    pass = pass && rep.pass;
  }
  out.summary["results"] = res;
  set_verdict(out, pass ? "PASS" : "FAIL");
}

inline void run_slice(const RunConfig& c, RunResult& out) {
  DyadicBandSystem sys = build_band_system(c.grid);
  std::vector<int> js, axes;
  if (c.raw.contains("slice")) {
    const json& j = c.raw.at("slice");
    allow_keys(j, "slice", {"bands", "axes"});
    opt(j, "bands", js);
    opt(j, "axes", axes);
  }
  if (js.empty())
    for (int j = sys.j_min(); j <= sys.j_max(); ++j) js.push_back(j);
  if (axes.empty())
    for (int a = 1; a <= c.grid.dim; ++a) axes.push_back(a);
  bool pass = true;
  double worst = 0.0;
  ojson res = ojson::array();
  for (const auto& in : inputs(c)) {
    for (int j : js) {
      SampledField fj = band_project(in.field, sys, j);
      for (int a : axes) {
        SliceReport rep = slice_violation(fj, j, a);
        out.rows.push_back(row(in.id + "@j=" + std::to_string(j) + ",axis=" + std::to_string(a), "slice-support", c.space,
                               rep.max_violation));
        worst = std::max(worst, rep.max_violation);
        pass = pass && rep.pass;
      }
    }
    res.push_back(ojson{{"function_id", in.id}});
  }
  out.summary["max_violation"] = jnum(worst);
  out.summary["results"] = res;
  set_verdict(out, pass ? "PASS" : "FAIL");
}

inline ojson error_json(const Error& e) { return ojson{{"kind", kind_name(e.kind())}, {"message", e.what()}}; }

}  // namespace detail

// Runs a parsed config. Computation errors land in the summary; config errors propagate.
inline RunResult run_config(const RunConfig& c) {
  RunResult out;
  out.summary["name"] = c.name;
  out.summary["command"] = c.command;
  if (c.command == "suite") {
    ojson runs = ojson::array();
    bool failed = false, all_pass = true;
    for (const auto& sub : c.runs) {
      RunResult r = run_config(sub);
      for (auto& row : r.rows) {
        row.function_id = sub.name + ":" + row.function_id;
        out.rows.push_back(std::move(row));
      }
      for (auto& f : r.fields) out.fields.emplace_back(sub.name + "." + f.first, std::move(f.second));
      failed = failed || r.verdict == "FAIL";
      all_pass = all_pass && r.verdict != "NO-VERDICT";
      runs.push_back(r.summary);
    }
    out.summary["runs"] = runs;
    detail::set_verdict(out, failed ? "FAIL" : (all_pass ? "PASS" : "NO-VERDICT"));
    out.summary["verdict"] = out.verdict;
    return out;
  }
  if (!c.experiment.empty()) out.summary["experiment"] = c.experiment;
  out.summary["grid"] = detail::grid_json(c.grid);
  out.summary["space"] = detail::space_json(c.space);
  out.summary["quad"] = detail::quad_json(c.quad.resolved(c.grid));
  try {
    if (c.command == "norm") detail::run_norm(c, out);
    else if (c.command == "corpus") detail::run_corpus(c, out);
    else if (c.command == "bands") detail::run_bands(c, out);
    else if (c.command == "diff") detail::run_diff(c, out);
    else if (c.command == "maximal") detail::run_maximal(c, out);
    else if (c.experiment == "scaling") detail::run_scaling(c, out);
    else if (c.experiment == "equivalence") detail::run_equivalence(c, out);
    else if (c.experiment == "ppn") detail::run_ppn(c, out);
    else if (c.experiment == "kernel-decay") detail::run_kernel(c, out);
    else if (c.experiment == "divergence") detail::run_divergence(c, out);
    else detail::run_slice(c, out);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConfigParseError) throw;
    out.summary["error"] = detail::error_json(e);
    detail::set_verdict(out, "FAIL");
  }
  out.summary["verdict"] = out.verdict;
  return out;
}

inline std::string summary_text(const RunResult& r) { return r.summary.dump(2) + "\n"; }

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream o(p, std::ios::binary);
  if (!o) fail(ErrorKind::IoError, "cannot write " + p.string());
  o << text;
  if (!o) fail(ErrorKind::IoError, "short write to " + p.string());
}

// Writes <name>.csv, <name>.json and any field files under dir.
inline void emit(const RunResult& r, const std::string& name, const std::string& dir) {
  std::filesystem::path d = dir.empty() ? std::filesystem::path(".") : std::filesystem::path(dir);
  std::error_code ec;
  std::filesystem::create_directories(d, ec);
  if (ec) fail(ErrorKind::IoError, "cannot create " + d.string());
  write_text(d / (name + ".csv"), csv_text(r.rows));
  write_text(d / (name + ".json"), summary_text(r));
  for (const auto& [file, f] : r.fields) write_field((d / file).string(), f);
}

}  // namespace lplab

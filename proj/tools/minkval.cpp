#include <CLI11.hpp>
#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "minkval/constants.hpp"
#include "minkval/error.hpp"
#include "minkval/harmonics.hpp"
#include "minkval/integral_geom.hpp"
#include "minkval/valuation.hpp"
#include "minkval/zonal.hpp"

using namespace minkval;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitInput = 2;

// ---------------------------------------------------------------------------
// Input resolution

fs::path data_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("MINKVAL_DATA"); env && *env) return env;
  return MINKVAL_DEFAULT_DATA_DIR;
}

json read_json_file(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw InputError("cannot open " + p.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(p.string() + ": " + e.what());
  }
}

// A path as given, or a name in the corpus directory with or without ".json".
std::optional<fs::path> locate(const std::string& name, const fs::path& dir) {
  for (const fs::path& p : {fs::path(name), dir / name, dir / (name + ".json")}) {
    if (fs::is_regular_file(p)) return p;
  }
  return std::nullopt;
}

Polytope load_body(const std::string& arg, const fs::path& dir) {
  if (auto p = locate(arg, dir)) return Polytope::from_json(read_json_file(*p));
  if (arg == "cube") return Polytope::cube();
  if (arg == "simplex") return Polytope::simplex();
  if (arg == "octahedron") return Polytope::octahedron();
  throw InputError("body '" + arg + "' is neither a file nor a corpus entry");
}

MinkowskiValuationSpec load_spec(const std::string& arg, const fs::path& dir, int kmax) {
  if (auto p = locate(arg, dir)) return MinkowskiValuationSpec::from_json(read_json_file(*p));
  return builtin_spec(arg, 3, kmax);
}

ZonalObject load_zonal(const std::string& arg, const fs::path& dir, int n, int kmax) {
  if (auto p = locate(arg, dir)) return ZonalObject::from_json(read_json_file(*p));
  return zonal_builtin(arg, n, kmax);
}

std::vector<double> parse_numbers(const std::string& s, std::size_t count, const char* what) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InputError(std::string(what) + ": cannot parse '" + s + "'");
    }
  }
  if (v.size() != count) {
    throw InputError(std::string(what) + ": expected " + std::to_string(count) + " comma-separated numbers");
  }
  return v;
}

Vec3 parse_vec3(const std::string& s, const char* what) {
  const auto v = parse_numbers(s, 3, what);
  return {v[0], v[1], v[2]};
}

json vec_json(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

// ---------------------------------------------------------------------------
// Output

struct Output {
  std::string json_path;
  std::string csv_path;
  bool timing = true;
};

void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << text;
}

void strip_timing(json& j) {
  if (j.is_object()) {
    j.erase("wall_time_s");
    for (auto& [k, v] : j.items()) strip_timing(v);
  } else if (j.is_array()) {
    for (auto& v : j) strip_timing(v);
  }
}

int emit(json report, const std::string& csv, const Output& out, bool pass) {
  report["pass"] = pass;
  if (!out.timing) strip_timing(report);
  const std::string text = report.dump(2) + "\n";
  if (!out.csv_path.empty() && !csv.empty()) write_text(out.csv_path, csv);
  if (!out.json_path.empty()) {
    write_text(out.json_path, text);
  } else if (out.csv_path != "-") {
    std::cout << text;
  }
  return pass ? kExitOk : kExitCheckFailed;
}

McConfig mc_config(long N, std::uint64_t seed, int threads, int shards) {
  McConfig c;
  c.samples = N;
  c.seed = seed;
  c.threads = threads;
  c.shards = shards;
  return c;
}

json mc_json(const McConfig& c) {
  return {{"N", c.samples}, {"seed", c.seed}, {"shards", c.shards}};
}

// ---------------------------------------------------------------------------
// Commands

struct Common {
  std::string data;
  Output out;
  long N = 200'000;
  std::uint64_t seed = 1;
  int threads = 0;
  int shards = 16;
};

int cmd_multipliers(int n, int kmax, int berg, bool box, const std::string& zonal, const Common& c) {
  const int chosen = (berg > 0) + box + !zonal.empty();
  if (chosen != 1) throw InputError("multipliers: choose exactly one of --berg, --box, --zonal");
  MultiplierSequence m;
  std::string name;
  if (berg > 0) {
    m = ZonalObject::berg(n, berg, kmax).multipliers();
    name = "berg:" + std::to_string(berg);
  } else if (box) {
    m = box_multipliers(n, kmax);
    name = "box";
  } else {
    m = load_zonal(zonal, data_dir(c.data), n, kmax).truncated(kmax).multipliers();
    name = zonal;
  }
  json rows = json::array();
  std::ostringstream csv;
  csv.precision(17);
  csv << "k,value,error,exact\n";
  for (int k = 0; k <= m.kmax(); ++k) {
    const auto ex = m.exact_value(k);
    rows.push_back({{"k", k}, {"value", m[k]}, {"error", m.error(k)}, {"exact", ex ? json(ex->str()) : json(nullptr)}});
    csv << k << ',' << m[k] << ',' << m.error(k) << ',' << (ex ? ex->str() : "") << '\n';
  }
  json r{{"command", "multipliers"}, {"n", n}, {"kmax", kmax}, {"object", name}, {"rows", rows}};
  return emit(r, csv.str(), c.out, true);
}

int cmd_area_measure(const std::string& body, double tol, const Common& c) {
  const Polytope P = load_body(body, data_dir(c.data));
  const auto V = intrinsic_volumes(P);
  // Steiner polynomial totals: S_0 = 4 pi V_0, S_1 = pi V_1, S_2 = 2 V_2
  const double expect[] = {4 * std::numbers::pi * V[0], std::numbers::pi * V[1], 2 * V[2]};
  json ms = json::array();
  bool pass = true;
  for (int i = 0; i < 3; ++i) {
    const AreaMeasure S = area_measure(P, i);
    const double total = S.total_mass();
    const bool ok = std::abs(total - expect[i]) <= tol * std::max(1.0, std::abs(expect[i]));
    pass = pass && ok;
    ms.push_back({{"degree", i},
                  {"atoms", S.atoms.size()},
                  {"arcs", S.arcs.size()},
                  {"triangles", S.triangles.size()},
                  {"total", total},
                  {"steiner_total", expect[i]},
                  {"ok", ok}});
  }
  json r{{"command", "area-measure"},
         {"body", body},
         {"dimension", P.dimension()},
         {"vertices", P.vertices().size()},
         {"intrinsic_volumes", V},
         {"tolerance", tol},
         {"measures", ms}};
  return emit(r, "", c.out, pass);
}

std::vector<Vec3> collect_directions(const std::vector<std::string>& dirs, int fib, int rnd, std::uint64_t seed) {
  std::vector<Vec3> d;
  for (const auto& s : dirs) d.push_back(parse_vec3(s, "--dir"));
  if (fib > 0) {
    const auto f = fibonacci_directions(fib);
    d.insert(d.end(), f.begin(), f.end());
  }
  if (rnd > 0) {
    const auto r = random_directions(rnd, seed);
    d.insert(d.end(), r.begin(), r.end());
  }
  if (d.empty()) throw InputError("no directions given (use --dir, --fibonacci or --random)");
  return d;
}

int cmd_evaluate(const std::string& spec_arg, const std::string& body, const std::vector<Vec3>& dirs,
                 const std::string& path, int band, int kmax, const Common& c) {
  const fs::path dir = data_dir(c.data);
  const MinkowskiValuationSpec spec = load_spec(spec_arg, dir, kmax);
  const Polytope P = load_body(body, dir);
  SupportFunctionResult res;
  if (path == "pointwise") {
    res = evaluate(spec, P, dirs);
  } else if (path == "spectral") {
    res = evaluate_spectral(spec, P, dirs, band);
  } else {
    try {
      res = evaluate(spec, P, dirs);
    } catch (const DomainError&) {
      res = evaluate_spectral(spec, P, dirs, std::min(band, spec.kmax()));
    }
  }
  std::ostringstream csv;
  csv.precision(17);
  csv << "ux,uy,uz,h,error\n";
  for (std::size_t i = 0; i < res.values.size(); ++i) {
    const Vec3& u = res.directions[i];
    csv << u.x() << ',' << u.y() << ',' << u.z() << ',' << res.values[i] << ',' << res.errors[i] << '\n';
  }
  json r = res.to_json();
  r["command"] = "evaluate";
  r["spec"] = spec_arg;
  r["body"] = body;
  return emit(r, csv.str(), c.out, true);
}

int cmd_check_valuation(const std::string& spec_arg, const std::string& body, const std::string& plane, int ndirs,
                        double tol, bool spectral, int kmax, const Common& c) {
  const fs::path dir = data_dir(c.data);
  const MinkowskiValuationSpec spec = load_spec(spec_arg, dir, kmax);
  const Polytope P = load_body(body, dir);
  Hyperplane H{Vec3(0, 0, 1), 0.0};
  if (plane.empty()) {
    if (!P.empty()) H.offset = P.vertex_centroid().z();
  } else {
    const auto v = parse_numbers(plane, 4, "--plane");
    H = Hyperplane{Vec3(v[0], v[1], v[2]), v[3]};
  }
  const auto dirs = fibonacci_directions(ndirs);
  const IdentityReport rep = valuation_identity_check(spec, P, H, dirs, spectral);
  json r{{"command", "check-valuation"},
         {"spec", spec_arg},
         {"body", body},
         {"plane", {H.normal.x(), H.normal.y(), H.normal.z(), H.offset}},
         {"directions", rep.directions},
         {"max_residual", rep.max_residual},
         {"tolerance", tol},
         {"degenerate", rep.degenerate},
         {"note", rep.note}};
  return emit(r, "", c.out, rep.max_residual <= tol);
}

int cmd_crofton(const std::string& body, int i, int j, double sigmas, const Common& c) {
  const Polytope P = load_body(body, data_dir(c.data));
  const McConfig cfg = mc_config(c.N, c.seed, c.threads, c.shards);
  const EstimateReport e = crofton_intrinsic(P, i, j, cfg);
  json r = e.to_json();
  r["command"] = "crofton";
  r["body"] = body;
  r["i"] = i;
  r["j"] = j;
  r["sigmas"] = sigmas;
  r["config"] = mc_json(cfg);
  return emit(r, "", c.out, std::abs(e.z) <= sigmas);
}

int cmd_kinematic(const std::string& body, const std::string& other, int j, const std::string& spec_arg,
                  const std::string& dir_arg, double sigmas, int kmax, const Common& c) {
  const fs::path dir = data_dir(c.data);
  const Polytope K = load_body(body, dir), L = load_body(other, dir);
  const McConfig cfg = mc_config(c.N, c.seed, c.threads, c.shards);
  KinematicCheck k;
  json r{{"command", "kinematic"}, {"body", body}, {"other", other}, {"sigmas", sigmas}, {"config", mc_json(cfg)}};
  bool pass = true;
  if (spec_arg.empty()) {
    k = kinematic_check(K, L, j, cfg);
    r["j"] = j;
    pass = std::abs(k.direct.z) <= sigmas;
  } else {
    const Vec3 u = parse_vec3(dir_arg, "--dir");
    k = kinematic_valuation_check(K, L, load_spec(spec_arg, dir, kmax), u, cfg);
    r["spec"] = spec_arg;
    r["u"] = vec_json(u.normalized());
  }
  pass = pass && std::abs(k.z_consistency) <= sigmas;
  r["result"] = k.to_json();
  return emit(r, "", c.out, pass);
}

int cmd_crofton_mv(const std::string& body, const std::string& mu_arg, int kmax, const std::string& axis,
                   const Common& c) {
  const fs::path dir = data_dir(c.data);
  const Polytope P = load_body(body, dir);
  const ZonalObject mu = load_zonal(mu_arg, dir, 3, std::max(kmax, 1));
  const McConfig cfg = mc_config(c.N, c.seed, c.threads, c.shards);
  const CroftonMvReport rep = crofton_minkowski(P, mu, kmax, parse_vec3(axis, "--axis"), cfg);
  bool pass = true;
  for (const auto& row : rep.rows) pass = pass && row.pass;
  json r = rep.to_json();
  r["command"] = "crofton-mv";
  r["body"] = body;
  r["mu"] = mu_arg;
  r["q"] = crofton_minkowski_constant(3, 1, 1);
  r["config"] = mc_json(cfg);
  return emit(r, rep.to_csv(), c.out, pass);
}

std::vector<ZonalProfile> probe_family(const std::vector<std::string>& family, int n, int kmax,
                                       const fs::path& dir) {
  std::vector<ZonalProfile> out;
  for (const std::string& name : family) {
    if (name.starts_with("random:")) {
      // random:<count>:<seed> smooth centered Legendre densities of degree <= 8
      std::string spec = name.substr(7);
      std::replace(spec.begin(), spec.end(), ':', ',');
      const auto parts = parse_numbers(spec, 2, "--family random:<count>:<seed>");
      std::mt19937_64 rng(static_cast<std::uint64_t>(parts[1]));
      std::normal_distribution<double> g;
      for (int m = 0; m < static_cast<int>(parts[0]); ++m) {
        std::vector<double> coeffs(2 + rng() % 7);
        for (double& x : coeffs) x = g(rng);
        coeffs[1] = 0.0;
        out.push_back(ZonalProfile::legendre(n, coeffs));
      }
    } else if (name.starts_with("P")) {
      const int k = static_cast<int>(parse_numbers(name.substr(1), 1, "--family P<k>")[0]);
      std::vector<double> coeffs(k + 1, 0.0);
      coeffs[k] = 1.0;
      out.push_back(ZonalProfile::legendre(n, coeffs));
    } else {
      out.push_back(load_zonal(name, dir, n, kmax).as_profile());
    }
  }
  if (out.empty()) throw InputError("lemma52: empty family");
  return out;
}

int cmd_lemma52(int n, double q, const std::vector<std::string>& family, double flux_tol, int kmax,
                const Common& c) {
  const auto fam = probe_family(family, n, kmax, data_dir(c.data));
  const ProbeReport rep = regularity_probe(fam, q, AmbientDim(n));
  json samples = json::array();
  std::ostringstream csv;
  csv.precision(17);
  csv << "index,c2_norm,dq_norm,ratio,flux,ratio_box\n";
  for (std::size_t i = 0; i < rep.samples.size(); ++i) {
    const auto& s = rep.samples[i];
    json row{{"c2_norm", s.c2_norm}, {"dq_norm", s.dq_norm}, {"ratio", s.ratio}, {"flux", s.flux}};
    if (s.ratio_box) row["ratio_box"] = *s.ratio_box;
    samples.push_back(row);
    csv << i << ',' << s.c2_norm << ',' << s.dq_norm << ',' << s.ratio << ',' << s.flux << ','
        << (s.ratio_box ? std::to_string(*s.ratio_box) : "") << '\n';
  }
  json r{{"command", "lemma52"},  {"n", n},           {"q", q}, {"family", family}, {"samples", samples},
         {"sup_ratio", rep.sup_ratio}, {"max_abs_flux", rep.max_abs_flux}, {"flux_tolerance", flux_tol}};
  if (rep.sup_ratio_box) r["sup_ratio_box"] = *rep.sup_ratio_box;
  return emit(r, csv.str(), c.out, rep.max_abs_flux <= flux_tol);
}

int cmd_constants(int n, int i, int j, int k, const Common& c) {
  json r = geometric_constants(n, i, j, k).to_json();
  r["command"] = "constants";
  r["indices"] = {{"i", i}, {"j", j}, {"k", k}};
  return emit(r, "", c.out, true);
}

int cmd_corpus(const std::string& dir_arg, int hulls, const Common& c) {
  const fs::path dir = dir_arg.empty() ? data_dir(c.data) : fs::path(dir_arg);
  fs::create_directories(dir);
  std::vector<std::pair<std::string, Polytope>> bodies{{"cube", Polytope::cube()},
                                                       {"small_cube", Polytope::cube(0.5)},
                                                       {"simplex", Polytope::simplex()},
                                                       {"octahedron", Polytope::octahedron()},
                                                       {"ball_proxy", Polytope::from_points(fibonacci_directions(300))}};
  for (int s = 0; s < hulls; ++s) {
    bodies.emplace_back("random_hull_" + std::to_string(s), Polytope::random_hull(16, 1000 + s));
  }
  json written = json::array();
  for (const auto& [name, P] : bodies) {
    const fs::path p = dir / (name + ".json");
    write_text(p.string(), P.to_json().dump(2) + "\n");
    written.push_back(p.string());
  }
  json r{{"command", "corpus"}, {"written", written}};
  return emit(r, "", c.out, true);
}

const char* error_type(const std::exception& e) {
  if (dynamic_cast<const InputError*>(&e)) return "InputError";
  if (dynamic_cast<const DomainError*>(&e)) return "DomainError";
  if (dynamic_cast<const ToleranceError*>(&e)) return "ToleranceError";
  return "Error";
}

int report_error(const std::string& type, const std::string& message, int code) {
  std::cerr << json{{"error", {{"type", type}, {"message", message}, {"exit_code", code}}}}.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minkowski valuations: zonal multipliers, area measures, evaluation and integral geometry"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI file with option defaults (flags override it)");

  Common c;
  auto add_common = [&](CLI::App* s) {
    s->add_option("--data", c.data, "Corpus directory (default: $MINKVAL_DATA or the bundled data/)");
    s->add_option("--out", c.out.json_path, "Write the JSON report here instead of stdout ('-' for stdout)");
    s->add_option("--csv", c.out.csv_path, "Write the CSV table here ('-' for stdout)");
    s->add_flag("!--no-timing", c.out.timing, "Omit wall-clock fields for byte-identical reports");
  };
  auto add_mc = [&](CLI::App* s) {
    s->add_option("--N", c.N, "Sample count")->check(CLI::PositiveNumber);
    s->add_option("--seed", c.seed, "Random seed")->required();
    s->add_option("--threads", c.threads, "Worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
    s->add_option("--shards", c.shards, "Independent sample streams")->check(CLI::PositiveNumber);
  };

  int n = 3, kmax = 8, mv_kmax = 4, berg = 0, band = 16, i = 1, j = 1, k = 1, ndirs = 50, fib = 0, rnd = 0, hulls = 4;
  bool box = false, spectral = false, n3 = true;
  double tol = 1e-9, check_tol = 1e-6, flux_tol = 1e-8, sigmas = 3.0, q = 2.0;
  std::string zonal, body, other, spec, path = "auto", plane, axis = "1,2,3", mu = "dirac_pole", dir_one = "1,0,0",
                                       corpus_dir;
  std::vector<std::string> dirs, family;

  auto* mult = app.add_subcommand("multipliers", "Funk-Hecke multiplier tables");
  mult->add_option("--n", n, "Ambient dimension")->check(CLI::Range(3, 64));
  mult->add_option("--kmax", kmax, "Largest degree")->check(CLI::Range(0, 4096));
  mult->add_option("--berg", berg, "Berg function g_j");
  mult->add_flag("--box", box, "The operator box_n");
  mult->add_option("--zonal", zonal, "Builtin zonal object or JSON file");
  add_common(mult);

  auto* area = app.add_subcommand("area-measure", "Area measures of a polytope against the Steiner totals");
  area->add_option("--body", body, "Body JSON file or corpus name")->required();
  area->add_option("--tol", tol, "Relative tolerance")->check(CLI::PositiveNumber);
  add_common(area);

  auto* eval = app.add_subcommand("evaluate", "Support function of a Minkowski valuation");
  eval->add_option("--spec", spec, "Builtin spec name or JSON file")->required();
  eval->add_option("--body", body, "Body JSON file or corpus name")->required();
  eval->add_option("--dir", dirs, "Direction x,y,z (repeatable)");
  eval->add_option("--fibonacci", fib, "Add this many quasi-uniform directions");
  eval->add_option("--random", rnd, "Add this many random directions");
  eval->add_option("--seed", c.seed, "Seed for --random");
  eval->add_option("--path", path, "pointwise, spectral or auto")
      ->check(CLI::IsMember({"pointwise", "spectral", "auto"}));
  eval->add_option("--band", band, "Spectral band limit")->check(CLI::NonNegativeNumber);
  eval->add_option("--kmax", kmax, "Multiplier count for builtin specs")->check(CLI::Range(0, 4096));
  add_common(eval);

  auto* check = app.add_subcommand("check-valuation", "Inclusion-exclusion residual on a hyperplane split");
  check->add_option("--spec", spec, "Builtin spec name or JSON file")->required();
  check->add_option("--body", body, "Body JSON file or corpus name")->required();
  check->add_option("--plane", plane, "nx,ny,nz,offset (default: horizontal through the centroid)");
  check->add_option("--dirs", ndirs, "Number of directions")->check(CLI::PositiveNumber);
  check->add_option("--tol", check_tol, "Residual tolerance")->check(CLI::PositiveNumber);
  check->add_flag("--spectral", spectral, "Use the spectral path");
  check->add_option("--kmax", kmax, "Multiplier count for builtin specs")->check(CLI::Range(0, 4096));
  add_common(check);

  auto* crof = app.add_subcommand("crofton", "Crofton formula for intrinsic volumes");
  crof->add_option("--body", body, "Body JSON file or corpus name")->required();
  crof->add_option("--i", i, "Codimension of the planes")->check(CLI::Range(1, 3));
  crof->add_option("--j", j, "Intrinsic volume degree")->check(CLI::Range(0, 3));
  crof->add_flag("--n3", n3, "Ambient dimension 3 (the only one supported)");
  crof->add_option("--sigmas", sigmas, "Pass threshold in standard errors")->check(CLI::PositiveNumber);
  add_mc(crof);
  add_common(crof);

  auto* kin = app.add_subcommand("kinematic", "Kinematic formula and Hadwiger decomposition");
  kin->add_option("--body", body, "Fixed body")->required();
  kin->add_option("--other", other, "Moving body")->required();
  kin->add_option("--j", j, "Intrinsic volume degree")->check(CLI::Range(0, 3));
  kin->add_option("--spec", spec, "Check a Minkowski valuation instead of V_j");
  kin->add_option("--dir", dir_one, "Direction for --spec");
  kin->add_option("--sigmas", sigmas, "Pass threshold in standard errors")->check(CLI::PositiveNumber);
  kin->add_option("--kmax", kmax, "Multiplier count for builtin specs")->check(CLI::Range(0, 4096));
  add_mc(kin);
  add_common(kin);

  auto* cmv = app.add_subcommand("crofton-mv", "Per-degree Crofton formula for degree-one Minkowski valuations");
  cmv->add_option("--body", body, "Body JSON file or corpus name")->required();
  cmv->add_option("--mu", mu, "Zonal datum (builtin name or JSON file)");
  cmv->add_option("--kmax", mv_kmax, "Largest degree")->check(CLI::Range(0, 64));
  cmv->add_option("--axis", axis, "Axis of the zonal test functions");
  add_mc(cmv);
  add_common(cmv);

  auto* lem = app.add_subcommand("lemma52", "Regularity probe ||f||_C2 against ||Delta f + q f||_C0");
  lem->add_option("--n", n, "Ambient dimension")->check(CLI::Range(3, 64));
  lem->add_option("--q", q, "Shift q");
  lem->add_option("--family", family, "Members: P<k>, random:<count>:<seed>, builtin zonal names, JSON files")
      ->required();
  lem->add_option("--flux-tol", flux_tol, "Tolerance on the flux identity")->check(CLI::PositiveNumber);
  lem->add_option("--kmax", kmax, "Multiplier count for builtin objects")->check(CLI::Range(0, 4096));
  add_common(lem);

  auto* cons = app.add_subcommand("constants", "Geometric constants");
  cons->add_option("--n", n, "Ambient dimension")->check(CLI::Range(2, 64));
  cons->add_option("--i", i, "Index i");
  cons->add_option("--j", j, "Index j");
  cons->add_option("--k", k, "Index k");
  add_common(cons);

  auto* corp = app.add_subcommand("corpus", "Write the bundled polytope corpus");
  corp->add_option("--dir", corpus_dir, "Target directory (default: the corpus directory)");
  corp->add_option("--hulls", hulls, "Number of random hulls")->check(CLI::NonNegativeNumber);
  add_common(corp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("UsageError", e.what(), kExitInput);
  }

  try {
    if (*mult) return cmd_multipliers(n, kmax, berg, box, zonal, c);
    if (*area) return cmd_area_measure(body, tol, c);
    if (*eval) return cmd_evaluate(spec, body, collect_directions(dirs, fib, rnd, c.seed), path, band, kmax, c);
    if (*check) return cmd_check_valuation(spec, body, plane, ndirs, check_tol, spectral, kmax, c);
    if (*crof) return cmd_crofton(body, i, j, sigmas, c);
    if (*kin) return cmd_kinematic(body, other, j, spec, dir_one, sigmas, kmax, c);
    if (*cmv) return cmd_crofton_mv(body, mu, mv_kmax, axis, c);
    if (*lem) return cmd_lemma52(n, q, family, flux_tol, kmax, c);
    if (*cons) return cmd_constants(n, i, j, k, c);
    if (*corp) return cmd_corpus(corpus_dir, hulls, c);
  } catch (const ToleranceError& e) {
    return report_error(error_type(e), e.what(), kExitCheckFailed);
  } catch (const Error& e) {
    return report_error(error_type(e), e.what(), kExitInput);
  } catch (const std::exception& e) {
    return report_error("Error", e.what(), kExitInput);
  }
  return kExitInput;
}

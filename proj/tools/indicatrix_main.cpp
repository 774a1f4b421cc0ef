// Command-line front end: build-dyadic, indicatrix, exhaust, verify-banach,
// verify-cov. Every subcommand writes a JSON report that embeds the resolved
// configuration and a content fingerprint of each input file, so reruns with
// identical inputs produce byte-identical output.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "indicatrix/indicatrix.hpp"

namespace {

using indicatrix::io::json;

enum LogLevel { kError = 0, kWarn = 1, kInfo = 2, kDebug = 3 };

LogLevel g_log_level = kWarn;

void init_log_level() {
  const char* env = std::getenv("INDICATRIX_LOG");
  if (!env) return;
  const std::string v = env;
  if (v == "error") g_log_level = kError;
  else if (v == "warn") g_log_level = kWarn;
  else if (v == "info") g_log_level = kInfo;
  else if (v == "debug") g_log_level = kDebug;
  else std::cerr << "indicatrix: ignoring INDICATRIX_LOG=" << v << "\n";
}

void log(LogLevel level, const std::string& msg) {
  static const char* names[] = {"error", "warn", "info", "debug"};
  if (level <= g_log_level) std::cerr << "indicatrix [" << names[level] << "] " << msg << "\n";
}

// Exit codes: 0 ok, 1 verification failure, 2 usage, 3 missing file,
// 4 malformed input.
constexpr int kExitOk = 0;
constexpr int kExitVerification = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitSchema = 4;

struct InputFile {
  std::string role;
  std::string path;
  std::string content;
};

InputFile load_input(const std::string& role, const std::string& path) {
  InputFile f{role, path, indicatrix::io::read_text_file(path)};
  log(kInfo, "read " + role + " from " + path + " (" + std::to_string(f.content.size()) +
                 " bytes)");
  return f;
}

json inputs_to_json(const std::vector<InputFile>& inputs) {
  json j = json::object();
  for (const InputFile& f : inputs)
    j[f.role] = json{{"path", f.path}, {"fnv1a64", indicatrix::io::fnv1a64_hex(f.content)}};
  return j;
}

void write_report(const std::string& path, const json& j) {
  indicatrix::io::write_text_file(path, indicatrix::io::dump_json(j) + "\n");
}

// ---- build-dyadic ---------------------------------------------------------

struct BuildDyadicOpts {
  std::string space_path;
  std::string out_path;
  double delta = 0.5;
  int k_min = 0;
  std::optional<int> k_max;
  std::optional<double> scale;
  int trials = 32;
  std::uint64_t seed = 0;
  bool strict = false;
};

int run_build_dyadic(const BuildDyadicOpts& o) {
  const InputFile space_file = load_input("space", o.space_path);
  auto space = std::make_shared<const indicatrix::PointCloudSpace>(
      indicatrix::io::read_space(o.space_path));

  indicatrix::DyadicParams params =
      indicatrix::default_params(*space, o.delta, o.k_min, o.k_max);
  if (o.scale) {
    params.scale = *o.scale;
    indicatrix::validate_params(*space, params);
  }
  log(kInfo, "building dyadic system over " + std::to_string(space->size()) + " points, k in [" +
                 std::to_string(params.k_min) + ", " + std::to_string(params.k_max) + "]");

  const indicatrix::DyadicSystem sys = indicatrix::build_dyadic_system(space, params);
  const indicatrix::PropertyReport rep = indicatrix::verify_properties(sys);
  const indicatrix::DoublingEstimate doubling =
      indicatrix::estimate_doubling(*space, o.trials, o.seed);

  json out = indicatrix::io::dyadic_to_json(sys);
  out["properties"] = json{{"p1", rep.p1},
                           {"p2", rep.p2},
                           {"p3", json{{"c", rep.c_emp}, {"C", rep.C_emp}, {"pass", rep.p3_pass}}},
                           {"p4", rep.p4}};
  out["doubling"] = json{{"lambda_hat", doubling.lambda_hat},
                         {"trials", doubling.trials},
                         {"worst_ball", json{{"center", doubling.worst_center},
                                             {"radius", doubling.worst_radius}}}};
  out["config"] = json{{"subcommand", "build-dyadic"},
                       {"delta", params.delta},
                       {"k_min", params.k_min},
                       {"k_max", params.k_max},
                       {"scale", params.scale},
                       {"trials", o.trials},
                       {"seed", o.seed},
                       {"strict", o.strict},
                       {"out", o.out_path},
                       {"inputs", inputs_to_json({space_file})}};
  write_report(o.out_path, out);

  int cubes = 0;
  for (int g = 0; g < sys.generation_count(); ++g)
    cubes += static_cast<int>(sys.generations[g].size());
  std::cout << "build-dyadic: " << sys.generation_count() << " generations, " << cubes
            << " cubes, p1=" << (rep.p1 ? "pass" : "FAIL")
            << " p2=" << (rep.p2 ? "pass" : "FAIL") << " p3=" << (rep.p3_pass ? "pass" : "FAIL")
            << " p4=" << (rep.p4 ? "pass" : "fail") << ", lambda_hat=" << doubling.lambda_hat
            << " -> " << o.out_path << "\n";
  if (o.strict && !(rep.p1 && rep.p2 && rep.p3_pass && rep.p4)) return kExitVerification;
  return kExitOk;
}

// ---- indicatrix -------------------------------------------------------------

struct IndicatrixOpts {
  std::string space_path;
  std::string map_path;
  std::string dyadic_path;
  std::string subset_path;  // optional
  std::string y_grid = "auto";
  double tolerance = 0.0;
  int threads = 1;
  std::string out_path;
};

std::vector<std::vector<double>> auto_y_grid(const indicatrix::SampledMapping& f) {
  std::vector<std::vector<double>> attained;
  for (indicatrix::PointId p = 0; p < f.size(); ++p)
    if (f.is_defined(p)) attained.push_back(f.values[p]);
  std::sort(attained.begin(), attained.end());
  attained.erase(std::unique(attained.begin(), attained.end()), attained.end());
  if (attained.empty()) throw indicatrix::SchemaError("mapping has no defined values");

  const int dim = static_cast<int>(attained.front().size());
  std::vector<double> lo = attained.front(), hi = attained.front();
  for (const auto& v : attained)
    for (int d = 0; d < dim; ++d) {
      lo[d] = std::min(lo[d], v[d]);
      hi[d] = std::max(hi[d], v[d]);
    }
  // a coarse uniform grid over the bounding box, about 32 extra probes
  int per_axis = std::max(2, static_cast<int>(std::floor(std::pow(32.0, 1.0 / dim))));
  if (dim == 1) per_axis = 33;
  std::vector<std::vector<double>> grid = attained;
  std::set<std::vector<double>> known(attained.begin(), attained.end());
  std::vector<int> idx(dim, 0);
  while (true) {
    std::vector<double> probe(dim);
    for (int d = 0; d < dim; ++d)
      probe[d] = lo[d] + (hi[d] - lo[d]) * idx[d] / (per_axis - 1);
    if (known.insert(probe).second) grid.push_back(probe);
    int d = 0;
    while (d < dim && ++idx[d] == per_axis) idx[d++] = 0;
    if (d == dim) break;
  }
  return grid;
}

int run_indicatrix(const IndicatrixOpts& o) {
  const InputFile space_file = load_input("space", o.space_path);
  const InputFile map_file = load_input("map", o.map_path);
  const InputFile dyadic_file = load_input("dyadic", o.dyadic_path);

  auto space = std::make_shared<const indicatrix::PointCloudSpace>(
      indicatrix::io::read_space(o.space_path));
  const indicatrix::SampledMapping f = indicatrix::io::read_mapping(o.map_path, space);
  const indicatrix::DyadicSystem sys =
      indicatrix::io::dyadic_from_json(indicatrix::io::parse_json(dyadic_file.content), space);

  std::vector<InputFile> inputs = {space_file, map_file, dyadic_file};
  std::vector<indicatrix::PointId> subset(space->size());
  for (int p = 0; p < space->size(); ++p) subset[p] = p;
  if (!o.subset_path.empty()) {
    const InputFile subset_file = load_input("subset", o.subset_path);
    subset = indicatrix::io::ids_from_json(indicatrix::io::parse_json(subset_file.content));
    inputs.push_back(subset_file);
  }

  std::vector<std::vector<double>> y_grid;
  if (o.y_grid == "auto") {
    y_grid = auto_y_grid(f);
  } else {
    const InputFile grid_file = load_input("y_grid", o.y_grid);
    y_grid = indicatrix::io::y_grid_from_json(indicatrix::io::parse_json(grid_file.content));
    inputs.push_back(grid_file);
  }

  const indicatrix::MatchRule rule{o.tolerance};
  const indicatrix::MultiplicityProfile prof =
      indicatrix::multiplicity_profile(f, sys, subset, y_grid, rule, o.threads);

  json yj = json::array();
  for (const auto& y : y_grid) yj.push_back(y);
  json levels = json::object();
  for (int g = 0; g < static_cast<int>(prof.levels.size()); ++g)
    levels[std::to_string(prof.k_min + g)] = prof.levels[g];
  json exact = json::array();
  for (const auto& y : y_grid)
    exact.push_back(indicatrix::exact_multiplicity(f, subset, y, rule));

  json out = json::object();
  out["y"] = std::move(yj);
  out["levels"] = std::move(levels);
  out["limit"] = prof.limit;
  out["exact"] = std::move(exact);
  out["unresolved"] = prof.unresolved;
  // the thread count is an execution knob, not a semantic parameter: output
  // bytes must not depend on it, so it is not echoed
  out["config"] = json{{"subcommand", "indicatrix"},
                       {"y_grid", o.y_grid},
                       {"tol", o.tolerance},
                       {"out", o.out_path},
                       {"inputs", inputs_to_json(inputs)}};
  write_report(o.out_path, out);
  std::cout << "indicatrix: " << y_grid.size() << " query values, "
            << prof.levels.size() << " generations, " << prof.unresolved.size()
            << " unresolved -> " << o.out_path << "\n";
  return kExitOk;
}

// ---- exhaust ---------------------------------------------------------------

struct ExhaustOpts {
  std::string space_path;
  std::string map_path;
  std::string schedule_path;
  std::string out_path;
  std::string redefined_out;  // optional
  std::string y0;             // optional "v1,v2,..."
};

int run_exhaust(const ExhaustOpts& o) {
  const InputFile space_file = load_input("space", o.space_path);
  const InputFile map_file = load_input("map", o.map_path);
  const InputFile schedule_file = load_input("schedule", o.schedule_path);

  auto space = std::make_shared<const indicatrix::PointCloudSpace>(
      indicatrix::io::read_space(o.space_path));
  const indicatrix::SampledMapping f = indicatrix::io::read_mapping(o.map_path, space);
  const auto schedule =
      indicatrix::io::schedule_from_json(indicatrix::io::parse_json(schedule_file.content));

  const indicatrix::ExhaustionSequence seq = indicatrix::build_exhaustion(f, schedule);

  json stages = json::array();
  for (const auto& s : seq.stages) stages.push_back(s);
  json bounds = json::array();
  for (const auto& b : seq.bounds) bounds.push_back(json{{"r", b.radius}, {"eps", b.bound}});

  json out = json::object();
  out["stages"] = std::move(stages);
  out["residual"] = seq.residual;
  out["residual_measure"] = seq.residual_measure;
  out["bounds"] = std::move(bounds);
  out["config"] = json{{"subcommand", "exhaust"},
                       {"y0", o.y0},
                       {"redefined_out", o.redefined_out},
                       {"out", o.out_path},
                       {"inputs", inputs_to_json({space_file, map_file, schedule_file})}};
  write_report(o.out_path, out);

  if (!o.redefined_out.empty()) {
    std::vector<double> y0;
    if (!o.y0.empty()) {
      for (const std::string& tok : indicatrix::io::detail::split(o.y0, ',')) {
        double v;
        if (!indicatrix::io::detail::parse_number(tok, v))
          throw indicatrix::SchemaError("bad y0 component \"" + tok + "\"");
        y0.push_back(v);
      }
    } else {
      // default: lexicographically smallest attained value
      for (indicatrix::PointId p = 0; p < f.size(); ++p)
        if (f.is_defined(p) && (y0.empty() || f.values[p] < y0)) y0 = f.values[p];
      if (y0.empty()) throw indicatrix::SchemaError("mapping has no defined values for y0");
    }
    const indicatrix::SampledMapping g =
        indicatrix::redefine_on_complement(f, seq.stages.back(), y0);
    indicatrix::io::write_text_file(
        o.redefined_out, indicatrix::io::dump_json(indicatrix::io::mapping_to_json(g)) + "\n");
  }

  std::cout << "exhaust: " << seq.stages.size() << " stages, last keeps "
            << seq.stages.back().size() << "/" << f.size()
            << " points, residual measure " << seq.residual_measure << " -> " << o.out_path
            << "\n";
  return kExitOk;
}

// ---- verify-banach / verify-cov ---------------------------------------------

struct VerifyOpts {
  std::string fn_path;   // CSV samples, or
  std::string builtin;   // sin | abs | quad | randpl:SEED:SEGMENTS
  int samples = 10000;
  int yres = 10000;
  double tolerance = 1e-6;
  std::string u = "1";       // cov only
  std::string intervals;     // cov only, "a:b,..."; empty = whole domain
  std::string out_path;
};

indicatrix::Sampled1DFunction resolve_function(const VerifyOpts& o,
                                               std::vector<InputFile>& inputs) {
  if (!o.fn_path.empty()) {
    const InputFile fn_file = load_input("fn", o.fn_path);
    inputs.push_back(fn_file);
    return indicatrix::io::function_from_csv(fn_file.content);
  }
  if (o.builtin == "sin") return indicatrix::builtin_sine(o.samples);
  if (o.builtin == "abs") return indicatrix::builtin_abs(o.samples);
  if (o.builtin == "quad") return indicatrix::builtin_quadratic(o.samples);
  if (o.builtin.rfind("randpl:", 0) == 0) {
    const auto rest = o.builtin.substr(7);
    const auto colon = rest.find(':');
    if (colon != std::string::npos) {
      try {
        const std::uint64_t seed = std::stoull(rest.substr(0, colon));
        const int segments = std::stoi(rest.substr(colon + 1));
        return indicatrix::builtin_random_pl(seed, segments);
      } catch (const std::exception&) {
      }
    }
    throw CLI::ValidationError("--builtin", "expected randpl:SEED:SEGMENTS");
  }
  throw CLI::ValidationError("--builtin",
                             "expected sin, abs, quad or randpl:SEED:SEGMENTS");
}

json verify_config(const char* subcommand, const VerifyOpts& o,
                   const std::vector<InputFile>& inputs, bool cov) {
  json j = json{{"subcommand", subcommand}};
  if (!o.fn_path.empty())
    j["fn"] = o.fn_path;
  else
    j["builtin"] = o.builtin;
  j["samples"] = o.samples;
  j["yres"] = o.yres;
  j["tol"] = o.tolerance;
  if (cov) {
    j["u"] = o.u;
    j["A"] = o.intervals.empty() ? "domain" : o.intervals;
  }
  j["out"] = o.out_path;
  j["inputs"] = inputs_to_json(inputs);
  return j;
}

int finish_verify(const char* subcommand, const VerifyOpts& o,
                  const indicatrix::IdentityReport& rep, const json& config) {
  json out = indicatrix::io::identity_report_to_json(rep);
  out["config"] = config;
  write_report(o.out_path, out);
  const bool ok = rep.abs_diff <= o.tolerance;
  std::cout << subcommand << ": lhs=" << indicatrix::io::format_double(rep.lhs)
            << " rhs=" << indicatrix::io::format_double(rep.rhs)
            << " abs_diff=" << indicatrix::io::format_double(rep.abs_diff)
            << (ok ? " (ok)" : " (EXCEEDS tol)") << " -> " << o.out_path << "\n";
  return ok ? kExitOk : kExitVerification;
}

int run_verify_banach(const VerifyOpts& o) {
  std::vector<InputFile> inputs;
  const indicatrix::Sampled1DFunction f = resolve_function(o, inputs);
  const indicatrix::IdentityReport rep = indicatrix::banach_check(f, o.yres, o.tolerance);
  return finish_verify("verify-banach", o, rep, verify_config("verify-banach", o, inputs, false));
}

int run_verify_cov(const VerifyOpts& o) {
  std::vector<InputFile> inputs;
  const indicatrix::Sampled1DFunction f = resolve_function(o, inputs);
  const indicatrix::Polynomial u = indicatrix::io::coeffs_from_arg(o.u);
  std::vector<indicatrix::Interval> A;
  if (o.intervals.empty())
    A.emplace_back(f.domain_min(), f.domain_max());
  else
    A = indicatrix::io::intervals_from_arg(o.intervals);
  const indicatrix::IdentityReport rep =
      indicatrix::change_of_variables_check(f, u, A, o.yres, o.tolerance);
  return finish_verify("verify-cov", o, rep, verify_config("verify-cov", o, inputs, true));
}

}  // namespace

int main(int argc, char** argv) {
  init_log_level();
  CLI::App app{"dyadic cube systems and Banach indicatrix toolkit"};
  app.require_subcommand(1);

  BuildDyadicOpts bd;
  CLI::App* bds = app.add_subcommand("build-dyadic",
                                     "construct a dyadic cube system over a point cloud");
  bds->add_option("--space", bd.space_path, "point-cloud file (CSV or JSON)")->required();
  bds->add_option("--delta", bd.delta, "scale ratio in (0,1)")->capture_default_str();
  bds->add_option("--kmin", bd.k_min, "coarsest generation")->capture_default_str();
  bds->add_option("--kmax", bd.k_max,
                  "finest generation (default: descend until cubes are singletons)");
  bds->add_option("--scale", bd.scale, "radius unit (default: fitted to the diameter)");
  bds->add_option("--trials", bd.trials, "doubling-estimate trials")->capture_default_str();
  bds->add_option("--seed", bd.seed, "doubling-estimate seed")->capture_default_str();
  bds->add_flag("--strict", bd.strict, "exit 1 unless all four properties pass");
  bds->add_option("--out", bd.out_path, "output JSON path")->required();

  IndicatrixOpts ix;
  CLI::App* ixs = app.add_subcommand("indicatrix",
                                     "multiplicity counts through a dyadic system");
  ixs->add_option("--space", ix.space_path, "point-cloud file")->required();
  ixs->add_option("--map", ix.map_path, "sampled-mapping file (CSV or JSON)")->required();
  ixs->add_option("--dyadic", ix.dyadic_path, "dyadic-system JSON")->required();
  ixs->add_option("--subset", ix.subset_path, "JSON array of point ids (default: all)");
  ixs->add_option("--y-grid", ix.y_grid, "query grid file, or auto")->capture_default_str();
  ixs->add_option("--tol", ix.tolerance, "codomain match tolerance")->capture_default_str();
  ixs->add_option("--threads", ix.threads, "worker threads")->capture_default_str();
  ixs->add_option("--out", ix.out_path, "output JSON path")->required();

  ExhaustOpts ex;
  CLI::App* exs = app.add_subcommand("exhaust",
                                     "increasing sets with bounded oscillation");
  exs->add_option("--space", ex.space_path, "point-cloud file")->required();
  exs->add_option("--map", ex.map_path, "sampled-mapping file")->required();
  exs->add_option("--schedule", ex.schedule_path, "JSON list of {\"r\":, \"eps\":}")
      ->required();
  exs->add_option("--out", ex.out_path, "output JSON path")->required();
  exs->add_option("--redefined-out", ex.redefined_out,
                  "also write the mapping redefined off the last stage");
  exs->add_option("--y0", ex.y0,
                  "redefinition value v1,v2,... (default: smallest attained value)");

  VerifyOpts vb;
  CLI::App* vbs = app.add_subcommand("verify-banach",
                                     "indicatrix integral against total variation");
  auto* vb_in = vbs->add_option_group("input");
  vb_in->add_option("--fn", vb.fn_path, "CSV of x,y samples");
  vb_in->add_option("--builtin", vb.builtin, "sin | abs | quad | randpl:SEED:SEGMENTS");
  vb_in->require_option(1);
  vbs->add_option("--samples", vb.samples, "sample count for builtins")->capture_default_str();
  vbs->add_option("--yres", vb.yres, "quadrature cells")->capture_default_str();
  vbs->add_option("--tol", vb.tolerance, "acceptance tolerance (see the builtin notes)")
      ->capture_default_str();
  vbs->add_option("--out", vb.out_path, "output JSON path")->required();

  VerifyOpts vc;
  CLI::App* vcs = app.add_subcommand("verify-cov", "change-of-variables identity");
  auto* vc_in = vcs->add_option_group("input");
  vc_in->add_option("--fn", vc.fn_path, "CSV of x,y samples");
  vc_in->add_option("--builtin", vc.builtin, "sin | abs | quad | randpl:SEED:SEGMENTS");
  vc_in->require_option(1);
  vcs->add_option("--samples", vc.samples, "sample count for builtins")->capture_default_str();
  vcs->add_option("--yres", vc.yres, "quadrature cells")->capture_default_str();
  vcs->add_option("--u", vc.u, "test polynomial c0,c1,...")->capture_default_str();
  vcs->add_option("--A", vc.intervals, "sub-intervals a1:b1,a2:b2 (default: whole domain)");
  vcs->add_option("--tol", vc.tolerance, "acceptance tolerance")->capture_default_str();
  vcs->add_option("--out", vc.out_path, "output JSON path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (bds->parsed()) return run_build_dyadic(bd);
    if (ixs->parsed()) return run_indicatrix(ix);
    if (exs->parsed()) return run_exhaust(ex);
    if (vbs->parsed()) return run_verify_banach(vb);
    if (vcs->parsed()) return run_verify_cov(vc);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "indicatrix: " << e.what() << "\n";
    return kExitUsage;
  } catch (const indicatrix::FileNotFound& e) {
    std::cerr << "indicatrix: " << e.what() << "\n";
    return kExitIo;
  } catch (const indicatrix::Error& e) {
    std::cerr << "indicatrix: " << e.what() << "\n";
    return kExitSchema;
  }
  return kExitUsage;
}

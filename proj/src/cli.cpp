#include "gptw/cli.hpp"

#include "gptw/csv.hpp"
#include "gptw/error.hpp"
#include "gptw/io.hpp"
#include "gptw/mountainpass.hpp"
#include "gptw/spectrum.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

namespace gptw::cli {

namespace fs = std::filesystem;

namespace {

const std::set<std::string> kKeys = {"c",     "T",   "N",         "size",  "R",     "seed",  "starts",
                                     "tol",   "max-iters", "nodes", "out", "count", "theta"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Resolved key/value settings with typed, validated access. Every value
// that is read (including defaults) is remembered for the config echo.
class Settings {
 public:
  explicit Settings(std::map<std::string, std::string> values) : values_(std::move(values)) {}

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  double real(const std::string& key, std::optional<double> fallback = {}) {
    const std::string text = raw(key, fallback ? std::optional(fmt17(*fallback)) : std::nullopt);
    return parse_real(key, text);
  }
  long long integer(const std::string& key, std::optional<long long> fallback = {}) {
    const std::string text = raw(key, fallback ? std::optional(std::to_string(*fallback)) : std::nullopt);
    std::size_t pos = 0;
    long long v = 0;
    try {
      v = std::stoll(text, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != text.size()) throw InvalidArgument(key + ": not an integer: '" + text + "'");
    return v;
  }
  std::vector<double> reals(const std::string& key, const std::string& fallback) {
    const std::string text = raw(key, fallback);
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_real(key, trim(item)));
    if (out.empty()) throw InvalidArgument(key + ": empty list");
    return out;
  }
  std::string text(const std::string& key, const std::string& fallback) { return raw(key, fallback); }

  const std::map<std::string, std::string>& used() const { return used_; }

 private:
  static double parse_real(const std::string& key, const std::string& text) {
    std::size_t pos = 0;
    double v = 0;
    try {
      v = std::stod(text, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != text.size() || !std::isfinite(v))
      throw InvalidArgument(key + ": not a finite number: '" + text + "'");
    return v;
  }
  std::string raw(const std::string& key, const std::optional<std::string>& fallback) {
    auto it = values_.find(key);
    std::string v;
    if (it != values_.end())
      v = it->second;
    else if (fallback)
      v = *fallback;
    else
      throw InvalidArgument("missing required setting '" + key + "'");
    used_[key] = v;
    return v;
  }
  std::map<std::string, std::string> values_;
  std::map<std::string, std::string> used_;
};

int to_int(long long v, const char* what, long long lo, long long hi) {
  if (v < lo || v > hi)
    throw InvalidArgument(std::string(what) + " must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return static_cast<int>(v);
}

struct Context {
  std::string command;
  Settings& settings;
  std::ostream& out;
  std::ostream& err;
};

fs::path prepare_output(Context& ctx) {
  fs::path dir = ctx.settings.text("out", "gptw_output");
  fs::create_directories(dir);
  return dir;
}

void echo_config(Context& ctx, const fs::path& dir) {
  std::ofstream os(dir / "config.txt");
  os << "# gptw " << ctx.command << '\n';
  for (const auto& [k, v] : ctx.settings.used()) os << k << " = " << v << '\n';
}

void write_text(const fs::path& file, const std::string& text) {
  std::ofstream os(file, std::ios::binary);
  if (!os) throw Error("cannot write " + file.string());
  os << text;
}

TorusGrid grid_from(Settings& s, double default_T, int default_size) {
  const int N = to_int(s.integer("N", 2), "N", 2, 3);
  const int size = to_int(s.integer("size", N == 2 ? default_size : 64), "size", 8, 1 << 14);
  const double T = s.real("T", default_T);
  return TorusGrid::cube(N, size, T);
}

std::string report_block(const CriticalPoint& cp, double c) {
  return report_csv_header() + "\n" + report_csv_row(cp.field.grid(), c, cp.report, cp.certificates) + "\n";
}

int cmd_minimize(Context& ctx) {
  auto& s = ctx.settings;
  const double c = s.real("c", 1.0);
  const auto grid = grid_from(s, 40.0, 256);
  const double R = s.real("R", 8.0);
  MinimizeOptions opts;
  opts.grad_tol = s.real("tol", 0.0);
  opts.max_iters = to_int(s.integer("max-iters", 50000), "max-iters", 1, 1 << 30);
  const auto dir = prepare_output(ctx);
  std::ofstream log(dir / "progress.log");
  opts.log = &log;
  const auto init = ansatz::vortex_test_function(VortexAnsatz::with_defaults(R), grid);
  echo_config(ctx, dir);
  auto result = theorem_E_experiment(init, c, opts);
  write_gptw(dir / "field.gptw", result.point.field, c);
  write_text(dir / "experiment.csv", experiment_csv_header() + "\n" + to_csv(result.row) + "\n");
  write_text(dir / "report.csv", report_block(result.point, c));
  ctx.out << experiment_csv_header() << '\n' << to_csv(result.row) << '\n';
  return result.point.converged ? kExitOk : kExitNotConverged;
}

int cmd_mp(Context& ctx) {
  auto& s = ctx.settings;
  const double c = s.real("c", 1.0);
  const auto grid = grid_from(s, 40.0, 256);
  const double R = s.real("R", 8.0);
  const int nodes = to_int(s.integer("nodes", 33), "nodes", 3, 100000);
  RelaxOptions relax;
  relax.max_sweeps = to_int(s.integer("max-iters", 4000), "max-iters", 0, 1 << 30);
  SaddleOptions saddle_opts;
  saddle_opts.grad_tol = s.real("tol", 0.0);
  saddle_opts.seed = static_cast<std::uint64_t>(s.integer("seed", 1));
  const auto dir = prepare_output(ctx);
  std::ofstream log(dir / "progress.log");
  relax.log = &log;
  saddle_opts.log = &log;
  echo_config(ctx, dir);

  const Params p{.c = c};
  const auto path = init_path(c, grid, R, nodes);
  const auto relaxed = relax_path(path, p, relax);
  fs::create_directories(dir / "path");
  std::ostringstream actions;
  actions << "node,action\n";
  for (std::size_t j = 0; j < relaxed.path.nodes.size(); ++j) {
    char name[32];
    std::snprintf(name, sizeof name, "node_%03zu.gptw", j);
    write_gptw(dir / "path" / name, relaxed.path.nodes[j], c);
    actions << j << ',' << fmt17(relaxed.actions[j]) << '\n';
  }
  write_text(dir / "path_actions.csv", actions.str());

  std::ostringstream summary;
  summary << "c,T,M,gamma,saddle_action,residual,witness_quotient,classification,converged,level_in_range\n";
  try {
    const auto sr = find_saddle(relaxed.path, p, saddle_opts);
    write_gptw(dir / "saddle.gptw", sr.saddle.field, c);
    write_text(dir / "saddle_certificate.csv", report_block(sr.saddle, c));
    summary << fmt17(c) << ',' << fmt17(grid.period()) << ',' << fmt17(sr.upper_bound) << ',' << fmt17(sr.gamma) << ','
            << fmt17(sr.saddle.report.action) << ',' << fmt17(sr.saddle.residual) << ','
            << fmt17(sr.witness_quotient) << ',' << to_string(sr.saddle.classification) << ','
            << (sr.saddle.converged ? 1 : 0) << ',' << (sr.level_in_range ? 1 : 0) << '\n';
    write_text(dir / "mp_summary.csv", summary.str());
    ctx.out << summary.str();
    return sr.saddle.converged ? kExitOk : kExitNotConverged;
  } catch (const NotASaddle& e) {
    ctx.err << "gptw mp: " << e.what() << '\n';
    return kExitNotConverged;
  }
}

int cmd_spectrum(Context& ctx, bool pgm) {
  auto& s = ctx.settings;
  const double c = s.real("c", 1.0);
  const auto grid = grid_from(s, 2 * std::numbers::pi, 32);
  const int count = to_int(s.integer("count", 5), "count", 1, 1000);
  const double theta = s.real("theta", 0.0);
  const auto dir = prepare_output(ctx);
  echo_config(ctx, dir);
  const auto report = hessian_spectrum_at_constant(theta, Params{.c = c}, grid, count);
  write_text(dir / "spectrum.csv", spectrum_csv(report));
  if (pgm) {
    std::vector<double> cs, Ts;
    for (int i = 0; i < 10; ++i) cs.push_back(0.15 + 0.3 * i);
    for (int j = 0; j < 10; ++j) Ts.push_back(1.0 + 1.1 * j);
    std::ofstream os(dir / "positivity.pgm");
    write_positivity_pgm(os, positivity_lattice(cs, Ts));
  }
  ctx.out << "smallest " << fmt17(report.smallest_eigenvalues.front().value) << " analytic "
          << fmt17(report.analytic_min) << " positivity " << (report.positivity ? 1 : 0) << '\n';
  return kExitOk;
}

int cmd_scan(Context& ctx) {
  auto& s = ctx.settings;
  const double c = s.real("c", 1.0);
  const auto Ts = s.reals("T", "1,1.5,2,2.5,3,3.5,4,4.5,5");
  const int starts = to_int(s.integer("starts", 20), "starts", 1, 1 << 20);
  const int size = to_int(s.integer("size", 32), "size", 8, 1 << 14);
  ScanOptions opts;
  opts.seed = static_cast<std::uint64_t>(s.integer("seed", 0));
  opts.R = s.real("R", 8.0);
  opts.minimize.grad_tol = s.real("tol", 0.0);
  opts.minimize.max_iters = to_int(s.integer("max-iters", 50000), "max-iters", 1, 1 << 30);
  const auto dir = prepare_output(ctx);
  echo_config(ctx, dir);
  const auto report = constancy_scan(c, Ts, starts, size, opts);
  write_text(dir / "scan.csv", threshold_csv(report));
  write_text(dir / "scan_summary.csv", threshold_summary_csv(report));
  ctx.out << threshold_summary_csv(report);
  return kExitOk;
}

int cmd_testfn(Context& ctx) {
  auto& s = ctx.settings;
  const double c = s.real("c", 1.0);
  const int N = to_int(s.integer("N", 2), "N", 2, 3);
  const auto radii = s.reals("R", "4,8,16,32");
  const auto dir = prepare_output(ctx);
  echo_config(ctx, dir);
  const auto rows = ansatz::scaling_table(radii, c, N);
  std::ostringstream os;
  os << "R,T,size,kinetic,potential,momentum,action\n";
  std::vector<double> r, mom;
  for (const auto& row : rows) {
    os << fmt17(row.R) << ',' << fmt17(row.T) << ',' << row.size << ',' << fmt17(row.report.kinetic) << ','
       << fmt17(row.report.potential) << ',' << fmt17(row.report.momentum) << ',' << fmt17(row.report.action)
       << '\n';
    r.push_back(row.R);
    mom.push_back(row.report.momentum);
  }
  write_text(dir / "testfn.csv", os.str());
  if (rows.size() >= 2) {
    const std::string summary = "momentum_slope\n" + fmt17(ansatz::loglog_slope(r, mom)) + "\n";
    write_text(dir / "testfn_summary.csv", summary);
    ctx.out << summary;
  }
  return kExitOk;
}

int cmd_certify(Context& ctx, const std::string& file) {
  auto& s = ctx.settings;
  const auto stored = read_gptw(fs::path(file));
  const double c = s.has("c") ? s.real("c") : stored.c;
  const auto cp = analyze(stored.field, Params{.c = c});
  const std::string block = report_block(cp, c);
  ctx.out << block;
  ctx.out << "classification " << to_string(cp.classification) << " worst " << fmt17(cp.certificates.worst());
  if (!cp.certificates.note.empty()) ctx.out << " (" << cp.certificates.note << ')';
  ctx.out << '\n';
  if (s.has("out")) {
    const auto dir = prepare_output(ctx);
    echo_config(ctx, dir);
    write_text(dir / "certificate.csv", block);
  }
  return kExitOk;
}

int cmd_info(Context& ctx, const std::string& file) {
  const auto stored = read_gptw(fs::path(file));
  const auto& f = stored.field;
  const auto& g = f.grid();
  ctx.out << "dimension " << g.dim() << "\nsizes";
  for (int a = 0; a < g.dim(); ++a) ctx.out << ' ' << g.size(a);
  ctx.out << "\nperiod " << fmt17(g.period()) << "\nspeed " << fmt17(stored.c) << "\nnodes " << g.node_count()
          << "\nmin_modulus " << fmt17(f.values().cwiseAbs().minCoeff()) << "\nmax_modulus "
          << fmt17(f.values().cwiseAbs().maxCoeff()) << "\naction "
          << fmt17(action(f, Params{.c = stored.c}).action) << "\nclassification " << to_string(classify(f))
          << '\n';
  return kExitOk;
}

}  // namespace

std::map<std::string, std::string> parse_config(std::istream& is) {
  std::map<std::string, std::string> out;
  std::string line;
  int number = 0;
  while (std::getline(is, line)) {
    ++number;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InvalidArgument("config line " + std::to_string(number) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!kKeys.count(key) || key == "config")
      throw InvalidArgument("config line " + std::to_string(number) + ": unknown key '" + key + "'");
    if (value.empty()) throw InvalidArgument("config line " + std::to_string(number) + ": empty value");
    out[key] = value;
  }
  return out;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pseudospectral workbench for periodic traveling waves of the Gross-Pitaevskii equation", "gptw"};
  app.require_subcommand(1, 1);

  std::map<std::string, std::string> given;
  std::string config_file, file;
  bool pgm = false;

  auto add = [&](CLI::App* sub, const std::string& key, const std::string& help) {
    sub->add_option_function<std::string>(
        "--" + key, [&given, key](const std::string& v) { given[key] = v; }, help);
  };
  auto common = [&](CLI::App* sub, std::initializer_list<const char*> keys) {
    static const std::map<std::string, std::string> help = {
        {"c", "wave speed"},
        {"T", "period (scan: comma-separated list)"},
        {"N", "dimension, 2 or 3"},
        {"size", "grid points per axis"},
        {"R", "vortex-pair radius (testfn: comma-separated list)"},
        {"seed", "random seed"},
        {"starts", "random starts per period"},
        {"tol", "residual tolerance (<= 0: 1e-8 T^{N/2})"},
        {"max-iters", "iteration budget"},
        {"nodes", "path node count"},
        {"out", "output directory"},
        {"count", "number of eigenvalues"},
        {"theta", "phase of the constant"},
    };
    for (const char* k : keys) add(sub, k, help.at(k));
    sub->add_option("--config", config_file, "key = value settings file; flags override it");
  };

  auto* minimize = app.add_subcommand("minimize", "descend the action from 1 + w_R");
  common(minimize, {"c", "T", "N", "size", "R", "tol", "max-iters", "out"});
  auto* mp = app.add_subcommand("mp", "mountain-pass path relaxation and saddle refinement");
  common(mp, {"c", "T", "N", "size", "R", "seed", "tol", "max-iters", "nodes", "out"});
  auto* spectrum = app.add_subcommand("spectrum", "Hessian spectrum at a constant solution");
  common(spectrum, {"c", "T", "N", "size", "count", "theta", "out"});
  spectrum->add_flag("--pgm", pgm, "also write the (c, T) positivity image");
  auto* scan = app.add_subcommand("scan", "multi-start constancy scan over periods");
  common(scan, {"c", "T", "size", "R", "seed", "starts", "tol", "max-iters", "out"});
  auto* testfn = app.add_subcommand("testfn", "scaling table of 1 + w_R over radii");
  common(testfn, {"c", "N", "R", "out"});
  auto* certify = app.add_subcommand("certify", "certificate report for a stored field");
  common(certify, {"c", "out"});
  certify->add_option("file", file, "GPTW field file")->required();
  auto* info = app.add_subcommand("info", "metadata of a GPTW field file");
  info->add_option("file", file, "GPTW field file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  CLI::App* chosen = app.get_subcommands().front();
  try {
    std::map<std::string, std::string> values;
    if (!config_file.empty()) {
      std::ifstream is(config_file);
      if (!is) throw InvalidArgument("cannot read config file " + config_file);
      values = parse_config(is);
    }
    for (const auto& [k, v] : given) values[k] = v;
    Settings settings(std::move(values));
    Context ctx{chosen->get_name(), settings, out, err};
    const std::string& name = ctx.command;
    if (name == "minimize") return cmd_minimize(ctx);
    if (name == "mp") return cmd_mp(ctx);
    if (name == "spectrum") return cmd_spectrum(ctx, pgm);
    if (name == "scan") return cmd_scan(ctx);
    if (name == "testfn") return cmd_testfn(ctx);
    if (name == "certify") return cmd_certify(ctx, file);
    return cmd_info(ctx, file);
  } catch (const NoConvergence& e) {
    err << "gptw " << chosen->get_name() << ": " << e.what() << '\n';
    return kExitNotConverged;
  } catch (const NotASaddle& e) {
    err << "gptw " << chosen->get_name() << ": " << e.what() << '\n';
    return kExitNotConverged;
  } catch (const NonFiniteValue& e) {
    err << "gptw " << chosen->get_name() << ": " << e.what() << '\n';
    return kExitNotConverged;
  } catch (const Error& e) {
    // Remaining workbench errors are validation failures of the input.
    err << "gptw " << chosen->get_name() << ": " << e.what() << '\n';
    return kExitValidation;
  } catch (const fs::filesystem_error& e) {
    err << "gptw " << chosen->get_name() << ": " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "gptw " << chosen->get_name() << ": " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace gptw::cli

// fmpp command line tool: simulation and summary-statistic analysis of
// functional marked point patterns through the fmpp C API.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cli_util.hpp"
#include "config.hpp"
#include "fmpp/fmpp.h"
#include "svg.hpp"

namespace {

using fmppcli::CliError;
using fmppcli::check;

template <typename T, void (*Destroy)(T*)>
using Handle = std::unique_ptr<T, std::integral_constant<void (*)(T*), Destroy>>;

using WindowH = Handle<fmpp_window, fmpp_window_destroy>;
using PatternH = Handle<fmpp_pattern, fmpp_pattern_destroy>;
using IntensityH = Handle<fmpp_intensity, fmpp_intensity_destroy>;
using QueryH = Handle<fmpp_query, fmpp_query_destroy>;
using KResultH = Handle<fmpp_kresult, fmpp_kresult_destroy>;
using EnvelopeH = Handle<fmpp_envelope, fmpp_envelope_destroy>;

/// Effective options of a run (config file values overridden by flags);
/// echoed into the provenance record.
struct Options {
  std::map<std::string, std::string> values;

  const std::string& get(const std::string& key) const {
    return values.at(key);
  }
  bool has(const std::string& key) const { return values.count(key) > 0; }
};

/// Output files are registered before writing and removed when a run fails.
struct OutputGuard {
  std::vector<std::string> paths;
  bool committed = false;

  void add(const std::string& p) {
    if (!p.empty()) paths.push_back(p);
  }
  ~OutputGuard() {
    if (committed) return;
    for (const std::string& p : paths) std::remove(p.c_str());
  }
};

WindowH parse_window(const std::string& spec) {
  fmpp_window* w = nullptr;
  check(fmpp_window_parse(spec.c_str(), &w));
  return WindowH(w);
}

PatternH load_pattern(const Options& opt) {
  WindowH w = parse_window(opt.get("window"));
  fmpp_pattern* p = nullptr;
  check(fmpp_pattern_load_csv(opt.get("points").c_str(),
                              opt.get("curves").c_str(), w.get(), &p));
  return PatternH(p);
}

QueryH build_query(const Options& opt, const std::vector<double>& rgrid) {
  int order = std::stoi(opt.get("order"));
  fmpp_query* q = nullptr;
  check(fmpp_query_new(order, &q));
  QueryH qh(q);
  check(fmpp_query_set_rgrid(q, rgrid.data(), rgrid.size()));
  check(fmpp_query_set_test_function(q, opt.get("test-fn").c_str()));
  check(fmpp_query_set_correction(q, opt.get("correction").c_str()));
  check(fmpp_query_set_normalization(q, opt.get("norm").c_str()));
  check(fmpp_query_set_mark_set(q, 0, opt.get("mark-set").c_str()));
  for (int s = 1; s < order; ++s) {
    std::string key = "mark-set-" + std::to_string(s);
    check(fmpp_query_set_mark_set(q, s, opt.get(key).c_str()));
    std::string ekey = s == 1 ? "elem" : "elem-" + std::to_string(s);
    check(fmpp_query_set_elem(q, s - 1, opt.get(ekey).c_str()));
  }
  return qh;
}

int threads_of(const Options& opt) { return std::stoi(opt.get("threads")); }

uint64_t seed_of(const Options& opt) {
  return static_cast<uint64_t>(std::stoull(opt.get("seed")));
}

void write_provenance(const std::string& command, const Options& opt,
                      const std::string& path, OutputGuard& guard) {
  if (path.empty()) return;
  guard.add(path);
  fmppcli::write_text_file(path,
                           fmppcli::provenance_json(command, opt.values));
}

int run_estimate(const Options& opt) {
  OutputGuard guard;
  PatternH p = load_pattern(opt);
  std::vector<double> rgrid = fmppcli::parse_rgrid(opt.get("r"));
  QueryH q = build_query(opt, rgrid);
  fmpp_intensity* m = nullptr;
  check(fmpp_intensity_fit(p.get(), opt.get("intensity").c_str(), &m));
  IntensityH mh(m);
  fmpp_kresult* k = nullptr;
  check(fmpp_estimate_k(p.get(), q.get(), m, threads_of(opt), &k));
  KResultH kh(k);

  const std::string out_csv = opt.get("out-csv");
  guard.add(out_csv);
  check(fmpp_kresult_write_csv(k, out_csv.c_str()));

  if (opt.has("out-svg") && !opt.get("out-svg").empty()) {
    fmppcli::PlotSeries s;
    s.label = "estimate";
    for (size_t i = 0; i < fmpp_kresult_size(k); ++i) {
      s.x.push_back(fmpp_kresult_r(k, i));
      s.y.push_back(fmpp_kresult_available(k, i)
                        ? fmpp_kresult_value(k, i)
                        : std::nan(""));
    }
    fmppcli::PlotLabels labels{"K estimate", "r", "K(r)"};
    guard.add(opt.get("out-svg"));
    fmppcli::write_text_file(opt.get("out-svg"),
                             fmppcli::plot_svg({s}, std::nullopt, labels));
  }
  write_provenance("estimate", opt, opt.get("out-json"), guard);
  if (fmpp_kresult_empty_conditioning(k))
    std::cerr << "warning: conditioning mark set selected no points\n";
  if (long long fl = fmpp_kresult_floored_tuples(k); fl > 0)
    std::cerr << "warning: " << fl
              << " tuples used the intensity evaluation floor\n";
  guard.committed = true;
  return 0;
}

int run_envelope(const Options& opt) {
  OutputGuard guard;
  PatternH p = load_pattern(opt);
  std::vector<double> rgrid = fmppcli::parse_rgrid(opt.get("r"));
  QueryH q = build_query(opt, rgrid);
  fmpp_envelope* e = nullptr;
  check(fmpp_run_envelope(p.get(), q.get(), opt.get("intensity").c_str(),
                          opt.get("null").c_str(),
                          std::stoi(opt.get("nsim")), seed_of(opt),
                          opt.get("transform").c_str(), threads_of(opt), &e));
  EnvelopeH eh(e);

  const std::string out_csv = opt.get("out-csv");
  guard.add(out_csv);
  check(fmpp_envelope_write_csv(e, out_csv.c_str()));

  if (opt.has("out-svg") && !opt.get("out-svg").empty()) {
    fmppcli::PlotSeries data, mean;
    data.label = "data";
    mean.label = "null mean";
    mean.color = "#c05020";
    fmppcli::PlotBand band;
    for (size_t i = 0; i < fmpp_envelope_size(e); ++i) {
      double r = fmpp_envelope_r(e, i);
      bool ok = fmpp_envelope_available(e, i);
      data.x.push_back(r);
      mean.x.push_back(r);
      data.y.push_back(ok ? fmpp_envelope_stat(e, i) : std::nan(""));
      mean.y.push_back(ok ? fmpp_envelope_mean(e, i) : std::nan(""));
      band.x.push_back(r);
      band.lo.push_back(ok ? fmpp_envelope_lo(e, i) : std::nan(""));
      band.hi.push_back(ok ? fmpp_envelope_hi(e, i) : std::nan(""));
    }
    fmppcli::PlotLabels labels{"envelope test", "r", "statistic"};
    guard.add(opt.get("out-svg"));
    fmppcli::write_text_file(
        opt.get("out-svg"), fmppcli::plot_svg({data, mean}, band, labels));
  }
  write_provenance("envelope", opt, opt.get("out-json"), guard);
  guard.committed = true;
  return 0;
}

int run_intensity(const Options& opt) {
  OutputGuard guard;
  PatternH p = load_pattern(opt);
  fmpp_intensity* m = nullptr;
  check(fmpp_intensity_fit(p.get(), opt.get("intensity").c_str(), &m));
  IntensityH mh(m);

  WindowH w = parse_window(opt.get("window"));
  int res = std::stoi(opt.get("grid-res"));
  if (res < 2) throw CliError(FMPP_ERR_INVALID_ARGUMENT, "grid-res >= 2");
  const std::string out_csv = opt.get("out-csv");
  guard.add(out_csv);
  FILE* f = std::fopen(out_csv.c_str(), "w");
  if (!f) throw CliError(FMPP_ERR_IO, "cannot write " + out_csv);
  std::fputs("x,y,rho\n", f);
  // midpoint lattice over the window bounding box; outside nodes skipped
  double xmin, xmax, ymin, ymax;
  check(fmpp_window_bbox(w.get(), &xmin, &xmax, &ymin, &ymax));
  for (int i = 0; i < res; ++i)
    for (int j = 0; j < res; ++j) {
      double x = xmin + (xmax - xmin) * (i + 0.5) / res;
      double y = ymin + (ymax - ymin) * (j + 0.5) / res;
      double rho = 0;
      if (fmpp_intensity_eval(m, x, y, -1, &rho) != FMPP_OK) continue;
      std::fprintf(f, "%.10g,%.10g,%.10g\n", x, y, rho);
    }
  std::fclose(f);
  write_provenance("intensity", opt, opt.get("out-json"), guard);
  guard.committed = true;
  return 0;
}

int run_simulate(const Options& opt) {
  OutputGuard guard;
  WindowH w = parse_window(opt.get("window"));
  std::vector<double> grid = fmppcli::parse_rgrid(opt.get("grid"));
  if (grid.size() < 2)
    throw CliError(FMPP_ERR_INVALID_ARGUMENT, "time grid needs >= 2 points");
  double step = grid[1] - grid[0];
  fmpp_pattern* p = nullptr;
  check(fmpp_simulate(w.get(), opt.get("ground").c_str(),
                      opt.get("marks").c_str(), grid.front(), grid.back(),
                      step, seed_of(opt), &p));
  PatternH ph(p);

  std::string out = opt.get("out");
  auto comma = out.find(',');
  if (comma == std::string::npos)
    throw CliError(FMPP_ERR_INVALID_ARGUMENT,
                   "--out needs points.csv,curves.csv");
  std::string points_path = out.substr(0, comma);
  std::string curves_path = out.substr(comma + 1);
  guard.add(points_path);
  guard.add(curves_path);
  check(fmpp_pattern_save_csv(p, points_path.c_str(), curves_path.c_str()));
  write_provenance("simulate", opt, opt.get("out-json"), guard);
  std::cout << "simulated " << fmpp_pattern_size(p) << " points\n";
  guard.committed = true;
  return 0;
}

int run_lisa(const Options& opt) {
  OutputGuard guard;
  WindowH w = parse_window(opt.get("window"));
  std::vector<double> hgrid = fmppcli::parse_rgrid(opt.get("grid"));
  fmpp_pattern* base = nullptr;
  check(fmpp_pattern_load_points_csv(opt.get("points").c_str(), w.get(),
                                     hgrid.data(), hgrid.size(), &base));
  PatternH baseh(base);
  fmpp_pattern* lisa = nullptr;
  check(fmpp_lisa(base, hgrid.data(), hgrid.size(), &lisa));
  PatternH lisah(lisa);

  std::string out = opt.get("out");
  auto comma = out.find(',');
  if (comma == std::string::npos)
    throw CliError(FMPP_ERR_INVALID_ARGUMENT,
                   "--out needs points.csv,curves.csv");
  std::string points_path = out.substr(0, comma);
  std::string curves_path = out.substr(comma + 1);
  guard.add(points_path);
  guard.add(curves_path);
  check(fmpp_pattern_save_csv(lisa, points_path.c_str(), curves_path.c_str()));
  write_provenance("lisa", opt, opt.get("out-json"), guard);
  guard.committed = true;
  return 0;
}

int run_coverage(const Options& opt) {
  OutputGuard guard;
  PatternH p = load_pattern(opt);
  double frac = 0;
  check(fmpp_coverage_fraction(p.get(), std::stod(opt.get("time")),
                               std::stoi(opt.get("res")), &frac));
  std::cout << frac << "\n";
  if (opt.has("out-csv") && !opt.get("out-csv").empty()) {
    guard.add(opt.get("out-csv"));
    fmppcli::write_text_file(opt.get("out-csv"),
                             "t,coverage\n" + opt.get("time") + "," +
                                 std::to_string(frac) + "\n");
  }
  write_provenance("coverage", opt, opt.get("out-json"), guard);
  guard.committed = true;
  return 0;
}

int run_selftest(const Options& opt) {
  std::vector<char> buf(1 << 16);
  int failed = 0;
  check(fmpp_selftest(std::stoi(opt.get("nsim")), seed_of(opt), buf.data(),
                      buf.size(), &failed));
  std::cout << buf.data();
  std::cout << (failed == 0 ? "selftest: all checks passed\n"
                            : "selftest: FAILURES\n");
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"functional marked point pattern analysis"};
  app.require_subcommand(1);

  std::string config_path;

  // every option is declared per subcommand as a string so config-file
  // values and flags merge uniformly (flags win)
  struct Spec {
    std::string key, help, fallback;
    bool required = false;
  };
  const std::vector<Spec> common = {
      {"threads", "worker thread cap (0 = auto)", "0"},
      {"seed", "root RNG seed", "1"},
      {"out-json", "provenance JSON path", ""},
  };
  const std::map<std::string, std::vector<Spec>> spec_by_cmd = {
      {"estimate",
       {{"points", "points CSV (id,x,y[,label][,scalar])", "", true},
        {"curves", "curves CSV (id,t,value)", "", true},
        {"window", "rect(xmin,xmax,ymin,ymax) or poly(x,y ...)", "", true},
        {"r", "r grid start:stop:step", "", true},
        {"order", "tuple order n (2 or 3)", "2"},
        {"test-fn", "one|lp:p|sup|kl|inner|deriv:k|vario|aux-prod|aux-vario, "
                    "'+' sums, max(...)", "one"},
        {"mark-set", "conditioning mark set", "all"},
        {"mark-set-1", "first neighbour mark set", "all"},
        {"mark-set-2", "second neighbour mark set (order 3)", "all"},
        {"elem", "ball|sector:phi,psi|box:ax,ay", "ball"},
        {"elem-2", "second-slot element (order 3)", "ball"},
        {"correction", "minus|trans|iso|none", "trans"},
        {"intensity", "homog|const:rho|kernel[:h]|grid:csv", "homog"},
        {"norm", "raw|hamilton|ground", "hamilton"},
        {"out-csv", "result CSV path", "", true},
        {"out-svg", "plot SVG path", ""}}},
      {"envelope",
       {{"points", "points CSV", "", true},
        {"curves", "curves CSV", "", true},
        {"window", "observation window", "", true},
        {"r", "r grid start:stop:step", "", true},
        {"order", "tuple order n", "2"},
        {"test-fn", "test function", "one"},
        {"mark-set", "conditioning mark set", "all"},
        {"mark-set-1", "first neighbour mark set", "all"},
        {"mark-set-2", "second neighbour mark set", "all"},
        {"elem", "structuring element", "ball"},
        {"elem-2", "second-slot element", "ball"},
        {"correction", "minus|trans|iso|none", "trans"},
        {"intensity", "intensity spec", "homog"},
        {"norm", "raw|hamilton|ground", "hamilton"},
        {"null", "poisson|poisson:inhom|relabel", "poisson"},
        {"nsim", "null replicates", "39"},
        {"transform", "identity|cbrt", "identity"},
        {"out-csv", "result CSV path", "", true},
        {"out-svg", "plot SVG path", ""}}},
      {"intensity",
       {{"points", "points CSV", "", true},
        {"curves", "curves CSV", "", true},
        {"window", "observation window", "", true},
        {"intensity", "homog|kernel[:h]|grid:csv", "kernel"},
        {"grid-res", "output lattice resolution", "64"},
        {"out-csv", "x,y,rho CSV path", "", true}}},
      {"simulate",
       {{"window", "observation window", "", true},
        {"ground", "poisson:rho|binomial:n|lgcp:mu=..,sig2=..,phi=..", "",
         true},
        {"marks", "brownian:..|geostat:..|intdep:..|gi:..", "", true},
        {"grid", "time grid start:stop:step", "", true},
        {"out", "points.csv,curves.csv", "", true}}},
      {"lisa",
       {{"points", "points CSV", "", true},
        {"window", "observation window", "", true},
        {"grid", "h grid start:stop:step", "", true},
        {"out", "points.csv,curves.csv", "", true}}},
      {"coverage",
       {{"points", "points CSV", "", true},
        {"curves", "curves CSV", "", true},
        {"window", "observation window", "", true},
        {"time", "evaluation time", "", true},
        {"res", "lattice resolution", "512"},
        {"out-csv", "optional CSV path", ""}}},
      {"selftest", {{"nsim", "replicates per check", "100"}}},
  };

  std::map<std::string, std::map<std::string, std::string>> flag_values;
  std::map<std::string, CLI::App*> subs;
  for (const auto& [cmd, specs] : spec_by_cmd) {
    CLI::App* sub = app.add_subcommand(cmd);
    subs[cmd] = sub;
    sub->add_option("--config", config_path, "key = value config file");
    for (const Spec& s : specs)
      sub->add_option("--" + s.key, flag_values[cmd][s.key], s.help);
    for (const Spec& s : common)
      sub->add_option("--" + s.key, flag_values[cmd][s.key], s.help);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    std::map<std::string, std::string> config;
    if (!config_path.empty()) config = fmppcli::load_config_file(config_path);

    std::string cmd;
    for (const auto& [name, sub] : subs)
      if (sub->parsed()) cmd = name;

    Options opt;
    auto fill = [&](const Spec& s) {
      const CLI::Option* o = subs[cmd]->get_option("--" + s.key);
      if (o->count() > 0) {
        opt.values[s.key] = flag_values[cmd][s.key];  // flag wins
      } else if (auto it = config.find(s.key); it != config.end()) {
        opt.values[s.key] = it->second;
      } else if (!s.required) {
        opt.values[s.key] = s.fallback;
      } else {
        throw CliError(FMPP_ERR_INVALID_ARGUMENT,
                       "missing required option --" + s.key);
      }
    };
    for (const Spec& s : spec_by_cmd.at(cmd)) fill(s);
    for (const Spec& s : common) fill(s);

    if (cmd == "estimate") return run_estimate(opt);
    if (cmd == "envelope") return run_envelope(opt);
    if (cmd == "intensity") return run_intensity(opt);
    if (cmd == "simulate") return run_simulate(opt);
    if (cmd == "lisa") return run_lisa(opt);
    if (cmd == "coverage") return run_coverage(opt);
    if (cmd == "selftest") return run_selftest(opt);
    throw CliError(FMPP_ERR_INVALID_ARGUMENT, "unknown command");
  } catch (const CliError& e) {
    std::cerr << "error (" << fmpp_status_name(e.code()) << "): " << e.what()
              << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error (internal): " << e.what() << "\n";
    return static_cast<int>(FMPP_ERR_INTERNAL);
  }
}

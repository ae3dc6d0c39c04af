// Acceptance suite: one check per release criterion, each printing a single
// PASS/FAIL line. Run with no arguments for all checks or with a criterion
// number. The end-to-end check needs FMPP_CLI (path to the CLI binary) and
// FMPP_DATA (path to the bundled dataset directory) in the environment.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "csvio.hpp"
#include "envelopes.hpp"
#include "oracles.hpp"
#include "simulate.hpp"
#include "summaries.hpp"

#include "json.hpp"

using namespace fmpp;

namespace {

const Window kUnit = Window::rect(0, 1, 0, 1);
int g_failures = 0;

void report(int criterion, const std::string& name, bool passed,
            const std::string& detail) {
  std::printf("%s criterion %d: %s (%s)\n", passed ? "PASS" : "FAIL",
              criterion, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!passed) ++g_failures;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.5g", v);
  return buf;
}

// 1. Homogeneous Poisson, rho = 100, t = 1, full mark sets: the raw estimate
//    with the true intensity injected averages to pi r^2 under all three
//    edge corrections.
void criterion_poisson_oracle() {
  const double rho = 100;
  const std::vector<double> r_grid = {0.05, 0.10};
  const int reps = 500;
  auto grid = uniform_grid(0, 1, 0.5);
  IntensityModel m = IntensityModel::constant(kUnit, rho);

  std::vector<Pattern> patterns;
  patterns.reserve(reps);
  for (int rep = 0; rep < reps; ++rep)
    patterns.push_back(simulate_pattern(GroundModel::poisson(rho),
                                        MarkModel::brownian(0), kUnit, grid,
                                        substream(11, rep)()));

  bool all_ok = true;
  std::ostringstream detail;
  for (EdgeCorrection corr :
       {EdgeCorrection::MinusSampling, EdgeCorrection::Translational,
        EdgeCorrection::Isotropic}) {
    std::vector<double> mean(r_grid.size(), 0.0);
    for (const Pattern& p : patterns) {
      if (p.size() == 0) continue;
      KQuery q = KQuery::make(2);
      q.r_grid = r_grid;
      q.correction = corr;
      q.norm = Normalization::Raw;
      KEstimate est = estimate_k(p, q, m, 0);
      for (std::size_t k = 0; k < r_grid.size(); ++k)
        mean[k] += est.value[k] / reps;
    }
    for (std::size_t k = 0; k < r_grid.size(); ++k) {
      double expect = std::numbers::pi * r_grid[k] * r_grid[k];
      double rel = std::abs(mean[k] - expect) / expect;
      all_ok = all_ok && rel < 0.05;
      detail << correction_name(corr) << "@r=" << r_grid[k] << " rel "
             << fmt(rel) << "; ";
    }
  }
  report(1, "poisson ground K oracle, three corrections", all_ok,
         detail.str());
}

// 2. Edge-correction integral identity (analytic): translational and
//    minus-sampling weights integrate to 1 over the window.
void criterion_integral_identity() {
  std::mt19937_64 rng = substream(13, 0);
  std::uniform_real_distribution<double> u(-0.24, 0.24);
  double worst = 0;
  for (int n = 2; n <= 3; ++n) {
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<Vec2> disp(n - 1);
      std::vector<oracles::Pt> back;
      for (Vec2& d : disp) {
        d = {u(rng), u(rng)};
        back.push_back({-d.x, -d.y});
      }
      // translational: region |∩(W-u_i) ∩ W| times the constant weight
      double region = oracles::shifted_rect_intersection(0, 1, 0, 1, back);
      double w = 1.0 / shifted_intersection_volume(kUnit, disp);
      worst = std::max(worst, std::abs(region * w - 1.0));

      // minus sampling with balls C_i = ball(|u_i|)
      std::vector<StructElem> elems;
      for (const Vec2& d : disp) elems.push_back(StructElem::ball(norm(d)));
      auto we = eroded_intersection(kUnit, elems);
      if (!we) continue;
      std::vector<oracles::Pt> poly = oracles::rect_poly(
          we->bbox_min().x, we->bbox_max().x, we->bbox_min().y,
          we->bbox_max().y);
      for (const Vec2& d : disp) {
        poly = oracles::clip(poly, -1, 0, -(0 - d.x));
        poly = oracles::clip(poly, 1, 0, 1 - d.x);
        poly = oracles::clip(poly, 0, -1, -(0 - d.y));
        poly = oracles::clip(poly, 0, 1, 1 - d.y);
      }
      double integral = oracles::polygon_area(poly) / we->area();
      worst = std::max(worst, std::abs(integral - 1.0));
    }
  }
  report(2, "edge weight integral identity", worst < 1e-6,
         "max |integral - 1| = " + fmt(worst));
}

// 3. Independent marking: the ground-normalised variogram-weighted estimate
//    is flat in r for iid marks on a Poisson ground.
void criterion_independent_marking() {
  const int reps = 200;
  const std::vector<double> r_grid = {0.25, 0.30, 0.35, 0.40, 0.45};
  auto grid = uniform_grid(0, 1, 0.05);
  std::vector<double> mean(r_grid.size(), 0.0);
  std::vector<long> used(r_grid.size(), 0);
  for (int rep = 0; rep < reps; ++rep) {
    Pattern p = simulate_pattern(GroundModel::poisson(150),
                                 MarkModel::brownian(2.0, 1.0), kUnit, grid,
                                 substream(17, rep)());
    if (p.size() < 10) continue;
    IntensityModel m = IntensityModel::homogeneous(p);
    KQuery q = KQuery::make(2);
    q.r_grid = r_grid;
    q.test_fn = TestFunction::parse("vario");
    q.correction = EdgeCorrection::Translational;
    q.norm = Normalization::GroundNormalized;
    KEstimate est = estimate_k(p, q, m, 0);
    for (std::size_t k = 0; k < r_grid.size(); ++k)
      if (est.available[k]) {
        mean[k] += est.value[k];
        used[k] += 1;
      }
  }
  double avg = 0;
  for (std::size_t k = 0; k < r_grid.size(); ++k) {
    mean[k] /= used[k];
    avg += mean[k] / r_grid.size();
  }
  double sd = 0;
  for (double v : mean) sd += (v - avg) * (v - avg) / (mean.size() - 1);
  sd = std::sqrt(sd);
  double rel_sd = std::abs(avg) > 0 ? sd / std::abs(avg) : 1e9;
  report(3, "independent-marking constancy across r", rel_sd < 0.10,
         "level " + fmt(avg) + ", rel SD " + fmt(rel_sd));
}

// 4. Envelope level: under the random-labelling null the data statistic
//    escapes the 39-replicate pointwise band about 5% of the time.
void criterion_envelope_level() {
  const int trials = 300, s = 39;
  const double r = 0.15;
  auto grid = uniform_grid(0, 1, 0.1);
  int escapes = 0;
  KQuery q = KQuery::make(2);
  q.r_grid = {r};
  q.test_fn = TestFunction::parse("vario");
  q.correction = EdgeCorrection::Translational;
  q.norm = Normalization::Hamilton;
  for (int t = 0; t < trials; ++t) {
    // data generated under the null: locations independent of the marks
    Pattern p = simulate_pattern(GroundModel::binomial(40),
                                 MarkModel::brownian(1.0, 0.0), kUnit, grid,
                                 substream(19, t)());
    NullModel nm = NullModel::parse("relabel", s, substream(23, t)());
    EnvelopeResult env =
        envelope(p, q, "homog", nm, EnvelopeTransform::Identity, 0);
    if (!env.available[0]) continue;
    if (env.stat[0] < env.lo[0] || env.stat[0] > env.hi[0]) ++escapes;
  }
  double freq = static_cast<double>(escapes) / trials;
  report(4, "pointwise envelope level 2/40", std::abs(freq - 0.05) <= 0.03,
         "escape frequency " + fmt(freq));
}

// 5. Growth-interaction curves with no interaction and no noise follow the
//    logistic closed form on the whole support.
void criterion_growth_logistic() {
  GrowthInteractionParams gi;
  gi.lambda = 0.8;
  gi.carrying = 12.0;
  gi.c = 0.0;
  gi.sigma_int = 0.3;
  gi.mu = 0.05;
  gi.dt = 1e-3;
  auto grid = uniform_grid(0, 25, 0.5);
  std::vector<Vec2> pts = {{0.2, 0.2}, {0.5, 0.8}, {0.9, 0.4}};
  auto res = growth_interaction(pts, {}, gi, *grid, 20260810);
  const double f0 = 0.01 * gi.carrying;
  double worst = 0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < grid->size(); ++j) {
      double t = (*grid)[j];
      if (t < res.birth[i] || t >= res.death[i]) continue;
      double expect =
          gi.carrying / (1.0 + (gi.carrying / f0 - 1.0) *
                                   std::exp(-gi.lambda * (t - res.birth[i])));
      worst = std::max(worst,
                       std::abs(res.curves[i][j] - expect) / expect);
    }
  report(5, "growth-interaction logistic closed form", worst < 1e-4,
         "max rel err " + fmt(worst));
}

// 6. Discretised variogram test function on 20 samples over [1998, 2017]
//    reproduces the hand Riemann value exactly.
void criterion_variogram_discretization() {
  std::vector<double> years(20);
  for (int j = 0; j < 20; ++j) years[j] = 1998 + j;
  auto grid = make_grid(std::move(years));
  auto constant = [&](double v) {
    return make_curve(grid, std::vector<double>(20, v));
  };
  Curve mean = constant(3.0);
  Curve f1 = constant(4.0);  // f - mean = 1 everywhere
  Curve f2 = constant(5.5);  // f - mean = 2.5
  TestFunction tv = TestFunction::variogram(mean);
  MarkRef equal_pair[2] = {{nullptr, &f1}, {nullptr, &f1}};
  MarkRef mixed_pair[2] = {{nullptr, &f1}, {nullptr, &f2}};
  // (b - a)/20 = 0.95; sums of 20 ones and 20 times 2.5
  double v1 = eval(tv, equal_pair);
  double v2 = eval(tv, mixed_pair);
  bool ok = v1 == 0.95 * 20.0 && v2 == 0.95 * 20.0 * 2.5;
  report(6, "variogram discretization factor (b-a)/20", ok,
         fmt(v1) + " and " + fmt(v2) + " vs 19 and 47.5");
}

// 7. LISA local K curves on the 3x3 unit grid.
void criterion_lisa() {
  std::vector<Vec2> pts;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      pts.push_back({static_cast<double>(i), static_cast<double>(j)});
  auto curves = lisa_marks(pts, {1.2, 1.5});
  bool ok = curves[4][0] == 4.0 && curves[4][1] == 8.0;
  report(7, "LISA counts at the grid center", ok,
         "h=1.2: " + fmt(curves[4][0]) + ", h=1.5: " + fmt(curves[4][1]));
}

// 8. Shape suite: monotone in r on random patterns, monotone in the mark
//    sets, restrict composition, and bit-identical reruns per seed.
void criterion_shape_suite() {
  std::mt19937_64 rng = substream(29, 0);
  auto grid = uniform_grid(0, 1, 0.25);
  bool ok = true;
  std::ostringstream why;

  std::vector<double> r_grid;
  for (int k = 1; k <= 10; ++k) r_grid.push_back(0.05 * k);
  for (int trial = 0; trial < 100 && ok; ++trial) {
    Pattern p = simulate_pattern(GroundModel::binomial(20 + trial % 30),
                                 MarkModel::brownian(1.0), kUnit, grid,
                                 rng());
    IntensityModel m = IntensityModel::homogeneous(p);
    KQuery q = KQuery::make(2);
    q.r_grid = r_grid;
    q.correction = EdgeCorrection::Translational;
    q.norm = Normalization::Raw;
    KEstimate est = estimate_k(p, q, m, 0);
    for (std::size_t k = 1; k < r_grid.size() && ok; ++k)
      if (est.value[k] < est.value[k - 1] - 1e-12) {
        ok = false;
        why << "not monotone at trial " << trial;
      }
  }

  if (ok) {
    // mark-set monotonicity on sup thresholds
    Pattern p = simulate_pattern(GroundModel::binomial(40),
                                 MarkModel::brownian(1.0, 1.0), kUnit, grid,
                                 rng());
    IntensityModel m = IntensityModel::homogeneous(p);
    KQuery narrow = KQuery::make(2);
    narrow.r_grid = r_grid;
    narrow.norm = Normalization::Raw;
    narrow.neighbor_sets[0] = MarkSet::sup_threshold(1.5, true);
    KQuery wide = narrow;
    wide.neighbor_sets[0] = MarkSet::sup_threshold(0.5, true);
    KEstimate en = estimate_k(p, narrow, m, 0);
    KEstimate ew = estimate_k(p, wide, m, 0);
    for (std::size_t k = 0; k < r_grid.size() && ok; ++k)
      if (ew.value[k] < en.value[k]) {
        ok = false;
        why << "mark-set monotonicity violated";
      }

    // restrict composition identity
    MarkSet a = MarkSet::sup_threshold(1.0, true);
    Pattern r1 = restrict(restrict(p, a), a);
    Pattern r2 = restrict(p, a);
    if (r1.size() != r2.size()) {
      ok = false;
      why << "restrict composition broke";
    }

    // seed determinism, including the envelope layer
    KQuery q = KQuery::make(2);
    q.r_grid = {0.1, 0.3};
    q.test_fn = TestFunction::parse("vario");
    NullModel nm = NullModel::parse("relabel", 9, 123);
    EnvelopeResult e1 =
        envelope(p, q, "homog", nm, EnvelopeTransform::CubeRoot, 1);
    EnvelopeResult e2 =
        envelope(p, q, "homog", nm, EnvelopeTransform::CubeRoot, 2);
    for (std::size_t k = 0; k < e1.r.size(); ++k)
      if (e1.stat[k] != e2.stat[k] || e1.lo[k] != e2.lo[k] ||
          e1.hi[k] != e2.hi[k]) {
        ok = false;
        why << "seeded envelope not bit-identical";
      }
  }
  report(8, "monotonicity, composition and determinism suite", ok,
         ok ? "all shape properties hold" : why.str());
}

// 9. End-to-end pipeline on the bundled dataset through the CLI: estimate
//    plus both null-model envelopes with the cube-root transform, emitting
//    CSV + SVG + provenance.
void criterion_pipeline() {
  const char* cli = std::getenv("FMPP_CLI");
  const char* data = std::getenv("FMPP_DATA");
  if (!cli || !data) {
    report(9, "end-to-end pipeline", false,
           "FMPP_CLI / FMPP_DATA not set in the environment");
    return;
  }
  namespace fs = std::filesystem;
  fs::path out = fs::temp_directory_path() / "fmpp_acceptance_run";
  fs::create_directories(out);
  std::string points = std::string(data) + "/demo47_points.csv";
  std::string curves = std::string(data) + "/demo47_curves.csv";
  std::string ratio = std::string(data) + "/demo47_ratio_curves.csv";
  std::string window = "rect(0,800,0,640)";

  auto run = [&](const std::string& cmd) {
    std::string full = std::string(cli) + " " + cmd + " >/dev/null 2>&1";
    return std::system(full.c_str());
  };
  auto t0 = std::chrono::steady_clock::now();

  std::string common = " --points " + points + " --curves " + curves +
                       " --window '" + window +
                       "' --r 10:200:10 --test-fn vario --correction iso"
                       " --intensity homog --norm hamilton";
  int rc1 = run("estimate" + common + " --out-csv " +
                (out / "k.csv").string() + " --out-svg " +
                (out / "k.svg").string() + " --out-json " +
                (out / "k.json").string());
  int rc2 = run("envelope" + common + " --null poisson --nsim 39 --seed 7" +
                " --transform cbrt --out-csv " + (out / "envp.csv").string() +
                " --out-svg " + (out / "envp.svg").string() +
                " --out-json " + (out / "envp.json").string());
  int rc3 = run("envelope" + common + " --null relabel --nsim 39 --seed 8" +
                " --transform cbrt --out-csv " + (out / "envr.csv").string() +
                " --out-svg " + (out / "envr.svg").string() +
                " --out-json " + (out / "envr.json").string());
  // the ratio curves drive a second estimate, as in the two-panel analysis
  int rc4 = run("estimate --points " + points + " --curves " + ratio +
                " --window '" + window +
                "' --r 10:200:10 --test-fn vario --correction iso" +
                " --intensity homog --norm hamilton --out-csv " +
                (out / "k_ratio.csv").string());
  double secs = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - t0)
                    .count();

  bool ok = rc1 == 0 && rc2 == 0 && rc3 == 0 && rc4 == 0 && secs < 60;
  std::ostringstream why;
  why << "exit codes " << rc1 << "/" << rc2 << "/" << rc3 << "/" << rc4
      << ", " << fmt(secs) << " s";

  auto count_rows = [&](const fs::path& f) {
    std::ifstream in(f);
    std::string line;
    long rows = -1;  // header
    while (std::getline(in, line))
      if (!line.empty()) ++rows;
    return rows;
  };
  if (ok) {
    ok = count_rows(out / "k.csv") == 20 &&
         count_rows(out / "envp.csv") == 20 &&
         count_rows(out / "envr.csv") == 20;
    if (!ok) why << "; wrong row counts";
  }
  if (ok) {
    std::ifstream svg(out / "envp.svg");
    std::string head;
    std::getline(svg, head);
    ok = head.rfind("<?xml", 0) == 0;
    if (!ok) why << "; bad svg";
  }
  if (ok) {
    for (const char* name : {"k.json", "envp.json", "envr.json"}) {
      std::ifstream jf(out / name);
      nlohmann::json j = nlohmann::json::parse(jf, nullptr, false);
      bool good = !j.is_discarded() &&
                  j.value("schema", "") == "fmpp-provenance/1" &&
                  j.contains("options") && j["options"].contains("seed");
      if (!good) {
        ok = false;
        why << "; provenance schema failed for " << name;
        break;
      }
    }
  }
  report(9, "end-to-end pipeline on the bundled dataset", ok, why.str());
}

}  // namespace

int main(int argc, char** argv) {
  int only = argc > 1 ? std::atoi(argv[1]) : 0;
  auto want = [&](int k) { return only == 0 || only == k; };
  if (want(1)) criterion_poisson_oracle();
  if (want(2)) criterion_integral_identity();
  if (want(3)) criterion_independent_marking();
  if (want(4)) criterion_envelope_level();
  if (want(5)) criterion_growth_logistic();
  if (want(6)) criterion_variogram_discretization();
  if (want(7)) criterion_lisa();
  if (want(8)) criterion_shape_suite();
  if (want(9)) criterion_pipeline();
  return g_failures == 0 ? 0 : 1;
}

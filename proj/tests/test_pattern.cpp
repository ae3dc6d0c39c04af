#include "doctest.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>

#include "csvio.hpp"
#include "pattern.hpp"

using namespace fmpp;

namespace {

const Window kUnit = Window::rect(0, 1, 0, 1);

std::string write_tmp(const std::string& name, const std::string& content) {
  std::string path =
      (std::filesystem::temp_directory_path() / name).string();
  std::ofstream out(path);
  out << content;
  return path;
}

Pattern tiny_pattern() {
  auto grid = make_grid({0, 1, 2});
  std::vector<FmPoint> pts(3);
  pts[0] = {"a", {0.1, 0.1}, {}, make_curve(grid, {1, 3, 1})};
  pts[1] = {"b", {0.5, 0.5}, {}, make_curve(grid, {0, 0, 0})};
  pts[2] = {"c", {0.9, 0.2}, {}, make_curve(grid, {2, 2, 2})};
  pts[0].aux.label = 1;
  pts[1].aux.label = 2;
  pts[2].aux.label = 1;
  pts[2].aux.scalar = 4.0;
  return Pattern(kUnit, std::move(pts), grid);
}

Pattern random_pattern(std::mt19937_64& rng, int n) {
  auto grid = make_grid({0, 0.5, 1, 1.5});
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> g(0.0, 2.0);
  std::uniform_int_distribution<int> lab(1, 3);
  std::vector<FmPoint> pts(n);
  for (int i = 0; i < n; ++i) {
    pts[i].id = "p" + std::to_string(100 + i);
    pts[i].loc = {u(rng), u(rng)};
    pts[i].aux.label = lab(rng);
    pts[i].aux.scalar = g(rng);
    pts[i].curve = make_curve(grid, {g(rng), g(rng), g(rng), g(rng)});
  }
  return Pattern(kUnit, std::move(pts), grid);
}

}  // namespace

TEST_CASE("load a well formed pattern") {
  std::string pts = write_tmp("fmpp_pts.csv",
                              "id,x,y\n"
                              "# a comment line\n"
                              "p1,0.1,0.2\n"
                              "p2,0.5,0.5\n"
                              "p3,0.9,0.8\n");
  std::string cvs = write_tmp("fmpp_cvs.csv",
                              "id,t,value\n"
                              "p1,0,1.0\np1,1,2.0\np1,2,3.0\n"
                              "p3,2,0.5\np3,0,0.5\np3,1,0.5\n"
                              "p2,0,0\np2,1,0\np2,2,0\n");
  Pattern p = load_pattern(pts, cvs, kUnit);
  CHECK(p.size() == 3);
  CHECK(p.grid()->size() == 3);
  // rows arrive unsorted per id; the grid is shared
  CHECK(p.points()[0].id == "p1");
  CHECK(p.points()[2].curve.values == std::vector<double>{0.5, 0.5, 0.5});
}

TEST_CASE("ingestion errors") {
  std::string pts = write_tmp("fmpp_p_err.csv",
                              "id,x,y\np1,0.1,0.2\np7,0.5,0.5\n");
  std::string cvs = write_tmp("fmpp_c_err.csv",
                              "id,t,value\np1,0,1\np1,1,2\n");
  SUBCASE("missing curve") {
    try {
      load_pattern(pts, cvs, kUnit);
      FAIL("expected missing-curve");
    } catch (const Error& e) {
      CHECK(e.code() == FMPP_ERR_MISSING_CURVE);
    }
  }
  SUBCASE("grid mismatch") {
    std::string bad = write_tmp("fmpp_c_grid.csv",
                                "id,t,value\np1,0,1\np1,1,2\np7,0,1\np7,2,2\n");
    try {
      load_pattern(pts, bad, kUnit);
      FAIL("expected grid-mismatch");
    } catch (const Error& e) {
      CHECK(e.code() == FMPP_ERR_GRID_MISMATCH);
    }
  }
  SUBCASE("coincident points") {
    std::string co = write_tmp("fmpp_p_co.csv",
                               "id,x,y\np1,0.5,0.5\np2,0.5,0.5\n");
    std::string cv = write_tmp("fmpp_c_co.csv",
                               "id,t,value\np1,0,1\np1,1,2\np2,0,1\np2,1,2\n");
    try {
      load_pattern(co, cv, kUnit);
      FAIL("expected coincident-points");
    } catch (const Error& e) {
      CHECK(e.code() == FMPP_ERR_COINCIDENT_POINTS);
    }
  }
  SUBCASE("duplicate id") {
    std::string dup = write_tmp("fmpp_p_dup.csv",
                                "id,x,y\np1,0.1,0.2\np1,0.3,0.4\n");
    try {
      load_pattern(dup, cvs, kUnit);
      FAIL("expected duplicate-id");
    } catch (const Error& e) {
      CHECK(e.code() == FMPP_ERR_DUPLICATE_ID);
    }
  }
  SUBCASE("point outside window") {
    std::string outp = write_tmp("fmpp_p_out.csv",
                                 "id,x,y\np1,1.5,0.2\n");
    std::string cv1 = write_tmp("fmpp_c_out.csv",
                                "id,t,value\np1,0,1\np1,1,2\n");
    try {
      load_pattern(outp, cv1, kUnit);
      FAIL("expected point-outside-window");
    } catch (const Error& e) {
      CHECK(e.code() == FMPP_ERR_POINT_OUTSIDE_WINDOW);
    }
  }
}

TEST_CASE("save then load round trips") {
  Pattern p = tiny_pattern();
  std::string pp =
      (std::filesystem::temp_directory_path() / "fmpp_rt_p.csv").string();
  std::string cp =
      (std::filesystem::temp_directory_path() / "fmpp_rt_c.csv").string();
  save_pattern(p, pp, cp);
  Pattern q = load_pattern(pp, cp, kUnit);
  REQUIRE(q.size() == p.size());
  CHECK(*q.grid() == *p.grid());
  for (std::size_t i = 0; i < p.size(); ++i) {
    CHECK(q.points()[i].id == p.points()[i].id);
    CHECK(q.points()[i].loc.x == p.points()[i].loc.x);
    CHECK(q.points()[i].loc.y == p.points()[i].loc.y);
    CHECK(q.points()[i].aux.label == p.points()[i].aux.label);
    CHECK(q.points()[i].aux.scalar == p.points()[i].aux.scalar);
    CHECK(q.points()[i].curve.values == p.points()[i].curve.values);
  }
}

TEST_CASE("mark_in") {
  Pattern p = tiny_pattern();
  const FmPoint& a = p.points()[0];  // curve (1,3,1), label 1
  const FmPoint& b = p.points()[1];  // curve (0,0,0), label 2

  CHECK(mark_in(MarkSet::sup_threshold(2, true), a));
  CHECK(!mark_in(MarkSet::sup_threshold(2, true), b));
  CHECK(!mark_in(MarkSet::label_in({1}), b));
  CHECK(mark_in(MarkSet::all(), a));
  CHECK(mark_in(MarkSet::all(), b));

  MarkSet combo = MarkSet::parse("label-in:1&sup-above:2");
  CHECK(mark_in(combo, a));
  CHECK(!mark_in(combo, p.points()[2]));  // label 1 but sup = 2, not > 2

  MarkSet sc = MarkSet::parse("scalar-in:3,5");
  CHECK(mark_in(sc, p.points()[2]));
  CHECK(!mark_in(sc, a));  // no scalar present

  // integral of curve c over [0,2]: (2/3)*(2+2+2) = 4
  CHECK(mark_in(MarkSet::integral_threshold(3.9, true), p.points()[2]));
  CHECK(mark_in(MarkSet::integral_threshold(4.0, false), p.points()[2]));
}

TEST_CASE("restrict") {
  Pattern p = tiny_pattern();
  CHECK(restrict(p, MarkSet::all()).size() == p.size());
  CHECK(restrict(p, MarkSet::label_in({})).size() == 0);
  Pattern lab1 = restrict(p, MarkSet::label_in({1}));
  CHECK(lab1.size() == 2);
  CHECK(lab1.grid() == p.grid());

  // splitting by a sup threshold partitions the pattern
  auto hi = restrict(p, MarkSet::sup_threshold(1.5, true));
  auto lo = restrict(p, MarkSet::sup_threshold(1.5, false));
  CHECK(hi.size() + lo.size() == p.size());
}

TEST_CASE("restrict composition equals conjunction") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 30; ++trial) {
    Pattern p = random_pattern(rng, 40);
    MarkSet a = MarkSet::label_in({1, 2});
    MarkSet b = MarkSet::sup_threshold(1.0, trial % 2 == 0);
    MarkSet both = a;
    both.fun = b.fun;
    both.threshold = b.threshold;
    both.above = b.above;
    Pattern lhs = restrict(restrict(p, a), b);
    Pattern rhs = restrict(p, both);
    REQUIRE(lhs.size() == rhs.size());
    for (std::size_t i = 0; i < lhs.size(); ++i)
      CHECK(lhs.points()[i].id == rhs.points()[i].id);
    // and restricting twice by the same set is idempotent
    Pattern again = restrict(lhs, b);
    CHECK(again.size() == lhs.size());
  }
}

TEST_CASE("mark_in is independent of pattern order") {
  std::mt19937_64 rng(9);
  Pattern p = random_pattern(rng, 25);
  MarkSet ms = MarkSet::parse("label-in:1,3&int-above:0");
  std::vector<FmPoint> pts = p.points();
  std::shuffle(pts.begin(), pts.end(), rng);
  Pattern q(p.window(), pts, p.grid());
  std::map<std::string, bool> expect;
  for (const FmPoint& pt : p.points()) expect[pt.id] = mark_in(ms, pt);
  for (const FmPoint& pt : q.points()) CHECK(mark_in(ms, pt) == expect[pt.id]);
}

TEST_CASE("pairwise distances") {
  auto grid = make_grid({0, 1});
  SUBCASE("3-4-5 triangle") {
    std::vector<FmPoint> pts(2);
    Window w = Window::rect(-1, 5, -1, 5);
    pts[0] = {"a", {0, 0}, {}, make_curve(grid, {0, 0})};
    pts[1] = {"b", {3, 4}, {}, make_curve(grid, {0, 0})};
    Pattern p(w, std::move(pts), grid);
    const DistanceTable& dt = p.distances();
    CHECK(dt.d(0, 1) == doctest::Approx(5.0));
    CHECK(dt.d(1, 0) == doctest::Approx(5.0));
    CHECK(dt.v(0, 1).x == doctest::Approx(3.0));
    CHECK(dt.v(1, 0).y == doctest::Approx(-4.0));
  }
  SUBCASE("single point has an empty table") {
    std::vector<FmPoint> pts(1);
    pts[0] = {"a", {0.5, 0.5}, {}, make_curve(grid, {0, 0})};
    Pattern p(kUnit, std::move(pts), grid);
    CHECK(p.distances().n == 1);
    CHECK(p.distances().d(0, 0) == 0.0);
  }
  SUBCASE("collinear unit spacing") {
    std::vector<FmPoint> pts(3);
    Window w = Window::rect(-1, 3, -1, 1);
    pts[0] = {"a", {0, 0}, {}, make_curve(grid, {0, 0})};
    pts[1] = {"b", {1, 0}, {}, make_curve(grid, {0, 0})};
    pts[2] = {"c", {2, 0}, {}, make_curve(grid, {0, 0})};
    Pattern p(w, std::move(pts), grid);
    const DistanceTable& dt = p.distances();
    CHECK(dt.d(0, 1) == doctest::Approx(1.0));
    CHECK(dt.d(1, 2) == doctest::Approx(1.0));
    CHECK(dt.d(0, 2) == doctest::Approx(2.0));
  }
}

TEST_CASE("bundled dataset splits by a sup threshold") {
  Window w = Window::rect(0, 800, 0, 640);
  Pattern p = load_pattern(std::string(FMPP_DATA_DIR) + "/demo47_points.csv",
                           std::string(FMPP_DATA_DIR) + "/demo47_curves.csv",
                           w);
  REQUIRE(p.size() == 47);
  // threshold chosen by direct scan: median-ish sup over the 47 curves
  std::vector<double> sups;
  for (const FmPoint& pt : p.points()) sups.push_back(pt.curve.sup_abs());
  std::sort(sups.begin(), sups.end());
  double c = 0.5 * (sups[22] + sups[23]);
  Pattern hi = restrict(p, MarkSet::sup_threshold(c, true));
  Pattern lo = restrict(p, MarkSet::sup_threshold(c, false));
  CHECK(hi.size() + lo.size() == 47);
  CHECK(hi.size() > 0);
  CHECK(lo.size() > 0);
  long direct = 0;
  for (const FmPoint& pt : p.points())
    if (pt.curve.sup_abs() > c) ++direct;
  CHECK(hi.size() == static_cast<std::size_t>(direct));
}

TEST_CASE("mean curve") {
  auto grid = make_grid({0, 1});
  std::vector<FmPoint> pts(2);
  pts[0] = {"a", {0.2, 0.2}, {}, make_curve(grid, {0, 2})};
  pts[1] = {"b", {0.8, 0.8}, {}, make_curve(grid, {2, 0})};
  Pattern p(kUnit, std::move(pts), grid);
  Curve m = empirical_mean_curve(p);
  CHECK(m.values == std::vector<double>{1, 1});

  Pattern single(kUnit, {p.points()[0]}, grid);
  CHECK(empirical_mean_curve(single).values == std::vector<double>{0, 2});

  Pattern empty(kUnit, {}, grid);
  CHECK_THROWS_AS(empirical_mean_curve(empty), Error);
}

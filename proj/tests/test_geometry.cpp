#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "geometry.hpp"
#include "oracles.hpp"

using namespace fmpp;

namespace {
const Window kUnit = Window::rect(0, 1, 0, 1);
}

TEST_CASE("window areas") {
  CHECK(kUnit.area() == doctest::Approx(1.0));
  CHECK(Window::rect(0, 2, 0, 3).area() == doctest::Approx(6.0));
  Window tri = Window::polygon({{0, 0}, {1, 0}, {0, 1}});
  CHECK(tri.area() == doctest::Approx(0.5));
}

TEST_CASE("window validation") {
  CHECK_THROWS_AS(Window::rect(1, 1, 0, 1), Error);
  CHECK_THROWS_AS(Window::polygon({{0, 0}, {1, 0}}), Error);
  // clockwise triangle has negative orientation
  CHECK_THROWS_AS(Window::polygon({{0, 0}, {0, 1}, {1, 0}}), Error);
}

TEST_CASE("window parse round trip") {
  Window w = Window::parse("rect(0, 2, -1, 3)");
  CHECK(w.area() == doctest::Approx(8.0));
  Window p = Window::parse("poly(0,0 1,0 0.5,1)");
  CHECK(p.area() == doctest::Approx(0.5));
  CHECK_THROWS_AS(Window::parse("circle(1)"), Error);
}

TEST_CASE("erosion of rectangles") {
  Window e = erode(kUnit, StructElem::ball(0.1));
  CHECK(e.area() == doctest::Approx(0.64));
  CHECK(e.bbox_min().x == doctest::Approx(0.1));
  CHECK_THROWS_AS(erode(kUnit, StructElem::ball(0.5)), Error);

  Window r = erode(Window::rect(0, 2, 0, 1), StructElem::box(0.25, 0.25));
  CHECK(r.bbox_min().x == doctest::Approx(0.25));
  CHECK(r.bbox_max().x == doctest::Approx(1.75));
  CHECK(r.area() == doctest::Approx(0.75));

  // ball(0) erosion is the identity
  Window id = erode(kUnit, StructElem::ball(0));
  CHECK(id.area() == doctest::Approx(1.0));
}

TEST_CASE("erosion of convex polygons by balls") {
  // right triangle with legs 3,4: inradius 1, so erosion by r=1 degenerates
  Window tri = Window::polygon({{0, 0}, {3, 0}, {0, 4}});
  CHECK(!try_erode(tri, StructElem::ball(1.0)).has_value());
  auto small = try_erode(tri, StructElem::ball(0.2));
  REQUIRE(small.has_value());
  CHECK(small->area() < tri.area());
  // every eroded vertex keeps distance >= r from all original edges
  for (const Vec2& v : small->vertices()) {
    CHECK(v.x >= 0.2 - 1e-12);
    CHECK(v.y >= 0.2 - 1e-12);
    CHECK((4 * v.x + 3 * v.y - 12) / 5 <= -0.2 + 1e-12);
  }
  // sector erosion over-approximates by its bounding ball
  CHECK_THROWS_AS(erode(tri, StructElem::box(0.1, 0.1)), Error);
}

TEST_CASE("shifted intersection volume") {
  Vec2 s1{0.3, 0};
  CHECK(shifted_intersection_volume(kUnit, {&s1, 1}) == doctest::Approx(0.7));
  Vec2 s0{0, 0};
  CHECK(shifted_intersection_volume(kUnit, {&s0, 1}) == doctest::Approx(1.0));
  std::vector<Vec2> two = {{0.2, 0}, {-0.3, 0}};
  CHECK(shifted_intersection_volume(kUnit, two) == doctest::Approx(0.5));
}

TEST_CASE("shifted intersection volume matches the clipping oracle") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Vec2> shifts;
    std::vector<oracles::Pt> oshifts;
    int k = 1 + trial % 3;
    for (int i = 0; i < k; ++i) {
      Vec2 s{u(rng), u(rng)};
      shifts.push_back(s);
      oshifts.push_back({s.x, s.y});
    }
    double got = shifted_intersection_volume(kUnit, shifts);
    double want = oracles::shifted_rect_intersection(0, 1, 0, 1, oshifts);
    CHECK(got == doctest::Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("arc fraction inside rectangles") {
  CHECK(arc_fraction_inside(kUnit, {0.5, 0.5}, 0.25) == doctest::Approx(1.0));
  // one edge cut: 1 - arccos(0.1/0.2)/pi = 2/3
  CHECK(arc_fraction_inside(kUnit, {0.5, 0.1}, 0.2) ==
        doctest::Approx(1.0 - std::acos(0.5) / std::numbers::pi));
  CHECK(arc_fraction_inside(kUnit, {0.1, 0.1}, 0.05) == doctest::Approx(1.0));
}

TEST_CASE("arc fraction matches dense sampling") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> up(0.05, 0.95);
  std::uniform_real_distribution<double> ur(0.02, 0.6);
  for (int trial = 0; trial < 25; ++trial) {
    Vec2 c{up(rng), up(rng)};
    double r = ur(rng);
    double got = arc_fraction_inside(kUnit, c, r);
    double want = oracles::arc_fraction_sampled(0, 1, 0, 1, c.x, c.y, r);
    CHECK(got == doctest::Approx(want).epsilon(2e-5));
  }
}

TEST_CASE("arc fraction on convex polygons") {
  Window hex = Window::polygon(
      {{1, 0}, {2, 0}, {3, 1}, {2, 2}, {1, 2}, {0, 1}});
  // interior circle fully inside
  CHECK(arc_fraction_inside(hex, {1.5, 1.0}, 0.3) == doctest::Approx(1.0));
  // larger circle clipped by several edges; compare against sampling
  double r = 0.9;
  long inside = 0;
  const int N = 2000003;
  for (int i = 0; i < N; ++i) {
    double th = 2 * std::numbers::pi * (i + 0.5) / N;
    Vec2 p{1.5 + r * std::cos(th), 1.0 + r * std::sin(th)};
    if (hex.contains(p)) ++inside;
  }
  CHECK(arc_fraction_inside(hex, {1.5, 1.0}, r) ==
        doctest::Approx(static_cast<double>(inside) / N).epsilon(2e-5));
}

TEST_CASE("edge weights") {
  SUBCASE("translational") {
    Vec2 x{0.2, 0.2}, x1{0.5, 0.2};
    StructElem e = StructElem::ball(0.5);
    double w = edge_weight(EdgeCorrection::Translational, kUnit, x, {&x1, 1},
                           {&e, 1});
    CHECK(w == doctest::Approx(1.0 / 0.7));
  }
  SUBCASE("isotropic inside") {
    Vec2 x{0.5, 0.5}, x1{0.5, 0.75};
    StructElem e = StructElem::ball(0.25);
    double w =
        edge_weight(EdgeCorrection::Isotropic, kUnit, x, {&x1, 1}, {&e, 1});
    CHECK(w == doctest::Approx(1.0));
  }
  SUBCASE("minus sampling") {
    Vec2 x{0.5, 0.5}, x1{0.55, 0.5};
    StructElem e = StructElem::ball(0.1);
    double w = edge_weight(EdgeCorrection::MinusSampling, kUnit, x, {&x1, 1},
                           {&e, 1});
    CHECK(w == doctest::Approx(1.0 / 0.64));
    Vec2 corner{0.05, 0.05};
    CHECK(edge_weight(EdgeCorrection::MinusSampling, kUnit, corner, {&x1, 1},
                      {&e, 1}) == doctest::Approx(0.0));
  }
  SUBCASE("none") {
    Vec2 x{0.5, 0.5}, x1{0.6, 0.5};
    StructElem e = StructElem::ball(0.2);
    CHECK(edge_weight(EdgeCorrection::None, Window::rect(0, 2, 0, 2), x,
                      {&x1, 1}, {&e, 1}) == doctest::Approx(0.25));
  }
  SUBCASE("isotropic rejects n != 2") {
    Vec2 x{0.5, 0.5};
    std::vector<Vec2> nb = {{0.6, 0.5}, {0.5, 0.6}};
    std::vector<StructElem> es = {StructElem::ball(0.2),
                                  StructElem::ball(0.2)};
    CHECK_THROWS_AS(edge_weight(EdgeCorrection::Isotropic, kUnit, x, nb, es),
                    Error);
  }
}

TEST_CASE("unbiasedness integral identity, translational and minus") {
  // integral over x in W of prod 1{u_i + x in W} * w(x, u_1+x, ...) dx,
  // evaluated analytically: the indicator region is the intersection of the
  // back-shifted windows (clipping oracle), the weight is constant in x.
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-0.25, 0.25);
  for (int n = 2; n <= 3; ++n) {
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<Vec2> disp(n - 1);
      std::vector<oracles::Pt> back;
      double rmax = 0;
      for (Vec2& d : disp) {
        d = {u(rng), u(rng)};
        back.push_back({-d.x, -d.y});
        rmax = std::max(rmax, norm(d));
      }
      // translational: w = 1/|∩(W+u_i) ∩ W| constant; region |∩(W-u_i) ∩ W|
      {
        double region =
            oracles::shifted_rect_intersection(0, 1, 0, 1, back);
        double w = 1.0 / shifted_intersection_volume(kUnit, disp);
        CHECK(region * w == doctest::Approx(1.0).epsilon(1e-6));
      }
      // minus sampling with balls C_i = ball(|u_i|) (so u_i in C_i):
      // w = 1{x in W ⊖ ball(rmax)}/|W ⊖ ball(rmax)|; the erosion lies inside
      // every back-shifted window, so the integral is exactly 1
      {
        std::vector<StructElem> elems;
        for (const Vec2& d : disp) elems.push_back(StructElem::ball(norm(d)));
        auto we = eroded_intersection(kUnit, elems);
        REQUIRE(we.has_value());
        std::vector<oracles::Pt> all = back;
        // region = |∩(W-u_i) ∩ (W ⊖ ball)| via the oracle on the eroded box
        double ex0 = we->bbox_min().x, ex1 = we->bbox_max().x;
        double ey0 = we->bbox_min().y, ey1 = we->bbox_max().y;
        std::vector<oracles::Pt> poly = oracles::rect_poly(ex0, ex1, ey0, ey1);
        for (const Vec2& d : disp) {
          poly = oracles::clip(poly, -1, 0, -(0 - d.x));
          poly = oracles::clip(poly, 1, 0, 1 - d.x);
          poly = oracles::clip(poly, 0, -1, -(0 - d.y));
          poly = oracles::clip(poly, 0, 1, 1 - d.y);
        }
        double region = oracles::polygon_area(poly);
        CHECK(region / we->area() == doctest::Approx(1.0).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("edge weight translation invariance") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.1, 0.9);
  std::uniform_real_distribution<double> shift(-3, 3);
  for (int trial = 0; trial < 30; ++trial) {
    Vec2 x{u(rng), u(rng)};
    Vec2 x1{u(rng), u(rng)};
    if (x.x == x1.x && x.y == x1.y) continue;
    Vec2 t{shift(rng), shift(rng)};
    Window wt = kUnit.translated(t);
    Vec2 xt = x + t, x1t = x1 + t;
    StructElem e = StructElem::ball(norm(x1 - x));
    for (EdgeCorrection c :
         {EdgeCorrection::MinusSampling, EdgeCorrection::Translational,
          EdgeCorrection::Isotropic, EdgeCorrection::None}) {
      if (c == EdgeCorrection::MinusSampling && norm(x1 - x) >= 0.49)
        continue;  // erosion would be empty
      double w0 = edge_weight(c, kUnit, x, {&x1, 1}, {&e, 1});
      double w1 = edge_weight(c, wt, xt, {&x1t, 1}, {&e, 1});
      CHECK(w0 == doctest::Approx(w1).epsilon(1e-12));
    }
  }
}

TEST_CASE("weights never fall below the uncorrected weight") {
  // every correction inflates relative to 1/|W|, except minus sampling
  // which is either 0 or 1/|eroded|
  std::mt19937_64 rng(71);
  Window w = Window::rect(0, 2, 0, 1.5);
  std::uniform_real_distribution<double> ux(0.05, 1.95), uy(0.05, 1.45);
  const double base = 1.0 / w.area();
  for (int trial = 0; trial < 100; ++trial) {
    Vec2 x{ux(rng), uy(rng)};
    Vec2 x1{ux(rng), uy(rng)};
    double d = norm(x1 - x);
    if (d == 0 || d >= 0.7) continue;
    StructElem e = StructElem::ball(d);
    CHECK(edge_weight(EdgeCorrection::Translational, w, x, {&x1, 1},
                      {&e, 1}) >= base - 1e-15);
    CHECK(edge_weight(EdgeCorrection::Isotropic, w, x, {&x1, 1}, {&e, 1}) >=
          1.0);
    double wm =
        edge_weight(EdgeCorrection::MinusSampling, w, x, {&x1, 1}, {&e, 1});
    auto eroded = try_erode(w, e);
    REQUIRE(eroded.has_value());
    bool zero_or_inv_area =
        wm == 0.0 || wm == doctest::Approx(1.0 / eroded->area());
    CHECK(zero_or_inv_area);
  }
}

TEST_CASE("struct elem membership") {
  StructElem sec = StructElem::sector(1.0, 0.0, std::numbers::pi / 2);
  CHECK(sec.contains({0.5, 0.5}));
  CHECK(sec.contains({-0.5, -0.5}));  // point symmetry
  CHECK(!sec.contains({0.5, -0.5}));
  CHECK(!sec.contains({2.0, 2.0}));  // outside radius
  CHECK_THROWS_AS(StructElem::sector(1, 1.0, 0.5), Error);

  StructElem bx = StructElem::box(0.5, 0.25);
  CHECK(bx.contains({0.5, 0.25}));
  CHECK(!bx.contains({0.6, 0.0}));
  CHECK(bx.bounding_radius() == doctest::Approx(std::hypot(0.5, 0.25)));
}

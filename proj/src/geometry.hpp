#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "common.hpp"

namespace fmpp {

/// Planar observation window: an axis-aligned rectangle or a strictly convex
/// polygon with counter-clockwise vertices. Always has positive area.
class Window {
 public:
  enum class Kind { Rect, Polygon };

  static Window rect(double xmin, double xmax, double ymin, double ymax);
  static Window polygon(std::vector<Vec2> vertices);
  /// "rect(xmin,xmax,ymin,ymax)" or "poly(x0,y0 x1,y1 ...)".
  static Window parse(const std::string& spec);

  Kind kind() const { return kind_; }
  double area() const;
  bool contains(Vec2 p) const;
  Vec2 bbox_min() const { return lo_; }
  Vec2 bbox_max() const { return hi_; }
  /// Rectangle side lengths; only valid for Kind::Rect.
  Vec2 sides() const { return hi_ - lo_; }
  const std::vector<Vec2>& vertices() const { return verts_; }
  Window translated(Vec2 shift) const;
  std::string to_string() const;

 private:
  Window() = default;
  Kind kind_ = Kind::Rect;
  Vec2 lo_, hi_;              // bounding box (the rectangle itself for Rect)
  std::vector<Vec2> verts_;   // ccw, Polygon only
};

/// Origin-symmetric closed test set C scaled by r: a ball, a double-cone
/// sector of a ball, or an axis-aligned box with half-widths ax*r, ay*r.
struct StructElem {
  enum class Kind { Ball, Sector, Box };
  Kind kind = Kind::Ball;
  double r = 0;             // radius / box scale
  double phi = 0, psi = 0;  // sector angles, -pi/2 <= phi < psi <= phi+pi
  double ax = 1, ay = 1;    // box aspect: half-widths ax*r, ay*r

  static StructElem ball(double r);
  static StructElem sector(double r, double phi, double psi);
  static StructElem box(double hx, double hy);  // r=1, ax=hx, ay=hy

  StructElem scaled(double radius) const;
  bool contains(Vec2 u) const;
  /// Radius of the smallest origin-centred ball containing the element.
  double bounding_radius() const;
  std::string to_string() const;
};

enum class EdgeCorrection { MinusSampling, Translational, Isotropic, None };

const char* correction_name(EdgeCorrection c);
EdgeCorrection parse_correction(const std::string& name);

double area(const Window& w);

/// Minkowski erosion W (-) C restricted to the shapes above. Sector elements
/// are over-eroded by their bounding ball, which preserves x + C subset W.
/// Polygon windows support ball erosion only. Throws `empty-erosion` when
/// the result degenerates to area 0.
Window erode(const Window& w, const StructElem& c);
/// As erode() but reports a degenerate result as nullopt.
std::optional<Window> try_erode(const Window& w, const StructElem& c);

/// |(W + s_1) ∩ ... ∩ (W + s_k) ∩ W| for a rectangle window; 0 when empty.
double shifted_intersection_volume(const Window& w, std::span<const Vec2> shifts);

/// Fraction of the circle of given radius about center lying inside w,
/// in (0, 1]. Exact union of per-edge excluded arcs for both window kinds.
double arc_fraction_inside(const Window& w, Vec2 center, double radius);

/// Edge-correction weight w(x, x_1, ..., x_{n-1}) of the chosen kind.
/// neighbors/elems have n-1 entries; Isotropic requires exactly one.
double edge_weight(EdgeCorrection kind, const Window& w, Vec2 x,
                   std::span<const Vec2> neighbors,
                   std::span<const StructElem> elems);

/// Intersection of the erosions W (-) C_i; nullopt when degenerate.
std::optional<Window> eroded_intersection(const Window& w,
                                          std::span<const StructElem> elems);

}  // namespace fmpp

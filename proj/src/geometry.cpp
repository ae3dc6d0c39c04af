#include "geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace fmpp {

namespace {

constexpr double kPi = std::numbers::pi;

double polygon_area(const std::vector<Vec2>& v) {
  double s = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2& a = v[i];
    const Vec2& b = v[(i + 1) % v.size()];
    s += cross(a, b);
  }
  return 0.5 * s;
}

void validate_convex_ccw(const std::vector<Vec2>& v) {
  if (v.size() < 3)
    raise(FMPP_ERR_INVALID_ARGUMENT, "polygon window needs >= 3 vertices");
  for (std::size_t i = 0; i < v.size(); ++i) {
    Vec2 e1 = v[(i + 1) % v.size()] - v[i];
    Vec2 e2 = v[(i + 2) % v.size()] - v[(i + 1) % v.size()];
    if (cross(e1, e2) <= 0)
      raise(FMPP_ERR_INVALID_ARGUMENT,
            "polygon window must be strictly convex with ccw vertices");
  }
  if (polygon_area(v) <= 0)
    raise(FMPP_ERR_INVALID_ARGUMENT, "polygon window must have positive area");
}

/// Clip a convex polygon against the half-plane dot(n, p) >= c.
std::vector<Vec2> clip_halfplane(const std::vector<Vec2>& poly, Vec2 n,
                                 double c) {
  std::vector<Vec2> out;
  std::size_t m = poly.size();
  for (std::size_t i = 0; i < m; ++i) {
    Vec2 a = poly[i];
    Vec2 b = poly[(i + 1) % m];
    double da = dot(n, a) - c;
    double db = dot(n, b) - c;
    if (da >= 0) out.push_back(a);
    if ((da > 0 && db < 0) || (da < 0 && db > 0)) {
      double t = da / (da - db);
      out.push_back(a + t * (b - a));
    }
  }
  return out;
}

}  // namespace

Window Window::rect(double xmin, double xmax, double ymin, double ymax) {
  if (!(xmin < xmax) || !(ymin < ymax))
    raise(FMPP_ERR_INVALID_ARGUMENT, "rectangle window needs xmin<xmax, ymin<ymax");
  Window w;
  w.kind_ = Kind::Rect;
  w.lo_ = {xmin, ymin};
  w.hi_ = {xmax, ymax};
  return w;
}

Window Window::polygon(std::vector<Vec2> vertices) {
  validate_convex_ccw(vertices);
  Window w;
  w.kind_ = Kind::Polygon;
  w.verts_ = std::move(vertices);
  w.lo_ = w.hi_ = w.verts_[0];
  for (const Vec2& p : w.verts_) {
    w.lo_.x = std::min(w.lo_.x, p.x);
    w.lo_.y = std::min(w.lo_.y, p.y);
    w.hi_.x = std::max(w.hi_.x, p.x);
    w.hi_.y = std::max(w.hi_.y, p.y);
  }
  return w;
}

Window Window::parse(const std::string& spec) {
  auto fail = [&] {
    raise(FMPP_ERR_PARSE, "bad window spec: " + spec);
  };
  std::string s = spec;
  std::erase_if(s, [](char c) { return std::isspace(static_cast<unsigned char>(c)) && c != ' '; });
  if (s.rfind("rect(", 0) == 0 && s.back() == ')') {
    std::string body = s.substr(5, s.size() - 6);
    std::replace(body.begin(), body.end(), ',', ' ');
    std::istringstream in(body);
    double a, b, c, d;
    if (!(in >> a >> b >> c >> d)) fail();
    return rect(a, b, c, d);
  }
  if (s.rfind("poly(", 0) == 0 && s.back() == ')') {
    std::string body = s.substr(5, s.size() - 6);
    // vertices separated by spaces or ';', coordinates by ','
    std::replace(body.begin(), body.end(), ';', ' ');
    std::istringstream in(body);
    std::vector<Vec2> verts;
    std::string tok;
    while (in >> tok) {
      auto comma = tok.find(',');
      if (comma == std::string::npos) fail();
      try {
        verts.push_back({std::stod(tok.substr(0, comma)),
                         std::stod(tok.substr(comma + 1))});
      } catch (const std::exception&) {
        fail();
      }
    }
    if (verts.size() < 3) fail();
    return polygon(std::move(verts));
  }
  fail();
  return rect(0, 1, 0, 1);  // unreachable
}

double Window::area() const {
  if (kind_ == Kind::Rect) return (hi_.x - lo_.x) * (hi_.y - lo_.y);
  return polygon_area(verts_);
}

bool Window::contains(Vec2 p) const {
  if (kind_ == Kind::Rect)
    return p.x >= lo_.x && p.x <= hi_.x && p.y >= lo_.y && p.y <= hi_.y;
  for (std::size_t i = 0; i < verts_.size(); ++i) {
    Vec2 a = verts_[i];
    Vec2 b = verts_[(i + 1) % verts_.size()];
    if (cross(b - a, p - a) < 0) return false;
  }
  return true;
}

Window Window::translated(Vec2 shift) const {
  Window w = *this;
  w.lo_ = w.lo_ + shift;
  w.hi_ = w.hi_ + shift;
  for (Vec2& v : w.verts_) v = v + shift;
  return w;
}

std::string Window::to_string() const {
  std::ostringstream out;
  if (kind_ == Kind::Rect) {
    out << "rect(" << lo_.x << "," << hi_.x << "," << lo_.y << "," << hi_.y
        << ")";
  } else {
    out << "poly(";
    for (std::size_t i = 0; i < verts_.size(); ++i) {
      if (i) out << ' ';
      out << verts_[i].x << ',' << verts_[i].y;
    }
    out << ")";
  }
  return out.str();
}

StructElem StructElem::ball(double r) {
  if (r < 0) raise(FMPP_ERR_INVALID_ARGUMENT, "ball radius must be >= 0");
  StructElem e;
  e.kind = Kind::Ball;
  e.r = r;
  return e;
}

StructElem StructElem::sector(double r, double phi, double psi) {
  if (r < 0) raise(FMPP_ERR_INVALID_ARGUMENT, "sector radius must be >= 0");
  if (!(phi >= -kPi / 2 && phi < psi && psi <= phi + kPi))
    raise(FMPP_ERR_INVALID_ARGUMENT,
          "sector needs -pi/2 <= phi < psi <= phi+pi");
  StructElem e;
  e.kind = Kind::Sector;
  e.r = r;
  e.phi = phi;
  e.psi = psi;
  return e;
}

StructElem StructElem::box(double hx, double hy) {
  if (hx < 0 || hy < 0)
    raise(FMPP_ERR_INVALID_ARGUMENT, "box half-widths must be >= 0");
  StructElem e;
  e.kind = Kind::Box;
  e.r = 1;
  e.ax = hx;
  e.ay = hy;
  return e;
}

StructElem StructElem::scaled(double radius) const {
  StructElem e = *this;
  e.r = radius;
  return e;
}

bool StructElem::contains(Vec2 u) const {
  switch (kind) {
    case Kind::Ball:
      return dot(u, u) <= r * r;
    case Kind::Sector: {
      if (dot(u, u) > r * r) return false;
      if (u.x == 0 && u.y == 0) return true;
      double a = std::atan2(u.y, u.x);  // (-pi, pi]
      // double cone: direction or its point reflection within [phi, psi]
      for (double cand : {a, a + kPi, a - kPi})
        if (cand >= phi && cand <= psi) return true;
      return false;
    }
    case Kind::Box:
      return std::abs(u.x) <= ax * r && std::abs(u.y) <= ay * r;
  }
  return false;
}

double StructElem::bounding_radius() const {
  switch (kind) {
    case Kind::Ball:
    case Kind::Sector:
      return r;
    case Kind::Box:
      return std::hypot(ax * r, ay * r);
  }
  return r;
}

std::string StructElem::to_string() const {
  std::ostringstream out;
  switch (kind) {
    case Kind::Ball:
      out << "ball";
      break;
    case Kind::Sector:
      out << "sector:" << phi << "," << psi;
      break;
    case Kind::Box:
      out << "box:" << ax << "," << ay;
      break;
  }
  return out.str();
}

const char* correction_name(EdgeCorrection c) {
  switch (c) {
    case EdgeCorrection::MinusSampling: return "minus";
    case EdgeCorrection::Translational: return "trans";
    case EdgeCorrection::Isotropic: return "iso";
    case EdgeCorrection::None: return "none";
  }
  return "?";
}

EdgeCorrection parse_correction(const std::string& name) {
  if (name == "minus" || name == "minus-sampling")
    return EdgeCorrection::MinusSampling;
  if (name == "trans" || name == "translational")
    return EdgeCorrection::Translational;
  if (name == "iso" || name == "isotropic") return EdgeCorrection::Isotropic;
  if (name == "none") return EdgeCorrection::None;
  raise(FMPP_ERR_PARSE, "unknown edge correction: " + name);
}

double area(const Window& w) { return w.area(); }

std::optional<Window> try_erode(const Window& w, const StructElem& c) {
  if (w.kind() == Window::Kind::Rect) {
    double ix = 0, iy = 0;  // inset per axis
    switch (c.kind) {
      case StructElem::Kind::Ball:
        ix = iy = c.r;
        break;
      case StructElem::Kind::Sector:
        // conservative: erode by the bounding ball of the sector
        ix = iy = c.r;
        break;
      case StructElem::Kind::Box:
        ix = c.ax * c.r;
        iy = c.ay * c.r;
        break;
    }
    Vec2 lo = w.bbox_min(), hi = w.bbox_max();
    if (lo.x + ix >= hi.x - ix || lo.y + iy >= hi.y - iy) return std::nullopt;
    return Window::rect(lo.x + ix, hi.x - ix, lo.y + iy, hi.y - iy);
  }
  // polygon window: ball erosion only (sector via bounding ball)
  double r;
  switch (c.kind) {
    case StructElem::Kind::Ball:
    case StructElem::Kind::Sector:
      r = c.r;
      break;
    default:
      raise(FMPP_ERR_UNSUPPORTED, "polygon windows erode by balls only");
  }
  if (r == 0) return w;
  std::vector<Vec2> poly = w.vertices();
  const auto& v = w.vertices();
  for (std::size_t i = 0; i < v.size() && !poly.empty(); ++i) {
    Vec2 e = v[(i + 1) % v.size()] - v[i];
    double len = norm(e);
    Vec2 n = {-e.y / len, e.x / len};  // inward normal (ccw polygon)
    poly = clip_halfplane(poly, n, dot(n, v[i]) + r);
  }
  if (poly.size() < 3 || polygon_area(poly) <= 0) return std::nullopt;
  return Window::polygon(std::move(poly));
}

Window erode(const Window& w, const StructElem& c) {
  auto e = try_erode(w, c);
  if (!e) raise(FMPP_ERR_EMPTY_EROSION, "erosion of window is empty");
  return *e;
}

std::optional<Window> eroded_intersection(const Window& w,
                                          std::span<const StructElem> elems) {
  if (elems.empty()) return w;
  if (w.kind() == Window::Kind::Rect) {
    // erosions of a rectangle are rectangles; intersect them
    double xmin = w.bbox_min().x, xmax = w.bbox_max().x;
    double ymin = w.bbox_min().y, ymax = w.bbox_max().y;
    for (const StructElem& c : elems) {
      auto e = try_erode(w, c);
      if (!e) return std::nullopt;
      xmin = std::max(xmin, e->bbox_min().x);
      xmax = std::min(xmax, e->bbox_max().x);
      ymin = std::max(ymin, e->bbox_min().y);
      ymax = std::min(ymax, e->bbox_max().y);
    }
    if (xmin >= xmax || ymin >= ymax) return std::nullopt;
    return Window::rect(xmin, xmax, ymin, ymax);
  }
  // polygon: intersection of insets equals the inset by the largest radius
  double rmax = 0;
  for (const StructElem& c : elems) rmax = std::max(rmax, c.bounding_radius());
  return try_erode(w, StructElem::ball(rmax));
}

double shifted_intersection_volume(const Window& w,
                                   std::span<const Vec2> shifts) {
  if (w.kind() != Window::Kind::Rect)
    raise(FMPP_ERR_UNSUPPORTED,
          "shifted_intersection_volume needs a rectangle window");
  // Per axis the intersection of shifted intervals [0,L]+s is
  // [max s_i^+, L + min s_i^-]; width L - (max positive + max negative part).
  double pos_x = 0, neg_x = 0, pos_y = 0, neg_y = 0;
  for (const Vec2& s : shifts) {
    pos_x = std::max(pos_x, s.x);
    neg_x = std::max(neg_x, -s.x);
    pos_y = std::max(pos_y, s.y);
    neg_y = std::max(neg_y, -s.y);
  }
  Vec2 L = w.sides();
  double wx = std::max(0.0, L.x - (pos_x + neg_x));
  double wy = std::max(0.0, L.y - (pos_y + neg_y));
  return wx * wy;
}

double arc_fraction_inside(const Window& w, Vec2 center, double radius) {
  if (!(radius > 0))
    raise(FMPP_ERR_INVALID_ARGUMENT, "arc_fraction_inside needs radius > 0");
  if (!w.contains(center))
    raise(FMPP_ERR_INVALID_ARGUMENT, "circle center must lie in the window");

  // Outside set of angles = union over window edges of one arc interval per
  // edge: the circle point is beyond edge e iff cos(theta - theta_e) < -d_e/r
  // where d_e >= 0 is the distance from the center to the edge line and
  // theta_e the outward normal direction. Interval half-width acos(d_e/r).
  struct Edge {
    Vec2 n;     // outward unit normal
    double d;   // distance from center to edge line
  };
  std::vector<Edge> edges;
  if (w.kind() == Window::Kind::Rect) {
    Vec2 lo = w.bbox_min(), hi = w.bbox_max();
    edges.push_back({{-1, 0}, center.x - lo.x});
    edges.push_back({{1, 0}, hi.x - center.x});
    edges.push_back({{0, -1}, center.y - lo.y});
    edges.push_back({{0, 1}, hi.y - center.y});
  } else {
    const auto& v = w.vertices();
    for (std::size_t i = 0; i < v.size(); ++i) {
      Vec2 e = v[(i + 1) % v.size()] - v[i];
      double len = norm(e);
      Vec2 n = {e.y / len, -e.x / len};  // outward for ccw
      edges.push_back({n, dot(n, v[i] - center)});
    }
  }

  std::vector<std::pair<double, double>> intervals;
  for (const Edge& e : edges) {
    if (e.d >= radius) continue;
    double half = std::acos(std::clamp(e.d / radius, -1.0, 1.0));
    double c = std::atan2(e.n.y, e.n.x);
    intervals.emplace_back(c - half, c + half);
  }
  if (intervals.empty()) return 1.0;

  // Merge on the circle: normalize starts into [0, 2pi), split wrap-around.
  std::vector<std::pair<double, double>> segs;
  for (auto [a, b] : intervals) {
    double start = std::fmod(a, 2 * kPi);
    if (start < 0) start += 2 * kPi;
    double end = start + (b - a);
    if (end <= 2 * kPi) {
      segs.emplace_back(start, end);
    } else {
      segs.emplace_back(start, 2 * kPi);
      segs.emplace_back(0, end - 2 * kPi);
    }
  }
  std::sort(segs.begin(), segs.end());
  double outside = 0, cur_lo = segs[0].first, cur_hi = segs[0].second;
  for (std::size_t i = 1; i < segs.size(); ++i) {
    if (segs[i].first <= cur_hi) {
      cur_hi = std::max(cur_hi, segs[i].second);
    } else {
      outside += cur_hi - cur_lo;
      cur_lo = segs[i].first;
      cur_hi = segs[i].second;
    }
  }
  outside += cur_hi - cur_lo;

  double frac = 1.0 - outside / (2 * kPi);
  if (frac <= 0)
    raise(FMPP_ERR_ZERO_ARC, "no part of the circle lies inside the window");
  return std::min(frac, 1.0);
}

double edge_weight(EdgeCorrection kind, const Window& w, Vec2 x,
                   std::span<const Vec2> neighbors,
                   std::span<const StructElem> elems) {
  switch (kind) {
    case EdgeCorrection::MinusSampling: {
      auto we = eroded_intersection(w, elems);
      if (!we)
        raise(FMPP_ERR_EMPTY_EROSION,
              "minus-sampling erosion is empty at this scale");
      return we->contains(x) ? 1.0 / we->area() : 0.0;
    }
    case EdgeCorrection::Translational: {
      std::vector<Vec2> shifts;
      shifts.reserve(neighbors.size());
      for (const Vec2& xi : neighbors) shifts.push_back(xi - x);
      double v = shifted_intersection_volume(w, shifts);
      if (v <= 0)
        raise(FMPP_ERR_INVALID_ARGUMENT,
              "translational weight undefined: empty shifted intersection");
      return 1.0 / v;
    }
    case EdgeCorrection::Isotropic: {
      if (neighbors.size() != 1)
        raise(FMPP_ERR_UNSUPPORTED, "isotropic correction requires n = 2");
      double d = norm(neighbors[0] - x);
      if (d == 0) return 1.0 / w.area();
      return 1.0 / arc_fraction_inside(w, x, d);
    }
    case EdgeCorrection::None:
      return 1.0 / w.area();
  }
  raise(FMPP_ERR_INTERNAL, "unhandled edge correction");
}

}  // namespace fmpp

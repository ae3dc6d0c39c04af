#include "intensity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

namespace fmpp {

namespace {

double gauss(double u, double h) {
  static const double inv_sqrt2pi = 0.3989422804014327;
  double z = u / h;
  return inv_sqrt2pi / h * std::exp(-0.5 * z * z);
}

double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

/// Integral of the product Gaussian about c over the window.
double kernel_mass_in_window(const Window& w, Vec2 c, double hx, double hy) {
  if (w.kind() == Window::Kind::Rect) {
    Vec2 lo = w.bbox_min(), hi = w.bbox_max();
    double mx = norm_cdf((hi.x - c.x) / hx) - norm_cdf((lo.x - c.x) / hx);
    double my = norm_cdf((hi.y - c.y) / hy) - norm_cdf((lo.y - c.y) / hy);
    return mx * my;
  }
  // polygon: midpoint lattice over the bounding box
  const int res = 160;
  Vec2 lo = w.bbox_min(), hi = w.bbox_max();
  double dx = (hi.x - lo.x) / res, dy = (hi.y - lo.y) / res;
  double s = 0;
  for (int i = 0; i < res; ++i)
    for (int j = 0; j < res; ++j) {
      Vec2 u{lo.x + (i + 0.5) * dx, lo.y + (j + 0.5) * dy};
      if (w.contains(u)) s += gauss(u.x - c.x, hx) * gauss(u.y - c.y, hy);
    }
  return s * dx * dy;
}

}  // namespace

IntensityModel IntensityModel::homogeneous(const Pattern& p) {
  if (p.size() < 1)
    raise(FMPP_ERR_TOO_FEW_POINTS, "homogeneous intensity needs n >= 1");
  IntensityModel m;
  m.kind_ = Kind::Homogeneous;
  m.window_ = p.window();
  m.spec_ = "homog";
  m.rho_const_ = static_cast<double>(p.size()) / p.window().area();
  m.floor_ = 1e-12 * m.rho_const_;
  for (const FmPoint& pt : p.points())
    if (pt.aux.label) m.label_freq_[*pt.aux.label] += 1.0 / p.size();
  return m;
}

IntensityModel IntensityModel::constant(const Window& w, double rho) {
  if (!(rho > 0))
    raise(FMPP_ERR_INVALID_ARGUMENT, "constant intensity must be > 0");
  IntensityModel m;
  m.kind_ = Kind::Homogeneous;
  m.window_ = w;
  std::ostringstream os;
  os << "const:" << rho;
  m.spec_ = os.str();
  m.rho_const_ = rho;
  m.floor_ = 1e-12 * rho;
  return m;
}

IntensityModel IntensityModel::kernel(const Pattern& p, double bandwidth,
                                      bool per_label_kernels) {
  if (p.size() < 2)
    raise(FMPP_ERR_TOO_FEW_POINTS, "kernel intensity needs n >= 2");
  IntensityModel m;
  m.kind_ = Kind::Kernel;
  m.window_ = p.window();
  m.per_label_ = per_label_kernels;
  double n = static_cast<double>(p.size());

  if (bandwidth > 0) {
    m.hx_ = m.hy_ = bandwidth;
  } else {
    // Scott's rule per axis: sigma_axis * n^(-1/6)
    double mx = 0, my = 0;
    for (const FmPoint& pt : p.points()) {
      mx += pt.loc.x;
      my += pt.loc.y;
    }
    mx /= n;
    my /= n;
    double sx = 0, sy = 0;
    for (const FmPoint& pt : p.points()) {
      sx += (pt.loc.x - mx) * (pt.loc.x - mx);
      sy += (pt.loc.y - my) * (pt.loc.y - my);
    }
    sx = std::sqrt(sx / (n - 1));
    sy = std::sqrt(sy / (n - 1));
    double diam = norm(p.window().bbox_max() - p.window().bbox_min());
    double fallback = 1e-3 * diam;
    m.hx_ = std::max(sx * std::pow(n, -1.0 / 6.0), fallback);
    m.hy_ = std::max(sy * std::pow(n, -1.0 / 6.0), fallback);
  }
  {
    std::ostringstream os;
    os << "kernel:" << m.hx_;
    if (per_label_kernels) os << "+labels";
    m.spec_ = os.str();
  }

  for (const FmPoint& pt : p.points()) {
    m.center_index_[{pt.loc.x, pt.loc.y}] = m.centers_.size();
    m.centers_.push_back(pt.loc);
    m.edge_norm_.push_back(
        kernel_mass_in_window(p.window(), pt.loc, m.hx_, m.hy_));
    m.labels_.push_back(pt.aux.label ? *pt.aux.label : -1);
    if (pt.aux.label) m.label_freq_[*pt.aux.label] += 1.0 / p.size();
  }
  m.floor_ = 1e-12 * n / p.window().area();
  return m;
}

IntensityModel IntensityModel::from_grid_csv(const Pattern& p,
                                             const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(FMPP_ERR_IO, "cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("x,y,rho", 0) != 0)
    raise(FMPP_ERR_PARSE, path + ": header must be x,y,rho");
  std::set<double> xs, ys;
  std::vector<std::tuple<double, double, double>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double x, y, r;
    if (!(ls >> x >> y >> r)) raise(FMPP_ERR_PARSE, path + ": bad row " + line);
    if (!(r >= 0)) raise(FMPP_ERR_PARSE, path + ": negative rate");
    xs.insert(x);
    ys.insert(y);
    rows.emplace_back(x, y, r);
  }
  IntensityModel m;
  m.kind_ = Kind::Grid;
  m.window_ = p.window();
  m.spec_ = "grid:" + path;
  m.gx_.assign(xs.begin(), xs.end());
  m.gy_.assign(ys.begin(), ys.end());
  if (m.gx_.size() < 2 || m.gy_.size() < 2)
    raise(FMPP_ERR_PARSE, path + ": lattice needs >= 2 distinct x and y");
  m.gval_.assign(m.gx_.size() * m.gy_.size(),
                 std::numeric_limits<double>::quiet_NaN());
  auto xi = [&](double x) {
    return std::lower_bound(m.gx_.begin(), m.gx_.end(), x) - m.gx_.begin();
  };
  auto yi = [&](double y) {
    return std::lower_bound(m.gy_.begin(), m.gy_.end(), y) - m.gy_.begin();
  };
  for (auto& [x, y, r] : rows) m.gval_[yi(y) * m.gx_.size() + xi(x)] = r;
  for (double v : m.gval_)
    if (std::isnan(v)) raise(FMPP_ERR_PARSE, path + ": lattice has holes");
  m.floor_ = 1e-12 * std::max<double>(p.size(), 1) / p.window().area();
  for (const FmPoint& pt : p.points())
    if (pt.aux.label) m.label_freq_[*pt.aux.label] += 1.0 / p.size();
  return m;
}

IntensityModel IntensityModel::fit(const Pattern& p, const std::string& spec) {
  std::string s = spec;
  bool labels = false;
  if (auto pos = s.find("+labels"); pos != std::string::npos) {
    labels = true;
    s.erase(pos, 7);
  }
  if (s == "homog") return homogeneous(p);
  if (s.rfind("const:", 0) == 0) {
    try {
      return constant(p.window(), std::stod(s.substr(6)));
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      raise(FMPP_ERR_PARSE, "bad constant rate in: " + spec);
    }
  }
  if (s == "kernel") return kernel(p, 0, labels);
  if (s.rfind("kernel:", 0) == 0) {
    try {
      return kernel(p, std::stod(s.substr(7)), labels);
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      raise(FMPP_ERR_PARSE, "bad kernel bandwidth in: " + spec);
    }
  }
  if (s.rfind("grid:", 0) == 0) return from_grid_csv(p, s.substr(5));
  raise(FMPP_ERR_PARSE, "unknown intensity spec: " + spec);
}

double IntensityModel::ground_unfloored(Vec2 x) const {
  switch (kind_) {
    case Kind::Homogeneous:
      return rho_const_;
    case Kind::Kernel: {
      double s = 0;
      for (std::size_t i = 0; i < centers_.size(); ++i)
        s += gauss(x.x - centers_[i].x, hx_) * gauss(x.y - centers_[i].y, hy_) /
             edge_norm_[i];
      // leave-one-out at the fitted points themselves
      auto self = center_index_.find({x.x, x.y});
      if (self != center_index_.end())
        s -= gauss(0, hx_) * gauss(0, hy_) / edge_norm_[self->second];
      return s;
    }
    case Kind::Grid: {
      double cx = std::clamp(x.x, gx_.front(), gx_.back());
      double cy = std::clamp(x.y, gy_.front(), gy_.back());
      auto ix = std::upper_bound(gx_.begin(), gx_.end(), cx) - gx_.begin();
      auto iy = std::upper_bound(gy_.begin(), gy_.end(), cy) - gy_.begin();
      std::size_t i1 = std::clamp<std::size_t>(ix, 1, gx_.size() - 1);
      std::size_t j1 = std::clamp<std::size_t>(iy, 1, gy_.size() - 1);
      std::size_t i0 = i1 - 1, j0 = j1 - 1;
      double tx = (cx - gx_[i0]) / (gx_[i1] - gx_[i0]);
      double ty = (cy - gy_[j0]) / (gy_[j1] - gy_[j0]);
      auto v = [&](std::size_t j, std::size_t i) {
        return gval_[j * gx_.size() + i];
      };
      return (1 - tx) * (1 - ty) * v(j0, i0) + tx * (1 - ty) * v(j0, i1) +
             (1 - tx) * ty * v(j1, i0) + tx * ty * v(j1, i1);
    }
  }
  return rho_const_;
}

double IntensityModel::ground(Vec2 x) const {
  if (!window_.contains(x))
    raise(FMPP_ERR_OUTSIDE_WINDOW, "intensity queried outside the window");
  return std::max(ground_unfloored(x), floor_);
}

double IntensityModel::label_factor(Vec2 x, int label) const {
  if (label_freq_.empty()) return 1.0;
  if (per_label_ && kind_ == Kind::Kernel) {
    double total = 0, match = 0;
    for (std::size_t i = 0; i < centers_.size(); ++i) {
      double k = gauss(x.x - centers_[i].x, hx_) *
                 gauss(x.y - centers_[i].y, hy_) / edge_norm_[i];
      total += k;
      if (labels_[i] == label) match += k;
    }
    return total > 0 ? match / total : 0.0;
  }
  auto it = label_freq_.find(label);
  return it == label_freq_.end() ? 0.0 : it->second;
}

double IntensityModel::at(Vec2 x, const AuxMark& aux) const {
  double g = ground(x);
  if (aux.label && !label_freq_.empty())
    g *= label_factor(x, *aux.label);
  return std::max(g, floor_);
}

}  // namespace fmpp

#include "simulate.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace fmpp {

namespace {

std::map<std::string, double> parse_kv(const std::string& body,
                                       const std::string& what) {
  std::map<std::string, double> kv;
  std::istringstream in(body);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    auto eq = tok.find('=');
    if (eq == std::string::npos)
      raise(FMPP_ERR_PARSE, "bad " + what + " parameter: " + tok);
    try {
      kv[tok.substr(0, eq)] = std::stod(tok.substr(eq + 1));
    } catch (const std::exception&) {
      raise(FMPP_ERR_PARSE, "bad " + what + " parameter: " + tok);
    }
  }
  return kv;
}

double kv_get(const std::map<std::string, double>& kv, const std::string& key,
              double fallback, bool required = false) {
  auto it = kv.find(key);
  if (it != kv.end()) return it->second;
  if (required) raise(FMPP_ERR_PARSE, "missing parameter: " + key);
  return fallback;
}

Vec2 draw_uniform(const Window& w, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ux(w.bbox_min().x, w.bbox_max().x);
  std::uniform_real_distribution<double> uy(w.bbox_min().y, w.bbox_max().y);
  for (;;) {
    Vec2 v{ux(rng), uy(rng)};
    if (w.contains(v)) return v;
  }
}

/// Dense Cholesky of an SPD matrix held row-major; one retry with jitter.
void cholesky_in_place(std::vector<double>& a, std::size_t n) {
  auto attempt = [&](std::vector<double>& mat) {
    for (std::size_t j = 0; j < n; ++j) {
      double d = mat[j * n + j];
      for (std::size_t k = 0; k < j; ++k) d -= mat[j * n + k] * mat[j * n + k];
      if (d <= 0) return false;
      double lj = std::sqrt(d);
      mat[j * n + j] = lj;
      for (std::size_t i = j + 1; i < n; ++i) {
        double s = mat[i * n + j];
        for (std::size_t k = 0; k < j; ++k)
          s -= mat[i * n + k] * mat[j * n + k];
        mat[i * n + j] = s / lj;
      }
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) mat[i * n + j] = 0;
    return true;
  };
  std::vector<double> saved = a;
  if (attempt(a)) return;
  a = std::move(saved);
  for (std::size_t i = 0; i < n; ++i) a[i * n + i] += 1e-10;
  if (!attempt(a))
    raise(FMPP_ERR_CHOLESKY_FAILURE,
          "covariance matrix is not positive definite");
}

}  // namespace

GroundModel GroundModel::poisson(double rate) {
  if (rate < 0) raise(FMPP_ERR_INVALID_ARGUMENT, "poisson rate must be >= 0");
  GroundModel g;
  g.kind = Kind::Poisson;
  g.rate = rate;
  return g;
}

GroundModel GroundModel::poisson_field(const IntensityModel& rate) {
  GroundModel g;
  g.kind = Kind::Poisson;
  g.rate_grid = &rate;
  return g;
}

GroundModel GroundModel::binomial(int n) {
  if (n < 0) raise(FMPP_ERR_INVALID_ARGUMENT, "binomial count must be >= 0");
  GroundModel g;
  g.kind = Kind::Binomial;
  g.n = n;
  return g;
}

GroundModel GroundModel::lgcp(double mu, double sig2, double phi,
                              int resolution) {
  if (sig2 < 0 || phi <= 0)
    raise(FMPP_ERR_INVALID_ARGUMENT, "lgcp needs sig2 >= 0 and phi > 0");
  if (resolution < 32)
    raise(FMPP_ERR_INVALID_ARGUMENT, "lgcp lattice must be >= 32x32");
  if (resolution > 64)
    raise(FMPP_ERR_PROBLEM_TOO_LARGE,
          "lgcp lattice capped at 64x64 (dense Cholesky)");
  GroundModel g;
  g.kind = Kind::Lgcp;
  g.mu = mu;
  g.sig2 = sig2;
  g.phi = phi;
  g.resolution = resolution;
  return g;
}

GroundModel GroundModel::parse(const std::string& spec) {
  if (spec.rfind("poisson:", 0) == 0) {
    try {
      return poisson(std::stod(spec.substr(8)));
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      raise(FMPP_ERR_PARSE, "bad poisson rate in: " + spec);
    }
  }
  if (spec.rfind("binomial:", 0) == 0) {
    try {
      return binomial(std::stoi(spec.substr(9)));
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      raise(FMPP_ERR_PARSE, "bad binomial count in: " + spec);
    }
  }
  if (spec.rfind("lgcp:", 0) == 0) {
    auto kv = parse_kv(spec.substr(5), "lgcp");
    return lgcp(kv_get(kv, "mu", 0, true), kv_get(kv, "sig2", 0, true),
                kv_get(kv, "phi", 0, true),
                static_cast<int>(kv_get(kv, "res", 32)));
  }
  raise(FMPP_ERR_PARSE, "unknown ground model: " + spec);
}

std::vector<Vec2> simulate_ground(const GroundModel& gm, const Window& w,
                                  uint64_t seed) {
  std::mt19937_64 rng = substream(seed, 0x67726f756eull);  // ground stream
  std::vector<Vec2> pts;
  switch (gm.kind) {
    case GroundModel::Kind::Binomial: {
      pts.reserve(gm.n);
      for (int i = 0; i < gm.n; ++i) pts.push_back(draw_uniform(w, rng));
      break;
    }
    case GroundModel::Kind::Poisson: {
      double expected;
      double rho_max = 0;
      if (gm.rate_grid) {
        const int probe = 96;
        Vec2 lo = w.bbox_min(), hi = w.bbox_max();
        double sum = 0;
        int inside = 0;
        for (int i = 0; i < probe; ++i)
          for (int j = 0; j < probe; ++j) {
            Vec2 v{lo.x + (hi.x - lo.x) * (i + 0.5) / probe,
                   lo.y + (hi.y - lo.y) * (j + 0.5) / probe};
            if (!w.contains(v)) continue;
            double r = gm.rate_grid->ground(v);
            sum += r;
            inside += 1;
            rho_max = std::max(rho_max, r);
          }
        expected = inside ? sum / inside * w.area() : 0;
        rho_max *= 1.05;
      } else {
        expected = gm.rate * w.area();
        rho_max = gm.rate;
      }
      if (expected > 1e6)
        raise(FMPP_ERR_RATE_OVERFLOW, "expected point count exceeds 1e6");
      // dominate with the constant rho_max, thin for fields
      double dominating = gm.rate_grid ? rho_max * w.area() : expected;
      std::poisson_distribution<long> pd(dominating);
      long count = dominating > 0 ? pd(rng) : 0;
      std::uniform_real_distribution<double> u01(0.0, 1.0);
      for (long i = 0; i < count; ++i) {
        Vec2 v = draw_uniform(w, rng);
        if (gm.rate_grid && u01(rng) * rho_max > gm.rate_grid->ground(v))
          continue;
        pts.push_back(v);
      }
      break;
    }
    case GroundModel::Kind::Lgcp: {
      const int res = gm.resolution;
      const std::size_t nodes = static_cast<std::size_t>(res) * res;
      Vec2 lo = w.bbox_min(), hi = w.bbox_max();
      double dx = (hi.x - lo.x) / res, dy = (hi.y - lo.y) / res;
      std::vector<Vec2> centers(nodes);
      for (int i = 0; i < res; ++i)
        for (int j = 0; j < res; ++j)
          centers[i * res + j] = {lo.x + (i + 0.5) * dx, lo.y + (j + 0.5) * dy};
      std::vector<double> field(nodes, gm.mu);
      if (gm.sig2 > 0) {
        std::vector<double> cov(nodes * nodes);
        for (std::size_t i = 0; i < nodes; ++i)
          for (std::size_t j = 0; j < nodes; ++j)
            cov[i * nodes + j] =
                gm.sig2 * std::exp(-norm(centers[i] - centers[j]) / gm.phi);
        for (std::size_t i = 0; i < nodes; ++i) cov[i * nodes + i] += 1e-12;
        cholesky_in_place(cov, nodes);
        std::normal_distribution<double> nd(0.0, 1.0);
        std::vector<double> z(nodes);
        for (double& v : z) v = nd(rng);
        for (std::size_t i = 0; i < nodes; ++i) {
          double s = 0;
          for (std::size_t k = 0; k <= i; ++k) s += cov[i * nodes + k] * z[k];
          field[i] += s;
        }
      }
      double lam_max = 0, lam_mean = 0;
      for (double v : field) {
        lam_max = std::max(lam_max, std::exp(v));
        lam_mean += std::exp(v) / nodes;
      }
      if (lam_mean * w.area() > 1e6)
        raise(FMPP_ERR_RATE_OVERFLOW, "expected point count exceeds 1e6");
      std::poisson_distribution<long> pd(lam_max * w.area());
      long count = pd(rng);
      std::uniform_real_distribution<double> u01(0.0, 1.0);
      auto rate_at = [&](Vec2 v) {
        // nearest lattice node
        int i = std::clamp(static_cast<int>((v.x - lo.x) / dx), 0, res - 1);
        int j = std::clamp(static_cast<int>((v.y - lo.y) / dy), 0, res - 1);
        return std::exp(field[static_cast<std::size_t>(i) * res + j]);
      };
      for (long i = 0; i < count; ++i) {
        Vec2 v = draw_uniform(w, rng);
        if (u01(rng) * lam_max <= rate_at(v)) pts.push_back(v);
      }
      break;
    }
  }
  return pts;
}

MarkModel MarkModel::brownian(double sigma, double start) {
  if (sigma < 0) raise(FMPP_ERR_INVALID_ARGUMENT, "brownian sigma must be >= 0");
  MarkModel m;
  m.kind = Kind::IidBrownian;
  m.sigma = sigma;
  m.start = start;
  return m;
}

MarkModel MarkModel::geostat(double phi_s, double phi_t, double sigma,
                             double mean) {
  if (phi_s <= 0 || phi_t <= 0 || sigma < 0)
    raise(FMPP_ERR_INVALID_ARGUMENT, "geostat scales must be positive");
  MarkModel m;
  m.kind = Kind::Geostat;
  m.phi_s = phi_s;
  m.phi_t = phi_t;
  m.geo_sigma = sigma;
  m.geo_mean = mean;
  return m;
}

MarkModel MarkModel::intensity_dependent(double a, double b, double sigma_eps) {
  if (sigma_eps < 0)
    raise(FMPP_ERR_INVALID_ARGUMENT, "noise sigma must be >= 0");
  MarkModel m;
  m.kind = Kind::IntensityDependent;
  m.a = a;
  m.b = b;
  m.sigma_eps = sigma_eps;
  return m;
}

MarkModel MarkModel::growth_interaction(GrowthInteractionParams gi) {
  MarkModel m;
  m.kind = Kind::GrowthInteraction;
  m.gi = std::move(gi);
  return m;
}

MarkModel MarkModel::parse(const std::string& spec) {
  if (spec.rfind("brownian:", 0) == 0) {
    auto kv = parse_kv(spec.substr(9), "brownian");
    return brownian(kv_get(kv, "sigma", 1), kv_get(kv, "start", 0));
  }
  if (spec.rfind("geostat:", 0) == 0) {
    auto kv = parse_kv(spec.substr(8), "geostat");
    return geostat(kv_get(kv, "phis", 0, true), kv_get(kv, "phit", 0, true),
                   kv_get(kv, "sigma", 1), kv_get(kv, "mean", 0));
  }
  if (spec.rfind("intdep:", 0) == 0) {
    auto kv = parse_kv(spec.substr(7), "intdep");
    return intensity_dependent(kv_get(kv, "a", 0, true),
                               kv_get(kv, "b", 0, true),
                               kv_get(kv, "sigeps", 0));
  }
  if (spec.rfind("gi:", 0) == 0) {
    auto kv = parse_kv(spec.substr(3), "gi");
    GrowthInteractionParams gi;
    gi.lambda = kv_get(kv, "lambda", 1, true);
    gi.carrying = kv_get(kv, "K", 10, true);
    gi.c = kv_get(kv, "c", 0.5, true);
    gi.sigma_int = kv_get(kv, "sigint", 0.1, true);
    gi.mu = kv_get(kv, "mu", 0.2, true);
    gi.sigma_noise = kv_get(kv, "signoise", 0);
    gi.dt = kv_get(kv, "dt", 1e-2);
    gi.f0 = kv_get(kv, "f0", -1);
    return growth_interaction(gi);
  }
  raise(FMPP_ERR_PARSE, "unknown mark model: " + spec);
}

GrowthInteractionResult growth_interaction(
    const std::vector<Vec2>& points, const std::vector<int>& labels,
    const GrowthInteractionParams& params, const TimeGrid& grid,
    uint64_t seed) {
  if (!(params.dt > 0))
    raise(FMPP_ERR_NONPOSITIVE_DT, "integration step must be > 0");
  const std::size_t n = points.size();
  const double t0 = grid.front(), t1 = grid.back();
  std::mt19937_64 rng = substream(seed, 0x6769ull);  // gi stream

  GrowthInteractionResult res;
  res.curves.assign(n, std::vector<double>(grid.size(), 0.0));
  res.birth.resize(n);
  res.death.resize(n);

  auto lam_of = [&](std::size_t i) {
    if (i < labels.size()) {
      auto it = params.lambda_by_label.find(labels[i]);
      if (it != params.lambda_by_label.end()) return it->second;
    }
    return params.lambda;
  };
  auto cap_of = [&](std::size_t i) {
    if (i < labels.size()) {
      auto it = params.carrying_by_label.find(labels[i]);
      if (it != params.carrying_by_label.end()) return it->second;
    }
    return params.carrying;
  };
  auto c_of = [&](std::size_t i, std::size_t j) {
    if (i < labels.size() && j < labels.size()) {
      auto it = params.c_by_label_pair.find({labels[i], labels[j]});
      if (it != params.c_by_label_pair.end()) return it->second;
    }
    return params.c;
  };

  std::uniform_real_distribution<double> ub(t0, t1);
  std::exponential_distribution<double> ed(params.mu);
  for (std::size_t i = 0; i < n; ++i) {
    res.birth[i] = ub(rng);
    res.death[i] = res.birth[i] + ed(rng);
  }

  if (n == 0) return res;

  // precomputed competition kernels exp(-d^2/sigma^2)
  std::vector<double> kern(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      Vec2 d = points[i] - points[j];
      kern[i * n + j] =
          std::exp(-dot(d, d) / (params.sigma_int * params.sigma_int));
    }

  // breakpoints: grid times plus births and deaths inside the horizon
  std::set<double> bps(grid.begin(), grid.end());
  for (std::size_t i = 0; i < n; ++i) {
    if (res.birth[i] > t0 && res.birth[i] < t1) bps.insert(res.birth[i]);
    if (res.death[i] > t0 && res.death[i] < t1) bps.insert(res.death[i]);
  }

  std::vector<double> f(n, 0.0);
  std::vector<uint8_t> alive(n, 0);
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);

  auto derivative = [&](const std::vector<double>& state,
                        std::vector<double>& out) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!alive[i]) {
        out[i] = 0;
        continue;
      }
      double fi = state[i];
      double growth = lam_of(i) * fi * (1.0 - fi / cap_of(i));
      double inter = 0;
      for (std::size_t j = 0; j < n; ++j)
        if (alive[j] && j != i) inter += c_of(i, j) * kern[i * n + j] * state[j];
      out[i] = growth - fi * inter;
    }
  };

  std::normal_distribution<double> nd(0.0, 1.0);
  auto record = [&](double t) {
    auto it = std::lower_bound(grid.begin(), grid.end(), t);
    if (it == grid.end() || *it != t) return;
    std::size_t gi_idx = static_cast<std::size_t>(it - grid.begin());
    for (std::size_t i = 0; i < n; ++i)
      res.curves[i][gi_idx] = alive[i] ? f[i] : 0.0;
  };

  auto refresh_alive = [&](double t) {
    for (std::size_t i = 0; i < n; ++i) {
      bool now = t >= res.birth[i] && t < res.death[i];
      if (now && !alive[i]) {
        f[i] = params.f0 > 0 ? params.f0 : 0.01 * cap_of(i);
      } else if (!now && alive[i]) {
        f[i] = 0;
      }
      alive[i] = now;
    }
  };

  double t = t0;
  refresh_alive(t);
  record(t);
  for (auto it = bps.begin(); std::next(it) != bps.end(); ++it) {
    double a = *it, b = *std::next(it);
    int steps = std::max(1, static_cast<int>(std::ceil((b - a) / params.dt)));
    double h = (b - a) / steps;
    for (int s = 0; s < steps; ++s) {
      if (params.sigma_noise > 0) {
        derivative(f, k1);
        double sq = std::sqrt(h);
        for (std::size_t i = 0; i < n; ++i)
          if (alive[i])
            f[i] = std::max(
                0.0, f[i] + h * k1[i] + params.sigma_noise * sq * nd(rng));
      } else {
        derivative(f, k1);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = f[i] + 0.5 * h * k1[i];
        derivative(tmp, k2);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = f[i] + 0.5 * h * k2[i];
        derivative(tmp, k3);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = f[i] + h * k3[i];
        derivative(tmp, k4);
        for (std::size_t i = 0; i < n; ++i)
          if (alive[i])
            f[i] = std::max(0.0, f[i] + h / 6.0 *
                                            (k1[i] + 2 * k2[i] + 2 * k3[i] +
                                             k4[i]));
      }
    }
    t = b;
    refresh_alive(t);
    record(t);
  }
  return res;
}

MarkSimResult simulate_marks(const MarkModel& mm, const std::vector<Vec2>& points,
                             const std::vector<int>& labels, const Window& w,
                             const TimeGrid& grid, uint64_t seed) {
  const std::size_t n = points.size();
  const std::size_t m = grid.size();
  MarkSimResult res;
  res.curves.assign(n, std::vector<double>(m, 0.0));
  std::mt19937_64 rng = substream(seed, 0x6d61726bull);  // marks stream

  switch (mm.kind) {
    case MarkModel::Kind::IidBrownian: {
      std::normal_distribution<double> nd(0.0, 1.0);
      for (std::size_t i = 0; i < n; ++i) {
        res.curves[i][0] = mm.start;
        for (std::size_t j = 1; j < m; ++j) {
          double dtj = grid[j] - grid[j - 1];
          res.curves[i][j] =
              res.curves[i][j - 1] + mm.sigma * std::sqrt(dtj) * nd(rng);
        }
      }
      break;
    }
    case MarkModel::Kind::Geostat: {
      const std::size_t dim = n * m;
      if (dim > 2000)
        raise(FMPP_ERR_PROBLEM_TOO_LARGE,
              "geostat joint draw capped at 2000 variables");
      if (dim == 0) break;
      std::vector<double> cov(dim * dim);
      for (std::size_t p = 0; p < dim; ++p) {
        std::size_t ip = p / m, jp = p % m;
        for (std::size_t q = 0; q < dim; ++q) {
          std::size_t iq = q / m, jq = q % m;
          double ds = norm(points[ip] - points[iq]);
          double dtv = std::abs(grid[jp] - grid[jq]);
          cov[p * dim + q] = mm.geo_sigma * mm.geo_sigma *
                             std::exp(-ds / mm.phi_s) *
                             std::exp(-dtv / mm.phi_t);
        }
      }
      for (std::size_t p = 0; p < dim; ++p) cov[p * dim + p] += 1e-12;
      cholesky_in_place(cov, dim);
      std::normal_distribution<double> nd(0.0, 1.0);
      std::vector<double> z(dim);
      for (double& v : z) v = nd(rng);
      for (std::size_t p = 0; p < dim; ++p) {
        double s = 0;
        for (std::size_t k = 0; k <= p; ++k) s += cov[p * dim + k] * z[k];
        res.curves[p / m][p % m] = mm.geo_mean + s;
      }
      break;
    }
    case MarkModel::Kind::IntensityDependent: {
      if (n == 0) break;
      // static specialization: rho_G estimated once from the points
      std::vector<double> rho(n, 0.0);
      {
        std::vector<FmPoint> pts(n);
        auto g2 = std::make_shared<const TimeGrid>(TimeGrid{0.0, 1.0});
        for (std::size_t i = 0; i < n; ++i) {
          pts[i].id = "q" + std::to_string(i);
          pts[i].loc = points[i];
          pts[i].curve = Curve{g2, {0.0, 0.0}};
        }
        Pattern tmp(w, std::move(pts), g2);
        IntensityModel im = n >= 2 ? IntensityModel::kernel(tmp)
                                   : IntensityModel::homogeneous(tmp);
        for (std::size_t i = 0; i < n; ++i) rho[i] = im.ground(points[i]);
      }
      std::normal_distribution<double> nd(0.0, 1.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j)
          res.curves[i][j] =
              mm.a + mm.b * rho[i] +
              (mm.sigma_eps > 0 ? mm.sigma_eps * nd(rng) : 0.0);
      break;
    }
    case MarkModel::Kind::GrowthInteraction: {
      auto gi = growth_interaction(points, labels, mm.gi, grid, seed);
      res.curves = std::move(gi.curves);
      res.aux_scalars = std::move(gi.birth);
      res.has_aux = true;
      break;
    }
  }
  return res;
}

Pattern simulate_pattern(const GroundModel& gm, const MarkModel& mm,
                         const Window& w,
                         std::shared_ptr<const TimeGrid> grid, uint64_t seed) {
  std::vector<Vec2> locs = simulate_ground(gm, w, seed);
  std::vector<int> labels;  // single-type by default
  MarkSimResult marks = simulate_marks(mm, locs, labels, w, *grid, seed);
  std::vector<FmPoint> pts(locs.size());
  int width = 1;
  for (std::size_t v = locs.size(); v >= 10; v /= 10) ++width;
  for (std::size_t i = 0; i < locs.size(); ++i) {
    std::ostringstream id;
    id << 'p';
    id.width(width);
    id.fill('0');
    id << i;
    pts[i].id = id.str();
    pts[i].loc = locs[i];
    if (marks.has_aux) pts[i].aux.scalar = marks.aux_scalars[i];
    pts[i].curve = make_curve(grid, std::move(marks.curves[i]));
  }
  return Pattern(w, std::move(pts), grid);
}

std::vector<std::vector<double>> lisa_marks(const std::vector<Vec2>& points,
                                            const TimeGrid& h_grid) {
  const std::size_t n = points.size();
  std::vector<std::vector<double>> curves(n,
                                          std::vector<double>(h_grid.size()));
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> d;
    d.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) d.push_back(norm(points[j] - points[i]));
    std::sort(d.begin(), d.end());
    for (std::size_t k = 0; k < h_grid.size(); ++k)
      curves[i][k] = static_cast<double>(
          std::upper_bound(d.begin(), d.end(), h_grid[k]) - d.begin());
  }
  return curves;
}

Pattern lisa_pattern(const Pattern& p, std::shared_ptr<const TimeGrid> h_grid) {
  std::vector<Vec2> locs;
  locs.reserve(p.size());
  for (const FmPoint& pt : p.points()) locs.push_back(pt.loc);
  auto curves = lisa_marks(locs, *h_grid);
  std::vector<FmPoint> pts = p.points();
  for (std::size_t i = 0; i < pts.size(); ++i)
    pts[i].curve = make_curve(h_grid, std::move(curves[i]));
  return Pattern(p.window(), std::move(pts), h_grid);
}

double coverage_fraction(const std::vector<Vec2>& points,
                         const std::vector<double>& radii, const Window& w,
                         int resolution) {
  if (points.size() != radii.size())
    raise(FMPP_ERR_INVALID_ARGUMENT, "points/radii size mismatch");
  for (double r : radii)
    if (r < 0) raise(FMPP_ERR_INVALID_ARGUMENT, "radii must be >= 0");
  resolution = std::max(resolution, 256);
  Vec2 lo = w.bbox_min(), hi = w.bbox_max();
  double dx = (hi.x - lo.x) / resolution, dy = (hi.y - lo.y) / resolution;
  long inside = 0, covered = 0;
  for (int i = 0; i < resolution; ++i)
    for (int j = 0; j < resolution; ++j) {
      Vec2 v{lo.x + (i + 0.5) * dx, lo.y + (j + 0.5) * dy};
      if (!w.contains(v)) continue;
      ++inside;
      for (std::size_t k = 0; k < points.size(); ++k) {
        Vec2 d = v - points[k];
        if (dot(d, d) <= radii[k] * radii[k]) {
          ++covered;
          break;
        }
      }
    }
  return inside ? static_cast<double>(covered) / inside : 0.0;
}

}  // namespace fmpp

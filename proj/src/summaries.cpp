#include "summaries.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace fmpp {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

/// Smallest r at which the displacement enters the scaled template; kInf
/// when it never does. Template sets grow with r, so membership at grid
/// value r is simply r >= r_star.
double entry_radius(const StructElem& tmpl, Vec2 d, double dist) {
  switch (tmpl.kind) {
    case StructElem::Kind::Ball:
      return dist;
    case StructElem::Kind::Sector: {
      StructElem probe = tmpl.scaled(std::max(dist, 1e-300));
      return probe.contains(d) ? dist : kInf;
    }
    case StructElem::Kind::Box: {
      double rx = tmpl.ax > 0 ? std::abs(d.x) / tmpl.ax
                              : (d.x == 0 ? 0.0 : kInf);
      double ry = tmpl.ay > 0 ? std::abs(d.y) / tmpl.ay
                              : (d.y == 0 ? 0.0 : kInf);
      return std::max(rx, ry);
    }
  }
  return kInf;
}

std::size_t first_grid_index(const std::vector<double>& r_grid, double r_star) {
  return std::lower_bound(r_grid.begin(), r_grid.end(), r_star) -
         r_grid.begin();
}

void validate_query(const Pattern& p, const KQuery& q) {
  if (p.size() == 0)
    raise(FMPP_ERR_EMPTY_PATTERN, "estimate_k on an empty pattern");
  if (q.order < 2 || q.order > 3)
    raise(FMPP_ERR_INVALID_ARGUMENT, "order must be 2 or 3");
  std::size_t slots = static_cast<std::size_t>(q.order - 1);
  if (q.neighbor_sets.size() != slots || q.elems.size() != slots)
    raise(FMPP_ERR_INVALID_ARGUMENT,
          "query needs order-1 neighbour mark sets and elements");
  if (q.r_grid.empty())
    raise(FMPP_ERR_INVALID_ARGUMENT, "empty r grid");
  for (std::size_t i = 0; i < q.r_grid.size(); ++i) {
    if (q.r_grid[i] < 0 || (i > 0 && q.r_grid[i] <= q.r_grid[i - 1]))
      raise(FMPP_ERR_INVALID_ARGUMENT, "r grid must be increasing and >= 0");
  }
  if (q.correction == EdgeCorrection::Isotropic) {
    if (q.order != 2)
      raise(FMPP_ERR_UNSUPPORTED, "isotropic correction requires n = 2");
    if (q.elems[0].kind != StructElem::Kind::Ball)
      raise(FMPP_ERR_UNSUPPORTED,
            "isotropic correction requires ball elements");
  }
}

struct Prepared {
  std::vector<double> rho;        // intensity at each point (floored)
  std::vector<uint8_t> floored;
  std::vector<uint8_t> cond;
  std::vector<std::vector<uint8_t>> nb;  // per slot
  TestFunction tf;                       // mean curve bound
  double xi_full = 0;                    // Xi_G(W) = sum 1/rho_G
};

Prepared prepare(const Pattern& p, const KQuery& q, const IntensityModel& m) {
  Prepared pre;
  std::size_t n = p.size();
  pre.rho.resize(n);
  pre.floored.resize(n);
  pre.cond.resize(n);
  pre.nb.assign(q.neighbor_sets.size(), std::vector<uint8_t>(n));
  double floor_edge = m.floor_value() * (1 + 1e-9);
  for (std::size_t i = 0; i < n; ++i) {
    const FmPoint& pt = p.points()[i];
    pre.rho[i] = q.ground_intensity_only ? m.ground(pt.loc)
                                         : m.at(pt.loc, pt.aux);
    pre.floored[i] = pre.rho[i] <= floor_edge;
    pre.cond[i] = mark_in(q.cond_set, pt);
    for (std::size_t s = 0; s < q.neighbor_sets.size(); ++s)
      pre.nb[s][i] = mark_in(q.neighbor_sets[s], pt);
    pre.xi_full += 1.0 / m.ground(pt.loc);
  }
  pre.tf = q.test_fn;
  if (pre.tf.needs_mean_curve()) pre.tf.bind_mean_curve(empirical_mean_curve(p));
  return pre;
}

struct BlockAccum {
  std::vector<double> sum;       // per r (already prefix-summed semantics vary)
  std::vector<long long> cnt;
  long long floored = 0;
};

}  // namespace

const char* normalization_name(Normalization n) {
  switch (n) {
    case Normalization::Raw: return "raw";
    case Normalization::Hamilton: return "hamilton";
    case Normalization::GroundNormalized: return "ground";
  }
  return "?";
}

Normalization parse_normalization(const std::string& name) {
  if (name == "raw") return Normalization::Raw;
  if (name == "hamilton") return Normalization::Hamilton;
  if (name == "ground" || name == "ground-normalized")
    return Normalization::GroundNormalized;
  raise(FMPP_ERR_PARSE, "unknown normalization: " + name);
}

KQuery KQuery::make(int order) {
  KQuery q;
  q.order = order;
  q.neighbor_sets.assign(order - 1, MarkSet::all());
  q.elems.assign(order - 1, StructElem::ball(1));
  return q;
}

std::string KQuery::echo() const {
  std::ostringstream os;
  os << "order=" << order << " t=" << test_fn.to_string()
     << " cond=" << cond_set.to_string();
  for (std::size_t s = 0; s < neighbor_sets.size(); ++s)
    os << " nb" << s + 1 << "=" << neighbor_sets[s].to_string() << "/"
       << elems[s].to_string();
  os << " corr=" << correction_name(correction)
     << " norm=" << normalization_name(norm);
  return os.str();
}

double hamilton_nu(const Pattern& p, const MarkSet& ms,
                   const IntensityModel& m) {
  if (p.size() == 0)
    raise(FMPP_ERR_EMPTY_PATTERN, "hamilton_nu on an empty pattern");
  double num = 0, den = 0;
  for (const FmPoint& pt : p.points()) {
    den += 1.0 / m.ground(pt.loc);
    if (mark_in(ms, pt)) num += 1.0 / m.at(pt.loc, pt.aux);
  }
  return num / den;
}

KEstimate estimate_k(const Pattern& p, const KQuery& q,
                     const IntensityModel& m, int n_threads) {
  validate_query(p, q);
  const std::size_t n = p.size();
  const std::size_t R = q.r_grid.size();
  const Prepared pre = prepare(p, q, m);
  const DistanceTable& dt = p.distances();
  const Window& w = p.window();
  const double win_area = w.area();
  const bool minus = q.correction == EdgeCorrection::MinusSampling;

  KEstimate est;
  est.r = q.r_grid;
  est.value.assign(R, 0.0);
  est.available.assign(R, 1);
  est.count.assign(R, 0);
  est.normalizer.assign(R, 1.0);
  est.query_echo = q.echo();

  bool any_cond = false;
  for (uint8_t c : pre.cond) any_cond |= (c != 0);
  est.empty_conditioning = !any_cond;

  // Scaled elements and eroded windows per r (minus sampling only).
  std::vector<std::optional<Window>> eroded(R);
  std::vector<double> xi_eroded(R, 0.0), area_eroded(R, 0.0);
  if (minus) {
    for (std::size_t k = 0; k < R; ++k) {
      std::vector<StructElem> scaled;
      scaled.reserve(q.elems.size());
      for (const StructElem& e : q.elems) scaled.push_back(e.scaled(q.r_grid[k]));
      eroded[k] = eroded_intersection(w, scaled);
      if (eroded[k]) {
        area_eroded[k] = eroded[k]->area();
        for (std::size_t i = 0; i < n; ++i)
          if (eroded[k]->contains(p.points()[i].loc))
            xi_eroded[k] += 1.0 / m.ground(p.points()[i].loc);
      } else {
        est.available[k] = 0;
        est.value[k] = kNan;
      }
    }
  }
  // Largest r index at which point i still lies in the eroded window.
  std::vector<std::ptrdiff_t> max_eroded_idx;
  if (minus) {
    max_eroded_idx.assign(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
      std::ptrdiff_t last = -1;
      for (std::size_t k = 0; k < R; ++k) {
        if (!eroded[k] || !eroded[k]->contains(p.points()[i].loc)) break;
        last = static_cast<std::ptrdiff_t>(k);
      }
      max_eroded_idx[i] = last;
    }
  }

  // Entry radii for all ordered pairs and each slot.
  auto entry_index = [&](std::size_t i, std::size_t j, std::size_t s) {
    double rs = entry_radius(q.elems[s], dt.v(i, j), dt.d(i, j));
    return first_grid_index(q.r_grid, rs);
  };

  // Block-parallel accumulation: fixed blocks of conditioning points are
  // merged in block order so the reduction is identical for any thread count.
  const std::size_t block_size = 32;
  const std::size_t n_blocks = (n + block_size - 1) / block_size;
  std::vector<BlockAccum> blocks(n_blocks);

  auto mark_ref = [&](std::size_t i) {
    const FmPoint& pt = p.points()[i];
    return MarkRef{&pt.aux, &pt.curve};
  };

  parallel_blocks(n_blocks, n_threads, [&](std::size_t b) {
    BlockAccum& acc = blocks[b];
    acc.sum.assign(R, 0.0);
    acc.cnt.assign(R, 0);
    // diff arrays for r-independent weights; per-point prefix for minus
    std::vector<double> local(R, 0.0);
    std::vector<long long> local_cnt(R, 0);
    std::size_t lo = b * block_size, hi = std::min(n, lo + block_size);
    for (std::size_t i = lo; i < hi; ++i) {
      if (!pre.cond[i]) continue;
      const Vec2 xi = p.points()[i].loc;
      bool use_local = minus;
      if (use_local) {
        std::fill(local.begin(), local.end(), 0.0);
        std::fill(local_cnt.begin(), local_cnt.end(), 0);
      }
      std::vector<double>& target = use_local ? local : acc.sum;
      std::vector<long long>& target_cnt = use_local ? local_cnt : acc.cnt;

      if (q.order == 2) {
        for (std::size_t j = 0; j < n; ++j) {
          if (j == i || !pre.nb[0][j]) continue;
          std::size_t k0 = entry_index(i, j, 0);
          if (k0 >= R) continue;
          MarkRef marks[2] = {mark_ref(i), mark_ref(j)};
          double tv = eval(pre.tf, marks);
          double base = tv / (pre.rho[i] * pre.rho[j]);
          double weight = 1.0;
          switch (q.correction) {
            case EdgeCorrection::Translational: {
              Vec2 d = dt.v(i, j);
              weight = 1.0 / shifted_intersection_volume(w, {&d, 1});
              break;
            }
            case EdgeCorrection::Isotropic:
              // ratio only; the window mass divides the total below
              weight = 1.0 / arc_fraction_inside(w, xi, dt.d(i, j));
              break;
            case EdgeCorrection::None:
            case EdgeCorrection::MinusSampling:
              weight = 1.0;  // window mass handled in the normaliser
              break;
          }
          target[k0] += weight * base;
          target_cnt[k0] += 1;
          if (pre.floored[i] || pre.floored[j]) acc.floored += 1;
        }
      } else {  // order 3
        for (std::size_t j = 0; j < n; ++j) {
          if (j == i || !pre.nb[0][j]) continue;
          std::size_t kj = entry_index(i, j, 0);
          if (kj >= R) continue;
          for (std::size_t l = 0; l < n; ++l) {
            if (l == i || l == j || !pre.nb[1][l]) continue;
            std::size_t kl = entry_index(i, l, 1);
            if (kl >= R) continue;
            std::size_t k0 = std::max(kj, kl);
            MarkRef marks[3] = {mark_ref(i), mark_ref(j), mark_ref(l)};
            double tv = eval(pre.tf, marks);
            double base = tv / (pre.rho[i] * pre.rho[j] * pre.rho[l]);
            double weight = 1.0;
            if (q.correction == EdgeCorrection::Translational) {
              Vec2 d2[2] = {dt.v(i, j), dt.v(i, l)};
              weight = 1.0 / shifted_intersection_volume(w, d2);
            }
            target[k0] += weight * base;
            target_cnt[k0] += 1;
            if (pre.floored[i] || pre.floored[j] || pre.floored[l])
              acc.floored += 1;
          }
        }
      }

      if (use_local) {
        // prefix-sum the diff arrays, then keep entries while x_i remains in
        // the eroded window
        double run = 0;
        long long runc = 0;
        std::ptrdiff_t kmax = max_eroded_idx[i];
        for (std::size_t k = 0; k < R; ++k) {
          run += local[k];
          runc += local_cnt[k];
          if (static_cast<std::ptrdiff_t>(k) <= kmax) {
            acc.sum[k] += run;
            acc.cnt[k] += runc;
          }
        }
      }
    }
  });

  // Ordered reduction over blocks.
  std::vector<double> total(R, 0.0);
  std::vector<long long> counts(R, 0);
  for (const BlockAccum& acc : blocks) {
    if (acc.sum.empty()) continue;
    for (std::size_t k = 0; k < R; ++k) {
      total[k] += acc.sum[k];
      counts[k] += acc.cnt[k];
    }
    est.floored_rho_tuples += acc.floored;
  }
  if (!minus) {
    // diff arrays -> cumulative in r
    for (std::size_t k = 1; k < R; ++k) {
      total[k] += total[k - 1];
      counts[k] += counts[k - 1];
    }
  }

  // Normalisation. The tuple sums above carry no window mass except for the
  // translational weight; mass(r) supplies it, Hamilton style when asked.
  const bool hamilton = q.norm != Normalization::Raw;
  double nu = 1.0;
  if (hamilton && !q.ground_intensity_only) {
    nu = hamilton_nu(p, q.cond_set, m);
    for (const MarkSet& ms : q.neighbor_sets) nu *= hamilton_nu(p, ms, m);
  }
  est.nu_product = nu;

  for (std::size_t k = 0; k < R; ++k) {
    if (!est.available[k]) {
      est.normalizer[k] = kNan;
      counts[k] = 0;
      continue;
    }
    double mass;
    switch (q.correction) {
      case EdgeCorrection::Translational:
        mass = hamilton ? pre.xi_full / win_area : 1.0;
        break;
      case EdgeCorrection::MinusSampling:
        mass = hamilton ? xi_eroded[k] : area_eroded[k];
        break;
      default:  // Isotropic, None
        mass = hamilton ? pre.xi_full : win_area;
        break;
    }
    if (!(mass > 0) || !std::isfinite(mass)) {
      est.available[k] = 0;
      est.value[k] = kNan;
      est.normalizer[k] = kNan;
      continue;
    }
    est.normalizer[k] = mass * nu;
    est.value[k] = total[k] / (mass * nu);
    est.count[k] = counts[k];
  }

  if (q.norm == Normalization::GroundNormalized) {
    KQuery gq = KQuery::make(q.order);
    gq.elems = q.elems;
    gq.r_grid = q.r_grid;
    gq.correction = q.correction;
    gq.norm = Normalization::Hamilton;
    gq.ground_intensity_only = true;
    KEstimate g = estimate_k(p, gq, m, n_threads);
    for (std::size_t k = 0; k < R; ++k) {
      if (!est.available[k]) continue;
      if (!g.available[k] || g.value[k] == 0) {
        est.available[k] = 0;
        est.value[k] = kNan;
        est.normalizer[k] = kNan;
        continue;
      }
      est.value[k] /= g.value[k];
      est.normalizer[k] *= g.value[k];
    }
  }
  return est;
}

KEstimate ground_k(const Pattern& p, std::vector<double> r_grid,
                   EdgeCorrection correction, const IntensityModel& m,
                   int n_threads) {
  KQuery q = KQuery::make(2);
  q.r_grid = std::move(r_grid);
  q.correction = correction;
  q.norm = Normalization::Hamilton;
  q.ground_intensity_only = true;
  return estimate_k(p, q, m, n_threads);
}

namespace {

double contrast_value(
    const KEstimate& observed,
    const std::function<double(double, std::span<const double>)>& model,
    std::span<const double> theta, double p, double q, double r_min,
    double r_max) {
  double s = 0;
  const std::size_t R = observed.r.size();
  bool any = false;
  for (std::size_t k = 0; k < R; ++k) {
    double r = observed.r[k];
    if (r < r_min || r > r_max || !observed.available[k]) continue;
    double dr;
    if (k + 1 < R)
      dr = observed.r[k + 1] - observed.r[k];
    else
      dr = k > 0 ? observed.r[k] - observed.r[k - 1] : 1.0;
    double mv = model(r, theta);
    s += std::pow(std::abs(std::pow(mv, q) - std::pow(observed.value[k], q)),
                  p) *
         dr;
    any = true;
  }
  if (!any)
    raise(FMPP_ERR_INVALID_ARGUMENT,
          "no usable r values in the contrast window");
  if (!std::isfinite(s))
    raise(FMPP_ERR_NON_FINITE_CONTRAST, "contrast is not finite");
  return s;
}

}  // namespace

MinContrastResult minimum_contrast_fit(
    const KEstimate& observed,
    const std::function<double(double, std::span<const double>)>& model,
    std::span<const double> lo, std::span<const double> hi, double p, double q,
    double r_min, double r_max) {
  if (lo.size() != hi.size() || lo.empty())
    raise(FMPP_ERR_INVALID_ARGUMENT, "bad parameter bounds");
  const std::size_t dim = lo.size();
  auto f = [&](std::span<const double> theta) {
    return contrast_value(observed, model, theta, p, q, r_min, r_max);
  };

  MinContrastResult res;
  if (dim == 1) {
    // golden section on [lo, hi]
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo[0], b = hi[0];
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = f({&c, 1}), fd = f({&d, 1});
    for (int it = 0; it < 200 && (b - a) > 1e-14 * std::max(1.0, std::abs(b));
         ++it) {
      if (fc < fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - gr * (b - a);
        fc = f({&c, 1});
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + gr * (b - a);
        fd = f({&d, 1});
      }
    }
    double mid = 0.5 * (a + b);
    res.theta = {mid};
    res.contrast = f({&mid, 1});
    return res;
  }

  // Nelder-Mead; points outside the box get a steep penalty so the simplex
  // never collapses onto the boundary. Restarted from three corners.
  auto f_pen = [&](const std::vector<double>& th) {
    double pen = 0;
    std::vector<double> inside = th;
    for (std::size_t i = 0; i < dim; ++i) {
      if (th[i] < lo[i]) pen += lo[i] - th[i];
      if (th[i] > hi[i]) pen += th[i] - hi[i];
      inside[i] = std::clamp(th[i], lo[i], hi[i]);
    }
    double base = f(inside);
    return pen > 0 ? base + (1.0 + base) * (1.0 + pen) * 1e6 : base;
  };

  auto solve_from = [&](double frac) {
    std::vector<std::vector<double>> simplex(dim + 1,
                                             std::vector<double>(dim));
    for (std::size_t i = 0; i < dim; ++i)
      simplex[0][i] = lo[i] + frac * (hi[i] - lo[i]);
    for (std::size_t v = 1; v <= dim; ++v) {
      simplex[v] = simplex[0];
      double step = 0.25 * (hi[v - 1] - lo[v - 1]);
      simplex[v][v - 1] +=
          simplex[v][v - 1] + step <= hi[v - 1] ? step : -step;
    }
    std::vector<double> fv(dim + 1);
    for (std::size_t v = 0; v <= dim; ++v) fv[v] = f_pen(simplex[v]);

    for (int it = 0; it < 3000; ++it) {
      std::vector<std::size_t> idx(dim + 1);
      for (std::size_t v = 0; v <= dim; ++v) idx[v] = v;
      std::sort(idx.begin(), idx.end(),
                [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
      if (fv[idx[dim]] - fv[idx[0]] < 1e-15 * (1 + std::abs(fv[idx[0]])))
        break;
      std::vector<double> centroid(dim, 0.0);
      for (std::size_t v = 0; v < dim; ++v)
        for (std::size_t i = 0; i < dim; ++i)
          centroid[i] += simplex[idx[v]][i] / dim;
      auto at_coef = [&](double coef) {
        std::vector<double> pnt(dim);
        for (std::size_t i = 0; i < dim; ++i)
          pnt[i] = centroid[i] + coef * (centroid[i] - simplex[idx[dim]][i]);
        return pnt;
      };
      auto refl = at_coef(1.0);
      double fr = f_pen(refl);
      if (fr < fv[idx[0]]) {
        auto expd = at_coef(2.0);
        double fe = f_pen(expd);
        if (fe < fr) {
          simplex[idx[dim]] = expd;
          fv[idx[dim]] = fe;
        } else {
          simplex[idx[dim]] = refl;
          fv[idx[dim]] = fr;
        }
      } else if (fr < fv[idx[dim - 1]]) {
        simplex[idx[dim]] = refl;
        fv[idx[dim]] = fr;
      } else {
        auto con = at_coef(-0.5);
        double fcon = f_pen(con);
        if (fcon < fv[idx[dim]]) {
          simplex[idx[dim]] = con;
          fv[idx[dim]] = fcon;
        } else {
          for (std::size_t v = 1; v <= dim; ++v) {
            for (std::size_t i = 0; i < dim; ++i)
              simplex[idx[v]][i] =
                  0.5 * (simplex[idx[v]][i] + simplex[idx[0]][i]);
            fv[idx[v]] = f_pen(simplex[idx[v]]);
          }
        }
      }
    }
    std::size_t best = 0;
    for (std::size_t v = 1; v <= dim; ++v)
      if (fv[v] < fv[best]) best = v;
    return std::pair{simplex[best], fv[best]};
  };

  auto [theta, value] = solve_from(0.5);
  for (double frac : {0.25, 0.75}) {
    auto [t2, v2] = solve_from(frac);
    if (v2 < value) {
      theta = t2;
      value = v2;
    }
  }
  for (std::size_t i = 0; i < dim; ++i)
    theta[i] = std::clamp(theta[i], lo[i], hi[i]);
  res.theta = theta;
  res.contrast = f(res.theta);
  return res;
}

}  // namespace fmpp

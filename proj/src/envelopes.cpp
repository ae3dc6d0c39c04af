#include "envelopes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fmpp {

NullModel NullModel::parse(const std::string& spec, int n_sim, uint64_t seed) {
  NullModel nm;
  nm.n_sim = n_sim;
  nm.seed = seed;
  if (nm.n_sim < 1)
    raise(FMPP_ERR_INVALID_ARGUMENT, "envelope needs n_sim >= 1");
  if (spec == "poisson") {
    nm.kind = Kind::PoissonRelocate;
  } else if (spec == "poisson:inhom") {
    nm.kind = Kind::PoissonRelocate;
    nm.inhomogeneous = true;
  } else if (spec == "relabel") {
    nm.kind = Kind::RandomLabel;
  } else {
    raise(FMPP_ERR_PARSE, "unknown null model: " + spec);
  }
  return nm;
}

std::string NullModel::to_string() const {
  if (kind == Kind::PoissonRelocate)
    return inhomogeneous ? "poisson:inhom" : "poisson";
  return "relabel";
}

EnvelopeTransform parse_transform(const std::string& name) {
  if (name == "identity" || name == "none") return EnvelopeTransform::Identity;
  if (name == "cbrt" || name == "cube-root") return EnvelopeTransform::CubeRoot;
  raise(FMPP_ERR_PARSE, "unknown transform: " + name);
}

Pattern apply_mark_permutation(const Pattern& p,
                               const std::vector<std::size_t>& perm) {
  if (perm.size() != p.size())
    raise(FMPP_ERR_INVALID_ARGUMENT, "permutation size mismatch");
  std::vector<FmPoint> pts = p.points();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    pts[i].aux = p.points()[perm[i]].aux;
    pts[i].curve = p.points()[perm[i]].curve;
  }
  return Pattern(p.window(), std::move(pts), p.grid());
}

namespace {

Vec2 draw_uniform_in_window(const Window& w, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ux(w.bbox_min().x, w.bbox_max().x);
  std::uniform_real_distribution<double> uy(w.bbox_min().y, w.bbox_max().y);
  for (;;) {
    Vec2 v{ux(rng), uy(rng)};
    if (w.contains(v)) return v;
  }
}

}  // namespace

Pattern simulate_null(const Pattern& p, const NullModel& nm,
                      const IntensityModel& m, int index) {
  std::mt19937_64 rng =
      substream(nm.seed, static_cast<uint64_t>(index));
  if (nm.kind == NullModel::Kind::RandomLabel) {
    std::vector<std::size_t> perm(p.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    // Fisher-Yates
    for (std::size_t i = perm.size(); i > 1; --i) {
      std::uniform_int_distribution<std::size_t> u(0, i - 1);
      std::swap(perm[i - 1], perm[u(rng)]);
    }
    return apply_mark_permutation(p, perm);
  }

  // poisson-relocate: fixed point count, marks reattached in list order
  const Window& w = p.window();
  double rho_max = 0;
  if (nm.inhomogeneous) {
    const int probe = 64;
    Vec2 lo = w.bbox_min(), hi = w.bbox_max();
    for (int i = 0; i <= probe; ++i)
      for (int j = 0; j <= probe; ++j) {
        Vec2 v{lo.x + (hi.x - lo.x) * i / probe,
               lo.y + (hi.y - lo.y) * j / probe};
        if (w.contains(v)) rho_max = std::max(rho_max, m.ground(v));
      }
    rho_max *= 1.05;  // headroom over the lattice probe
  }
  std::vector<FmPoint> pts = p.points();
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (;;) {
    for (FmPoint& pt : pts) {
      for (;;) {
        Vec2 v = draw_uniform_in_window(w, rng);
        if (nm.inhomogeneous && u01(rng) * rho_max > m.ground(v)) continue;
        pt.loc = v;
        break;
      }
    }
    // coincidences have probability zero; redraw if one happens anyway
    bool ok = true;
    for (std::size_t i = 0; i < pts.size() && ok; ++i)
      for (std::size_t j = i + 1; j < pts.size() && ok; ++j)
        ok = !(pts[i].loc.x == pts[j].loc.x && pts[i].loc.y == pts[j].loc.y);
    if (ok) break;
  }
  return Pattern(w, std::move(pts), p.grid());
}

EnvelopeResult envelope(const Pattern& p, const KQuery& q,
                        const std::string& intensity_spec, const NullModel& nm,
                        EnvelopeTransform transform, int n_threads) {
  auto run = [&](const Pattern& pat) {
    IntensityModel m = IntensityModel::fit(pat, intensity_spec);
    return estimate_k(pat, q, m, 1);
  };

  KEstimate data = run(p);
  const std::size_t R = data.r.size();
  IntensityModel base = IntensityModel::fit(p, intensity_spec);
  std::vector<KEstimate> reps(nm.n_sim);
  // one replicate per block; substreams make the result order-independent
  parallel_blocks(static_cast<std::size_t>(nm.n_sim), n_threads,
                  [&](std::size_t b) {
                    Pattern null_p = simulate_null(
                        p, nm, base, static_cast<int>(b) + 1);
                    reps[b] = run(null_p);
                  });

  auto tr = [&](double v) {
    return transform == EnvelopeTransform::CubeRoot ? std::cbrt(v) : v;
  };

  EnvelopeResult res;
  res.transform = transform;
  res.r = data.r;
  res.stat.assign(R, std::numeric_limits<double>::quiet_NaN());
  res.lo = res.hi = res.mean = res.stat;
  res.available.assign(R, 1);
  for (std::size_t k = 0; k < R; ++k) {
    bool ok = data.available[k] != 0;
    for (const KEstimate& rep : reps) ok = ok && rep.available[k] != 0;
    if (!ok) {
      res.available[k] = 0;
      continue;
    }
    res.stat[k] = tr(data.value[k]);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo, mean = 0;
    for (const KEstimate& rep : reps) {
      double v = tr(rep.value[k]);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      mean += v;
    }
    res.lo[k] = lo;
    res.hi[k] = hi;
    res.mean[k] = mean / nm.n_sim;
  }
  return res;
}

}  // namespace fmpp

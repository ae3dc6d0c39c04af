#include "fmpp/fmpp.h"

#include <cstdio>
#include <cstring>
#include <memory>
#include <sstream>

#include "csvio.hpp"
#include "envelopes.hpp"
#include "selfcheck.hpp"
#include "simulate.hpp"
#include "summaries.hpp"

namespace {

thread_local std::string g_last_error;

fmpp_status set_error(fmpp_status code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

/// Runs fn, translating exceptions into status codes.
template <typename Fn>
fmpp_status guarded(Fn&& fn) {
  try {
    fn();
    return FMPP_OK;
  } catch (const fmpp::Error& e) {
    return set_error(e.code(), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(FMPP_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(FMPP_ERR_INTERNAL, e.what());
  }
}

fmpp_status require(bool ok, const char* what) {
  return ok ? FMPP_OK : set_error(FMPP_ERR_INVALID_ARGUMENT, what);
}

}  // namespace

struct fmpp_window {
  fmpp::Window w;
};
struct fmpp_pattern {
  fmpp::Pattern p;
};
struct fmpp_intensity {
  fmpp::IntensityModel m;
};
struct fmpp_query {
  fmpp::KQuery q;
};
struct fmpp_kresult {
  fmpp::KEstimate e;
};
struct fmpp_envelope {
  fmpp::EnvelopeResult e;
};

extern "C" {

const char* fmpp_status_name(fmpp_status s) {
  switch (s) {
    case FMPP_OK: return "ok";
    case FMPP_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case FMPP_ERR_IO: return "io";
    case FMPP_ERR_PARSE: return "parse";
    case FMPP_ERR_MISSING_CURVE: return "missing-curve";
    case FMPP_ERR_GRID_MISMATCH: return "grid-mismatch";
    case FMPP_ERR_DUPLICATE_ID: return "duplicate-id";
    case FMPP_ERR_POINT_OUTSIDE_WINDOW: return "point-outside-window";
    case FMPP_ERR_COINCIDENT_POINTS: return "coincident-points";
    case FMPP_ERR_EMPTY_EROSION: return "empty-erosion";
    case FMPP_ERR_ZERO_ARC: return "zero-arc";
    case FMPP_ERR_UNSUPPORTED: return "unsupported";
    case FMPP_ERR_ARITY_MISMATCH: return "arity-mismatch";
    case FMPP_ERR_NONPOSITIVE_KL_INPUT: return "nonpositive-kl-input";
    case FMPP_ERR_MISSING_AUX_SCALAR: return "missing-aux-scalar";
    case FMPP_ERR_TOO_FEW_POINTS: return "too-few-points";
    case FMPP_ERR_OUTSIDE_WINDOW: return "outside-window";
    case FMPP_ERR_EMPTY_PATTERN: return "empty-pattern";
    case FMPP_ERR_EMPTY_CONDITIONING_SET: return "empty-conditioning-set";
    case FMPP_ERR_NON_FINITE_CONTRAST: return "non-finite-contrast";
    case FMPP_ERR_RATE_OVERFLOW: return "rate-overflow";
    case FMPP_ERR_CHOLESKY_FAILURE: return "cholesky-failure";
    case FMPP_ERR_PROBLEM_TOO_LARGE: return "problem-too-large";
    case FMPP_ERR_NONPOSITIVE_DT: return "nonpositive-dt";
    case FMPP_ERR_EMPTY_SERIES: return "empty-series";
    case FMPP_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* fmpp_last_error_message(void) { return g_last_error.c_str(); }

const char* fmpp_version(void) { return "0.1.0"; }

/* ---------------- windows ---------------- */

fmpp_status fmpp_window_rect(double xmin, double xmax, double ymin,
                             double ymax, fmpp_window** out) {
  if (auto s = require(out, "null output pointer")) return s;
  return guarded([&] {
    *out = new fmpp_window{fmpp::Window::rect(xmin, xmax, ymin, ymax)};
  });
}

fmpp_status fmpp_window_polygon(const double* xy, size_t n_vertices,
                                fmpp_window** out) {
  if (auto s = require(out && xy, "null pointer")) return s;
  return guarded([&] {
    std::vector<fmpp::Vec2> v(n_vertices);
    for (size_t i = 0; i < n_vertices; ++i) v[i] = {xy[2 * i], xy[2 * i + 1]};
    *out = new fmpp_window{fmpp::Window::polygon(std::move(v))};
  });
}

fmpp_status fmpp_window_parse(const char* spec, fmpp_window** out) {
  if (auto s = require(out && spec, "null pointer")) return s;
  return guarded([&] { *out = new fmpp_window{fmpp::Window::parse(spec)}; });
}

fmpp_status fmpp_window_area(const fmpp_window* w, double* out) {
  if (auto s = require(w && out, "null pointer")) return s;
  return guarded([&] { *out = w->w.area(); });
}

fmpp_status fmpp_window_bbox(const fmpp_window* w, double* xmin, double* xmax,
                             double* ymin, double* ymax) {
  if (auto s = require(w && xmin && xmax && ymin && ymax, "null pointer"))
    return s;
  *xmin = w->w.bbox_min().x;
  *xmax = w->w.bbox_max().x;
  *ymin = w->w.bbox_min().y;
  *ymax = w->w.bbox_max().y;
  return FMPP_OK;
}

void fmpp_window_destroy(fmpp_window* w) { delete w; }

/* ---------------- patterns ---------------- */

fmpp_status fmpp_pattern_load_csv(const char* points_path,
                                  const char* curves_path,
                                  const fmpp_window* w, fmpp_pattern** out) {
  if (auto s = require(points_path && curves_path && w && out, "null pointer"))
    return s;
  return guarded([&] {
    *out = new fmpp_pattern{fmpp::load_pattern(points_path, curves_path, w->w)};
  });
}

fmpp_status fmpp_pattern_from_arrays(const fmpp_window* w, const double* x,
                                     const double* y, size_t n_points,
                                     const int* labels, const double* scalars,
                                     const double* time_grid, size_t grid_len,
                                     const double* curve_values,
                                     fmpp_pattern** out) {
  if (auto s = require(w && x && y && time_grid && curve_values && out,
                       "null pointer"))
    return s;
  return guarded([&] {
    auto grid = fmpp::make_grid(
        std::vector<double>(time_grid, time_grid + grid_len));
    std::vector<fmpp::FmPoint> pts(n_points);
    int width = 1;
    for (size_t v = n_points; v >= 10; v /= 10) ++width;
    for (size_t i = 0; i < n_points; ++i) {
      std::ostringstream id;
      id << 'p';
      id.width(width);
      id.fill('0');
      id << i;
      pts[i].id = id.str();
      pts[i].loc = {x[i], y[i]};
      if (labels) pts[i].aux.label = labels[i];
      if (scalars) pts[i].aux.scalar = scalars[i];
      pts[i].curve = fmpp::make_curve(
          grid, std::vector<double>(curve_values + i * grid_len,
                                    curve_values + (i + 1) * grid_len));
    }
    *out = new fmpp_pattern{fmpp::Pattern(w->w, std::move(pts), grid)};
  });
}

fmpp_status fmpp_pattern_load_points_csv(const char* points_path,
                                         const fmpp_window* w,
                                         const double* time_grid,
                                         size_t grid_len, fmpp_pattern** out) {
  if (auto s = require(points_path && w && time_grid && out, "null pointer"))
    return s;
  return guarded([&] {
    auto grid = fmpp::make_grid(
        std::vector<double>(time_grid, time_grid + grid_len));
    *out = new fmpp_pattern{fmpp::load_points_pattern(points_path, w->w, grid)};
  });
}

fmpp_status fmpp_pattern_save_csv(const fmpp_pattern* p,
                                  const char* points_path,
                                  const char* curves_path) {
  if (auto s = require(p && points_path && curves_path, "null pointer"))
    return s;
  return guarded([&] { fmpp::save_pattern(p->p, points_path, curves_path); });
}

size_t fmpp_pattern_size(const fmpp_pattern* p) { return p ? p->p.size() : 0; }

size_t fmpp_pattern_grid_len(const fmpp_pattern* p) {
  return p ? p->p.grid()->size() : 0;
}

fmpp_status fmpp_pattern_grid(const fmpp_pattern* p, double* out, size_t cap) {
  if (auto s = require(p && out, "null pointer")) return s;
  if (auto s = require(cap >= p->p.grid()->size(), "buffer too small"))
    return s;
  std::memcpy(out, p->p.grid()->data(), p->p.grid()->size() * sizeof(double));
  return FMPP_OK;
}

fmpp_status fmpp_pattern_restrict(const fmpp_pattern* p, const char* mark_set,
                                  fmpp_pattern** out) {
  if (auto s = require(p && mark_set && out, "null pointer")) return s;
  return guarded([&] {
    *out = new fmpp_pattern{
        fmpp::restrict(p->p, fmpp::MarkSet::parse(mark_set))};
  });
}

void fmpp_pattern_destroy(fmpp_pattern* p) { delete p; }

/* ---------------- intensity ---------------- */

fmpp_status fmpp_intensity_fit(const fmpp_pattern* p, const char* spec,
                               fmpp_intensity** out) {
  if (auto s = require(p && spec && out, "null pointer")) return s;
  return guarded([&] {
    *out = new fmpp_intensity{fmpp::IntensityModel::fit(p->p, spec)};
  });
}

fmpp_status fmpp_intensity_eval(const fmpp_intensity* m, double x, double y,
                                int label, double* out) {
  if (auto s = require(m && out, "null pointer")) return s;
  return guarded([&] {
    fmpp::AuxMark aux;
    if (label >= 0) aux.label = label;
    *out = m->m.at({x, y}, aux);
  });
}

void fmpp_intensity_destroy(fmpp_intensity* m) { delete m; }

/* ---------------- queries ---------------- */

fmpp_status fmpp_query_new(int order, fmpp_query** out) {
  if (auto s = require(out, "null output pointer")) return s;
  return guarded([&] {
    if (order < 2 || order > 3)
      fmpp::raise(FMPP_ERR_INVALID_ARGUMENT, "order must be 2 or 3");
    *out = new fmpp_query{fmpp::KQuery::make(order)};
  });
}

void fmpp_query_destroy(fmpp_query* q) { delete q; }

fmpp_status fmpp_query_set_rgrid(fmpp_query* q, const double* r, size_t n) {
  if (auto s = require(q && r && n > 0, "null pointer or empty grid"))
    return s;
  q->q.r_grid.assign(r, r + n);
  return FMPP_OK;
}

fmpp_status fmpp_query_set_test_function(fmpp_query* q, const char* spec) {
  if (auto s = require(q && spec, "null pointer")) return s;
  return guarded([&] { q->q.test_fn = fmpp::TestFunction::parse(spec); });
}

fmpp_status fmpp_query_set_mark_set(fmpp_query* q, int slot,
                                    const char* spec) {
  if (auto s = require(q && spec, "null pointer")) return s;
  return guarded([&] {
    if (slot < 0 || slot >= q->q.order)
      fmpp::raise(FMPP_ERR_INVALID_ARGUMENT, "mark-set slot out of range");
    fmpp::MarkSet ms = fmpp::MarkSet::parse(spec);
    if (slot == 0)
      q->q.cond_set = ms;
    else
      q->q.neighbor_sets[slot - 1] = ms;
  });
}

fmpp_status fmpp_query_set_elem(fmpp_query* q, int i, const char* spec) {
  if (auto s = require(q && spec, "null pointer")) return s;
  return guarded([&] {
    if (i < 0 || i >= q->q.order - 1)
      fmpp::raise(FMPP_ERR_INVALID_ARGUMENT, "element slot out of range");
    std::string sp(spec);
    auto two_numbers = [&](const std::string& body, double& a, double& b) {
      auto comma = body.find(',');
      if (comma == std::string::npos)
        fmpp::raise(FMPP_ERR_PARSE, "element spec needs two numbers: " + sp);
      try {
        a = std::stod(body.substr(0, comma));
        b = std::stod(body.substr(comma + 1));
      } catch (const std::exception&) {
        fmpp::raise(FMPP_ERR_PARSE, "bad element spec: " + sp);
      }
    };
    if (sp == "ball") {
      q->q.elems[i] = fmpp::StructElem::ball(1);
    } else if (sp.rfind("sector:", 0) == 0) {
      double phi, psi;
      two_numbers(sp.substr(7), phi, psi);
      q->q.elems[i] = fmpp::StructElem::sector(1, phi, psi);
    } else if (sp.rfind("box:", 0) == 0) {
      double ax, ay;
      two_numbers(sp.substr(4), ax, ay);
      q->q.elems[i] = fmpp::StructElem::box(ax, ay);
    } else {
      fmpp::raise(FMPP_ERR_PARSE, "unknown element spec: " + sp);
    }
  });
}

fmpp_status fmpp_query_set_correction(fmpp_query* q, const char* name) {
  if (auto s = require(q && name, "null pointer")) return s;
  return guarded([&] { q->q.correction = fmpp::parse_correction(name); });
}

fmpp_status fmpp_query_set_normalization(fmpp_query* q, const char* name) {
  if (auto s = require(q && name, "null pointer")) return s;
  return guarded([&] { q->q.norm = fmpp::parse_normalization(name); });
}

/* ---------------- estimation ---------------- */

fmpp_status fmpp_estimate_k(const fmpp_pattern* p, const fmpp_query* q,
                            const fmpp_intensity* m, int n_threads,
                            fmpp_kresult** out) {
  if (auto s = require(p && q && m && out, "null pointer")) return s;
  return guarded([&] {
    *out = new fmpp_kresult{fmpp::estimate_k(p->p, q->q, m->m, n_threads)};
  });
}

size_t fmpp_kresult_size(const fmpp_kresult* k) { return k ? k->e.r.size() : 0; }
double fmpp_kresult_r(const fmpp_kresult* k, size_t i) { return k->e.r[i]; }
double fmpp_kresult_value(const fmpp_kresult* k, size_t i) {
  return k->e.value[i];
}
int fmpp_kresult_available(const fmpp_kresult* k, size_t i) {
  return k->e.available[i];
}
long long fmpp_kresult_count(const fmpp_kresult* k, size_t i) {
  return k->e.count[i];
}
double fmpp_kresult_normalizer(const fmpp_kresult* k, size_t i) {
  return k->e.normalizer[i];
}
int fmpp_kresult_empty_conditioning(const fmpp_kresult* k) {
  return k->e.empty_conditioning;
}
long long fmpp_kresult_floored_tuples(const fmpp_kresult* k) {
  return k->e.floored_rho_tuples;
}

fmpp_status fmpp_kresult_write_csv(const fmpp_kresult* k, const char* path) {
  if (auto s = require(k && path, "null pointer")) return s;
  return guarded([&] {
    FILE* f = std::fopen(path, "w");
    if (!f) fmpp::raise(FMPP_ERR_IO, std::string("cannot write ") + path);
    std::fputs("r,k_hat,count,normalizer\n", f);
    for (size_t i = 0; i < k->e.r.size(); ++i) {
      if (k->e.available[i])
        std::fprintf(f, "%.17g,%.17g,%lld,%.17g\n", k->e.r[i], k->e.value[i],
                     k->e.count[i], k->e.normalizer[i]);
      else
        std::fprintf(f, "%.17g,,%lld,\n", k->e.r[i], k->e.count[i]);
    }
    std::fclose(f);
  });
}

void fmpp_kresult_destroy(fmpp_kresult* k) { delete k; }

fmpp_status fmpp_min_contrast(const fmpp_kresult* k, fmpp_model_fn model,
                              void* ctx, int dim, const double* lo,
                              const double* hi, double p_exp, double q_exp,
                              double r_min, double r_max, double* theta_out,
                              double* contrast_out) {
  if (auto s = require(k && model && lo && hi && theta_out && dim >= 1,
                       "null pointer or bad dim"))
    return s;
  return guarded([&] {
    auto wrapped = [&](double r, std::span<const double> theta) {
      return model(ctx, r, theta.data());
    };
    fmpp::MinContrastResult res = fmpp::minimum_contrast_fit(
        k->e, wrapped, {lo, static_cast<size_t>(dim)},
        {hi, static_cast<size_t>(dim)}, p_exp, q_exp, r_min, r_max);
    for (int i = 0; i < dim; ++i) theta_out[i] = res.theta[i];
    if (contrast_out) *contrast_out = res.contrast;
  });
}

/* ---------------- envelopes ---------------- */

fmpp_status fmpp_run_envelope(const fmpp_pattern* p, const fmpp_query* q,
                              const char* intensity_spec,
                              const char* null_model, int n_sim, uint64_t seed,
                              const char* transform, int n_threads,
                              fmpp_envelope** out) {
  if (auto s = require(p && q && intensity_spec && null_model && transform &&
                           out,
                       "null pointer"))
    return s;
  return guarded([&] {
    fmpp::NullModel nm = fmpp::NullModel::parse(null_model, n_sim, seed);
    fmpp::EnvelopeResult res =
        fmpp::envelope(p->p, q->q, intensity_spec, nm,
                       fmpp::parse_transform(transform), n_threads);
    *out = new fmpp_envelope{std::move(res)};
  });
}

size_t fmpp_envelope_size(const fmpp_envelope* e) {
  return e ? e->e.r.size() : 0;
}
double fmpp_envelope_r(const fmpp_envelope* e, size_t i) { return e->e.r[i]; }
double fmpp_envelope_stat(const fmpp_envelope* e, size_t i) {
  return e->e.stat[i];
}
double fmpp_envelope_lo(const fmpp_envelope* e, size_t i) { return e->e.lo[i]; }
double fmpp_envelope_hi(const fmpp_envelope* e, size_t i) { return e->e.hi[i]; }
double fmpp_envelope_mean(const fmpp_envelope* e, size_t i) {
  return e->e.mean[i];
}
int fmpp_envelope_available(const fmpp_envelope* e, size_t i) {
  return e->e.available[i];
}

fmpp_status fmpp_envelope_write_csv(const fmpp_envelope* e, const char* path) {
  if (auto s = require(e && path, "null pointer")) return s;
  return guarded([&] {
    FILE* f = std::fopen(path, "w");
    if (!f) fmpp::raise(FMPP_ERR_IO, std::string("cannot write ") + path);
    std::fputs("r,stat,lo,hi,mean\n", f);
    for (size_t i = 0; i < e->e.r.size(); ++i) {
      if (e->e.available[i])
        std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g\n", e->e.r[i],
                     e->e.stat[i], e->e.lo[i], e->e.hi[i], e->e.mean[i]);
      else
        std::fprintf(f, "%.17g,,,,\n", e->e.r[i]);
    }
    std::fclose(f);
  });
}

void fmpp_envelope_destroy(fmpp_envelope* e) { delete e; }

/* ---------------- simulation ---------------- */

fmpp_status fmpp_simulate(const fmpp_window* w, const char* ground,
                          const char* marks, double grid_start,
                          double grid_stop, double grid_step, uint64_t seed,
                          fmpp_pattern** out) {
  if (auto s = require(w && ground && marks && out, "null pointer")) return s;
  return guarded([&] {
    auto grid = fmpp::uniform_grid(grid_start, grid_stop, grid_step);
    *out = new fmpp_pattern{fmpp::simulate_pattern(
        fmpp::GroundModel::parse(ground), fmpp::MarkModel::parse(marks), w->w,
        grid, seed)};
  });
}

fmpp_status fmpp_lisa(const fmpp_pattern* p, const double* h_grid, size_t n_h,
                      fmpp_pattern** out) {
  if (auto s = require(p && h_grid && out, "null pointer")) return s;
  return guarded([&] {
    auto grid = fmpp::make_grid(std::vector<double>(h_grid, h_grid + n_h));
    *out = new fmpp_pattern{fmpp::lisa_pattern(p->p, grid)};
  });
}

fmpp_status fmpp_coverage_fraction(const fmpp_pattern* p, double t,
                                   int resolution, double* out) {
  if (auto s = require(p && out, "null pointer")) return s;
  return guarded([&] {
    std::vector<fmpp::Vec2> locs;
    std::vector<double> radii;
    for (const fmpp::FmPoint& pt : p->p.points()) {
      locs.push_back(pt.loc);
      radii.push_back(std::max(0.0, pt.curve.at_time(t)));
    }
    *out = fmpp::coverage_fraction(locs, radii, p->p.window(), resolution);
  });
}

/* ---------------- self test ---------------- */

fmpp_status fmpp_selftest(int replicates, uint64_t seed, char* buf, size_t cap,
                          int* n_failed) {
  return guarded([&] {
    auto lines = fmpp::run_selfcheck(replicates, seed);
    std::ostringstream os;
    int failed = 0;
    for (const auto& line : lines) {
      os << (line.passed ? "PASS " : "FAIL ") << line.name << ": "
         << line.detail << "\n";
      if (!line.passed) ++failed;
    }
    if (n_failed) *n_failed = failed;
    if (buf && cap > 0) {
      std::string text = os.str();
      size_t len = std::min(cap - 1, text.size());
      std::memcpy(buf, text.data(), len);
      buf[len] = '\0';
    }
  });
}

} /* extern "C" */

#include "pattern.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_set>

namespace fmpp {

double Curve::sup_abs() const {
  double s = 0;
  for (double v : values) s = std::max(s, std::abs(v));
  return s;
}

double Curve::integral() const {
  double s = 0;
  for (double v : values) s += v;
  return s * span() / static_cast<double>(values.size());
}

double Curve::at_time(double t) const {
  const TimeGrid& g = *grid;
  auto it = std::lower_bound(g.begin(), g.end(), t);
  if (it == g.end()) return values.back();
  if (it == g.begin()) return values.front();
  std::size_t hi = static_cast<std::size_t>(it - g.begin());
  return (t - g[hi - 1] <= g[hi] - t) ? values[hi - 1] : values[hi];
}

std::shared_ptr<const TimeGrid> make_grid(std::vector<double> times) {
  if (times.size() < 2)
    raise(FMPP_ERR_INVALID_ARGUMENT, "time grid needs at least 2 points");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      raise(FMPP_ERR_INVALID_ARGUMENT, "time grid must be strictly increasing");
  return std::make_shared<const TimeGrid>(std::move(times));
}

std::shared_ptr<const TimeGrid> uniform_grid(double start, double stop,
                                             double step) {
  if (!(step > 0) || !(stop > start))
    raise(FMPP_ERR_INVALID_ARGUMENT, "bad uniform grid");
  std::vector<double> t;
  for (int i = 0;; ++i) {
    double v = start + i * step;
    if (v > stop + 1e-9 * step) break;
    t.push_back(v);
  }
  return make_grid(std::move(t));
}

Curve make_curve(std::shared_ptr<const TimeGrid> grid,
                 std::vector<double> values) {
  if (!grid || values.size() != grid->size())
    raise(FMPP_ERR_GRID_MISMATCH, "curve length does not match the grid");
  for (double v : values)
    if (!std::isfinite(v))
      raise(FMPP_ERR_INVALID_ARGUMENT, "curve values must be finite");
  return Curve{std::move(grid), std::move(values)};
}

Pattern::Pattern(Window window, std::vector<FmPoint> points,
                 std::shared_ptr<const TimeGrid> grid)
    : window_(std::move(window)),
      points_(std::move(points)),
      grid_(std::move(grid)) {
  if (!grid_) raise(FMPP_ERR_INVALID_ARGUMENT, "pattern needs a time grid");
  std::sort(points_.begin(), points_.end(),
            [](const FmPoint& a, const FmPoint& b) { return a.id < b.id; });
  std::unordered_set<std::string> ids;
  for (const FmPoint& p : points_) {
    if (!ids.insert(p.id).second)
      raise(FMPP_ERR_DUPLICATE_ID, "duplicate point id: " + p.id);
    if (!window_.contains(p.loc))
      raise(FMPP_ERR_POINT_OUTSIDE_WINDOW,
            "point " + p.id + " lies outside the window");
    if (p.curve.grid != grid_)
      raise(FMPP_ERR_GRID_MISMATCH, "curve of " + p.id + " on a foreign grid");
  }
  for (std::size_t i = 0; i < points_.size(); ++i)
    for (std::size_t j = i + 1; j < points_.size(); ++j)
      if (points_[i].loc.x == points_[j].loc.x &&
          points_[i].loc.y == points_[j].loc.y)
        raise(FMPP_ERR_COINCIDENT_POINTS,
              "points " + points_[i].id + " and " + points_[j].id +
                  " share a location");
}

const DistanceTable& Pattern::distances() const {
  DistCache& cache = *dist_cache_;
  std::call_once(cache.once, [&] {
    std::size_t n = points_.size();
    cache.table.n = n;
    cache.table.dist.assign(n * n, 0.0);
    cache.table.disp.assign(n * n, Vec2{});
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        Vec2 d = points_[j].loc - points_[i].loc;
        cache.table.disp[i * n + j] = d;
        cache.table.dist[i * n + j] = norm(d);
      }
  });
  return cache.table;
}

MarkSet MarkSet::label_in(std::vector<int> labels) {
  MarkSet ms;
  ms.aux = Aux::LabelIn;
  ms.labels = std::move(labels);
  std::sort(ms.labels.begin(), ms.labels.end());
  return ms;
}

MarkSet MarkSet::scalar_in(double lo, double hi) {
  MarkSet ms;
  ms.aux = Aux::ScalarIn;
  ms.lo = lo;
  ms.hi = hi;
  return ms;
}

MarkSet MarkSet::sup_threshold(double c, bool above) {
  MarkSet ms;
  ms.fun = Fun::SupThreshold;
  ms.threshold = c;
  ms.above = above;
  return ms;
}

MarkSet MarkSet::integral_threshold(double c, bool above) {
  MarkSet ms;
  ms.fun = Fun::IntegralThreshold;
  ms.threshold = c;
  ms.above = above;
  return ms;
}

namespace {

void apply_clause(MarkSet& ms, const std::string& clause) {
  auto num = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      raise(FMPP_ERR_PARSE, "bad number in mark set: " + s);
    }
  };
  if (clause == "all") return;
  if (clause.rfind("label-in:", 0) == 0) {
    ms.aux = MarkSet::Aux::LabelIn;
    ms.labels.clear();
    std::istringstream in(clause.substr(9));
    std::string tok;
    while (std::getline(in, tok, ','))
      if (!tok.empty()) ms.labels.push_back(static_cast<int>(num(tok)));
    std::sort(ms.labels.begin(), ms.labels.end());
    return;
  }
  if (clause.rfind("scalar-in:", 0) == 0) {
    std::string body = clause.substr(10);
    auto comma = body.find(',');
    if (comma == std::string::npos)
      raise(FMPP_ERR_PARSE, "scalar-in needs lo,hi");
    ms.aux = MarkSet::Aux::ScalarIn;
    ms.lo = num(body.substr(0, comma));
    ms.hi = num(body.substr(comma + 1));
    return;
  }
  for (auto [prefix, fun, above] :
       {std::tuple{"sup-above:", MarkSet::Fun::SupThreshold, true},
        std::tuple{"sup-below:", MarkSet::Fun::SupThreshold, false},
        std::tuple{"int-above:", MarkSet::Fun::IntegralThreshold, true},
        std::tuple{"int-below:", MarkSet::Fun::IntegralThreshold, false}}) {
    std::string p(prefix);
    if (clause.rfind(p, 0) == 0) {
      ms.fun = fun;
      ms.above = above;
      ms.threshold = num(clause.substr(p.size()));
      return;
    }
  }
  raise(FMPP_ERR_PARSE, "unknown mark-set clause: " + clause);
}

}  // namespace

MarkSet MarkSet::parse(const std::string& spec) {
  MarkSet ms;
  std::istringstream in(spec);
  std::string clause;
  while (std::getline(in, clause, '&')) apply_clause(ms, clause);
  return ms;
}

std::string MarkSet::to_string() const {
  std::ostringstream out;
  switch (aux) {
    case Aux::All:
      out << "all";
      break;
    case Aux::LabelIn: {
      out << "label-in:";
      for (std::size_t i = 0; i < labels.size(); ++i)
        out << (i ? "," : "") << labels[i];
      break;
    }
    case Aux::ScalarIn:
      out << "scalar-in:" << lo << "," << hi;
      break;
  }
  switch (fun) {
    case Fun::All:
      break;
    case Fun::SupThreshold:
      out << "&sup-" << (above ? "above" : "below") << ":" << threshold;
      break;
    case Fun::IntegralThreshold:
      out << "&int-" << (above ? "above" : "below") << ":" << threshold;
      break;
  }
  return out.str();
}

bool mark_in(const MarkSet& ms, const FmPoint& p) {
  switch (ms.aux) {
    case MarkSet::Aux::All:
      break;
    case MarkSet::Aux::LabelIn: {
      if (!p.aux.label) return false;
      if (!std::binary_search(ms.labels.begin(), ms.labels.end(),
                              *p.aux.label))
        return false;
      break;
    }
    case MarkSet::Aux::ScalarIn:
      if (!p.aux.scalar || *p.aux.scalar < ms.lo || *p.aux.scalar > ms.hi)
        return false;
      break;
  }
  switch (ms.fun) {
    case MarkSet::Fun::All:
      return true;
    case MarkSet::Fun::SupThreshold: {
      double s = p.curve.sup_abs();
      return ms.above ? s > ms.threshold : s <= ms.threshold;
    }
    case MarkSet::Fun::IntegralThreshold: {
      double s = p.curve.integral();
      return ms.above ? s > ms.threshold : s <= ms.threshold;
    }
  }
  return true;
}

Pattern restrict(const Pattern& p, const MarkSet& ms) {
  std::vector<FmPoint> kept;
  for (const FmPoint& pt : p.points())
    if (mark_in(ms, pt)) kept.push_back(pt);
  return Pattern(p.window(), std::move(kept), p.grid());
}

Curve empirical_mean_curve(const Pattern& p) {
  if (p.size() == 0)
    raise(FMPP_ERR_EMPTY_PATTERN, "mean curve of an empty pattern");
  std::vector<double> mean(p.grid()->size(), 0.0);
  for (const FmPoint& pt : p.points())
    for (std::size_t j = 0; j < mean.size(); ++j)
      mean[j] += pt.curve.values[j];
  for (double& v : mean) v /= static_cast<double>(p.size());
  return make_curve(p.grid(), std::move(mean));
}

}  // namespace fmpp

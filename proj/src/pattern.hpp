#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "geometry.hpp"

namespace fmpp {

using TimeGrid = std::vector<double>;

/// A functional mark sampled on a shared, strictly increasing time grid.
struct Curve {
  std::shared_ptr<const TimeGrid> grid;
  std::vector<double> values;

  double span() const { return grid->back() - grid->front(); }
  std::size_t size() const { return values.size(); }
  double sup_abs() const;
  /// Left-Riemann integral with uniform weight span/m over all m samples.
  double integral() const;
  /// Value at the grid time nearest to t.
  double at_time(double t) const;
};

Curve make_curve(std::shared_ptr<const TimeGrid> grid,
                 std::vector<double> values);
std::shared_ptr<const TimeGrid> make_grid(std::vector<double> times);
std::shared_ptr<const TimeGrid> uniform_grid(double start, double stop,
                                             double step);

struct AuxMark {
  std::optional<int> label;
  std::optional<double> scalar;
};

struct FmPoint {
  std::string id;
  Vec2 loc;
  AuxMark aux;
  Curve curve;
};

struct DistanceTable {
  std::size_t n = 0;
  std::vector<double> dist;  // n*n, row-major; dist[i*n+j] = |x_j - x_i|
  std::vector<Vec2> disp;    // disp[i*n+j] = x_j - x_i

  double d(std::size_t i, std::size_t j) const { return dist[i * n + j]; }
  Vec2 v(std::size_t i, std::size_t j) const { return disp[i * n + j]; }
};

/// Immutable marked point pattern in a window. Points are kept sorted by id
/// so sums over the pattern have a fixed, reproducible order.
class Pattern {
 public:
  Pattern(Window window, std::vector<FmPoint> points,
          std::shared_ptr<const TimeGrid> grid);

  const Window& window() const { return window_; }
  const std::vector<FmPoint>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  const std::shared_ptr<const TimeGrid>& grid() const { return grid_; }

  /// Pairwise Euclidean distances and displacement vectors, built once.
  const DistanceTable& distances() const;

 private:
  // distance cache on the heap so patterns stay copyable; copies share it
  // (points are immutable after construction)
  struct DistCache {
    std::once_flag once;
    DistanceTable table;
  };

  Window window_;
  std::vector<FmPoint> points_;
  std::shared_ptr<const TimeGrid> grid_;
  std::shared_ptr<DistCache> dist_cache_ = std::make_shared<DistCache>();
};

/// Testable mark predicate pair: an auxiliary-mark set D and a functional
/// set E. A point belongs to the mark set when both predicates hold.
struct MarkSet {
  enum class Aux { All, LabelIn, ScalarIn };
  enum class Fun { All, SupThreshold, IntegralThreshold };

  Aux aux = Aux::All;
  std::vector<int> labels;          // LabelIn
  double lo = 0, hi = 0;            // ScalarIn
  Fun fun = Fun::All;
  double threshold = 0;
  bool above = true;                // threshold direction

  static MarkSet all() { return {}; }
  static MarkSet label_in(std::vector<int> labels);
  static MarkSet scalar_in(double lo, double hi);
  static MarkSet sup_threshold(double c, bool above);
  static MarkSet integral_threshold(double c, bool above);
  /// Conjunction of the aux predicate of one set and fun of the other is not
  /// needed; specs combine with '&', e.g. "label-in:1&sup-above:2".
  static MarkSet parse(const std::string& spec);
  std::string to_string() const;
};

bool mark_in(const MarkSet& ms, const FmPoint& p);
Pattern restrict(const Pattern& p, const MarkSet& ms);

/// Pointwise average curve over the pattern; throws on an empty pattern.
Curve empirical_mean_curve(const Pattern& p);

}  // namespace fmpp

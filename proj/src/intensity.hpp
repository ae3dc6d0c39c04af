#pragma once

#include <map>
#include <string>
#include <vector>

#include "pattern.hpp"

namespace fmpp {

/// Fitted intensity model for the ground process, with an optional
/// auxiliary-label factor Q(l): rho(x, l) = Q_x(l) * rho_G(x). Evaluation is
/// floored at eps = 1e-12 * n / |W|.
class IntensityModel {
 public:
  enum class Kind { Homogeneous, Kernel, Grid };

  /// rho_G = n / |W|.
  static IntensityModel homogeneous(const Pattern& p);
  /// Known constant rate, independent of any pattern. Used to inject a true
  /// intensity into raw estimates (oracle checks).
  static IntensityModel constant(const Window& w, double rho);
  /// Gaussian kernel with per-axis bandwidths and local edge normalization
  /// c_W(x_i) = integral of the kernel about x_i over W. bandwidth <= 0
  /// selects Scott's rule per axis. per_label_kernels adds spatially varying
  /// label factors Q_x(l); otherwise label frequencies are global.
  static IntensityModel kernel(const Pattern& p, double bandwidth = 0,
                               bool per_label_kernels = false);
  /// User-supplied `x,y,rho` CSV on a regular lattice, bilinear interpolation.
  static IntensityModel from_grid_csv(const Pattern& p,
                                      const std::string& path);
  /// "homog" | "kernel" | "kernel:<h>" | "grid:<path>", "+labels" suffix.
  static IntensityModel fit(const Pattern& p, const std::string& spec);

  Kind kind() const { return kind_; }
  const Window& window() const { return window_; }
  std::string spec() const { return spec_; }

  /// Ground intensity rho_G(x); throws `outside-window` off W. Kernel
  /// models evaluate leave-one-out at their own fit points: when x matches
  /// a fitted center exactly, that center's kernel mass is excluded. This
  /// keeps plug-in K estimates close to unbiased; evaluation anywhere else
  /// is the plain kernel sum.
  double ground(Vec2 x) const;
  /// rho(x, l) = rho_G(x) * Q_x(l); without a label, rho_G(x).
  double at(Vec2 x, const AuxMark& aux) const;
  /// Label probability Q_x(l); 1 when no label schema was declared.
  double label_factor(Vec2 x, int label) const;

  double floor_value() const { return floor_; }

 private:
  IntensityModel() : window_(Window::rect(0, 1, 0, 1)) {}

  double ground_unfloored(Vec2 x) const;

  Kind kind_ = Kind::Homogeneous;
  Window window_;
  std::string spec_ = "homog";
  double floor_ = 0;
  double rho_const_ = 0;  // Homogeneous

  // Kernel
  std::vector<Vec2> centers_;
  std::vector<double> edge_norm_;  // c_W at each center
  std::vector<int> labels_;        // -1 where absent
  std::map<std::pair<double, double>, std::size_t> center_index_;
  double hx_ = 0, hy_ = 0;
  std::map<int, double> label_freq_;
  bool per_label_ = false;

  // Grid
  std::vector<double> gx_, gy_;
  std::vector<double> gval_;  // gy_.size() rows x gx_.size() cols
};

}  // namespace fmpp

#pragma once

#include <span>
#include <string>
#include <vector>

#include "pattern.hpp"

namespace fmpp {

struct MarkRef {
  const AuxMark* aux = nullptr;
  const Curve* curve = nullptr;
};

/// Test function t over n-tuples of marks. Binary kinds take exactly two
/// marks; One and the combinators admit any arity their parts accept.
/// Integrals discretize with the left-Riemann rule, uniform weight
/// (b-a)/m over the m grid samples.
struct TestFunction {
  enum class Kind {
    One,
    Lp,          // ((b-a)/m sum |f1-f2|^p)^(1/p)
    Sup,         // max_j |f1-f2|
    Kl,          // symmetrised Kullback-Leibler, positive curves only
    Inner,       // (b-a)/m sum f1 f2
    DerivL2,     // Lp(2) of order-k forward-difference curves
    Variogram,   // (b-a)/m sum (f1-mean)(f2-mean); signed
    AuxProduct,  // l1*l2 (aux scalars)
    AuxVariogram,// (l1-l2)^2/2
    SumOf,
    MaxOf
  };

  Kind kind = Kind::One;
  double p = 2;                     // Lp
  int order = 1;                    // DerivL2
  Curve mean;                       // Variogram; bound before evaluation
  std::vector<TestFunction> parts;  // combinators

  static TestFunction one() { return {}; }
  static TestFunction lp(double p);
  static TestFunction sup();
  static TestFunction kl();
  static TestFunction inner();
  static TestFunction deriv_l2(int order);
  static TestFunction variogram(Curve mean);
  static TestFunction variogram_unbound();
  static TestFunction aux_product();
  static TestFunction aux_variogram();
  static TestFunction sum_of(std::vector<TestFunction> parts);
  static TestFunction max_of(std::vector<TestFunction> parts);

  /// CLI grammar: atoms one|lp:p|sup|kl|inner|deriv:k|vario|aux-prod|
  /// aux-vario, '+'-joined sums, max(a,b,...) combinator.
  static TestFunction parse(const std::string& spec);
  std::string to_string() const;

  bool needs_mean_curve() const;
  /// Fills every unbound variogram mean with the given curve.
  void bind_mean_curve(const Curve& mean);
};

double eval(const TestFunction& tf, std::span<const MarkRef> marks);

}  // namespace fmpp

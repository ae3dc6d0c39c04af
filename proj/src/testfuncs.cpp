#include "testfuncs.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fmpp {

TestFunction TestFunction::lp(double p) {
  if (!(p >= 1))
    raise(FMPP_ERR_INVALID_ARGUMENT, "lp test function needs p >= 1");
  TestFunction t;
  t.kind = Kind::Lp;
  t.p = p;
  return t;
}

TestFunction TestFunction::sup() {
  TestFunction t;
  t.kind = Kind::Sup;
  return t;
}

TestFunction TestFunction::kl() {
  TestFunction t;
  t.kind = Kind::Kl;
  return t;
}

TestFunction TestFunction::inner() {
  TestFunction t;
  t.kind = Kind::Inner;
  return t;
}

TestFunction TestFunction::deriv_l2(int order) {
  if (order < 1)
    raise(FMPP_ERR_INVALID_ARGUMENT, "deriv-l2 needs order >= 1");
  TestFunction t;
  t.kind = Kind::DerivL2;
  t.order = order;
  return t;
}

TestFunction TestFunction::variogram(Curve mean) {
  TestFunction t;
  t.kind = Kind::Variogram;
  t.mean = std::move(mean);
  return t;
}

TestFunction TestFunction::variogram_unbound() {
  TestFunction t;
  t.kind = Kind::Variogram;
  return t;
}

TestFunction TestFunction::aux_product() {
  TestFunction t;
  t.kind = Kind::AuxProduct;
  return t;
}

TestFunction TestFunction::aux_variogram() {
  TestFunction t;
  t.kind = Kind::AuxVariogram;
  return t;
}

TestFunction TestFunction::sum_of(std::vector<TestFunction> parts) {
  TestFunction t;
  t.kind = Kind::SumOf;
  t.parts = std::move(parts);
  return t;
}

TestFunction TestFunction::max_of(std::vector<TestFunction> parts) {
  TestFunction t;
  t.kind = Kind::MaxOf;
  t.parts = std::move(parts);
  return t;
}

bool TestFunction::needs_mean_curve() const {
  if (kind == Kind::Variogram && !mean.grid) return true;
  for (const TestFunction& part : parts)
    if (part.needs_mean_curve()) return true;
  return false;
}

void TestFunction::bind_mean_curve(const Curve& m) {
  if (kind == Kind::Variogram && !mean.grid) mean = m;
  for (TestFunction& part : parts) part.bind_mean_curve(m);
}

namespace {

void require_binary(std::span<const MarkRef> marks) {
  if (marks.size() != 2)
    raise(FMPP_ERR_ARITY_MISMATCH, "test function takes exactly 2 marks");
}

const Curve& curve_of(const MarkRef& m) {
  if (!m.curve || !m.curve->grid)
    raise(FMPP_ERR_INVALID_ARGUMENT, "mark has no functional component");
  return *m.curve;
}

double aux_scalar_of(const MarkRef& m) {
  if (!m.aux || !m.aux->scalar)
    raise(FMPP_ERR_MISSING_AUX_SCALAR,
          "test function needs an auxiliary scalar mark");
  return *m.aux->scalar;
}

/// Shared Riemann weight (b-a)/m of a curve pair.
double riemann_weight(const Curve& f) {
  return f.span() / static_cast<double>(f.size());
}

std::vector<double> forward_diff(std::span<const double> v,
                                 std::span<const double> t, int order) {
  std::vector<double> cur(v.begin(), v.end());
  for (int k = 0; k < order; ++k) {
    if (cur.size() < 2)
      raise(FMPP_ERR_INVALID_ARGUMENT,
            "curve too short for requested difference order");
    std::vector<double> next(cur.size() - 1);
    for (std::size_t j = 0; j + 1 < cur.size(); ++j)
      next[j] = (cur[j + 1] - cur[j]) / (t[j + 1 + k] - t[j + k]);
    cur = std::move(next);
  }
  return cur;
}

}  // namespace

double eval(const TestFunction& tf, std::span<const MarkRef> marks) {
  switch (tf.kind) {
    case TestFunction::Kind::One:
      return 1.0;
    case TestFunction::Kind::Lp: {
      require_binary(marks);
      const Curve& f1 = curve_of(marks[0]);
      const Curve& f2 = curve_of(marks[1]);
      double s = 0;
      for (std::size_t j = 0; j < f1.size(); ++j)
        s += std::pow(std::abs(f1.values[j] - f2.values[j]), tf.p);
      return std::pow(riemann_weight(f1) * s, 1.0 / tf.p);
    }
    case TestFunction::Kind::Sup: {
      require_binary(marks);
      const Curve& f1 = curve_of(marks[0]);
      const Curve& f2 = curve_of(marks[1]);
      double s = 0;
      for (std::size_t j = 0; j < f1.size(); ++j)
        s = std::max(s, std::abs(f1.values[j] - f2.values[j]));
      return s;
    }
    case TestFunction::Kind::Kl: {
      require_binary(marks);
      const Curve& f1 = curve_of(marks[0]);
      const Curve& f2 = curve_of(marks[1]);
      double s = 0;
      for (std::size_t j = 0; j < f1.size(); ++j) {
        double a = f1.values[j], b = f2.values[j];
        if (!(a > 0) || !(b > 0))
          raise(FMPP_ERR_NONPOSITIVE_KL_INPUT,
                "kl test function needs strictly positive curves");
        s += std::log(a / b) * a + std::log(b / a) * b;
      }
      return riemann_weight(f1) * s;
    }
    case TestFunction::Kind::Inner: {
      require_binary(marks);
      const Curve& f1 = curve_of(marks[0]);
      const Curve& f2 = curve_of(marks[1]);
      double s = 0;
      for (std::size_t j = 0; j < f1.size(); ++j)
        s += f1.values[j] * f2.values[j];
      return riemann_weight(f1) * s;
    }
    case TestFunction::Kind::DerivL2: {
      require_binary(marks);
      const Curve& f1 = curve_of(marks[0]);
      const Curve& f2 = curve_of(marks[1]);
      const TimeGrid& t = *f1.grid;
      auto g1 = forward_diff(f1.values, t, tf.order);
      auto g2 = forward_diff(f2.values, t, tf.order);
      // difference curves live on the truncated grid t_1..t_{m-k}
      std::size_t m = g1.size();
      double span = t[m - 1] - t[0];
      double s = 0;
      for (std::size_t j = 0; j < m; ++j) {
        double d = g1[j] - g2[j];
        s += d * d;
      }
      return std::sqrt(span / static_cast<double>(m) * s);
    }
    case TestFunction::Kind::Variogram: {
      require_binary(marks);
      if (!tf.mean.grid)
        raise(FMPP_ERR_INVALID_ARGUMENT,
              "variogram test function has no mean curve bound");
      const Curve& f1 = curve_of(marks[0]);
      const Curve& f2 = curve_of(marks[1]);
      double s = 0;
      for (std::size_t j = 0; j < f1.size(); ++j)
        s += (f1.values[j] - tf.mean.values[j]) *
             (f2.values[j] - tf.mean.values[j]);
      return riemann_weight(f1) * s;
    }
    case TestFunction::Kind::AuxProduct: {
      require_binary(marks);
      return aux_scalar_of(marks[0]) * aux_scalar_of(marks[1]);
    }
    case TestFunction::Kind::AuxVariogram: {
      require_binary(marks);
      double d = aux_scalar_of(marks[0]) - aux_scalar_of(marks[1]);
      return d * d / 2.0;
    }
    case TestFunction::Kind::SumOf: {
      double s = 0;
      for (const TestFunction& part : tf.parts) s += eval(part, marks);
      return s;
    }
    case TestFunction::Kind::MaxOf: {
      if (tf.parts.empty())
        raise(FMPP_ERR_INVALID_ARGUMENT, "max-of needs at least one part");
      double s = eval(tf.parts[0], marks);
      for (std::size_t i = 1; i < tf.parts.size(); ++i)
        s = std::max(s, eval(tf.parts[i], marks));
      return s;
    }
  }
  raise(FMPP_ERR_INTERNAL, "unhandled test function kind");
}

namespace {

// Recursive-descent parser for the CLI test-function grammar.
struct TfParser {
  const std::string& s;
  std::size_t pos = 0;

  explicit TfParser(const std::string& text) : s(text) {}

  [[noreturn]] void fail(const std::string& why) {
    raise(FMPP_ERR_PARSE, "bad test function '" + s + "': " + why);
  }

  bool eat(char c) {
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  TestFunction parse_sum() {
    std::vector<TestFunction> parts;
    parts.push_back(parse_term());
    while (eat('+')) parts.push_back(parse_term());
    if (parts.size() == 1) return std::move(parts[0]);
    return TestFunction::sum_of(std::move(parts));
  }

  TestFunction parse_term() {
    if (s.compare(pos, 4, "max(") == 0) {
      pos += 4;
      std::vector<TestFunction> parts;
      parts.push_back(parse_sum());
      while (eat(',')) parts.push_back(parse_sum());
      if (!eat(')')) fail("expected ')'");
      return TestFunction::max_of(std::move(parts));
    }
    return parse_atom();
  }

  TestFunction parse_atom() {
    std::size_t start = pos;
    while (pos < s.size() && s[pos] != '+' && s[pos] != ',' && s[pos] != ')')
      ++pos;
    std::string atom = s.substr(start, pos - start);
    if (atom == "one") return TestFunction::one();
    if (atom == "sup") return TestFunction::sup();
    if (atom == "kl") return TestFunction::kl();
    if (atom == "inner") return TestFunction::inner();
    if (atom == "vario") return TestFunction::variogram_unbound();
    if (atom == "aux-prod") return TestFunction::aux_product();
    if (atom == "aux-vario") return TestFunction::aux_variogram();
    if (atom.rfind("lp:", 0) == 0) {
      try {
        return TestFunction::lp(std::stod(atom.substr(3)));
      } catch (const Error&) {
        throw;
      } catch (const std::exception&) {
        fail("bad lp exponent");
      }
    }
    if (atom.rfind("deriv:", 0) == 0) {
      try {
        return TestFunction::deriv_l2(std::stoi(atom.substr(6)));
      } catch (const Error&) {
        throw;
      } catch (const std::exception&) {
        fail("bad deriv order");
      }
    }
    fail("unknown atom '" + atom + "'");
  }
};

}  // namespace

TestFunction TestFunction::parse(const std::string& spec) {
  TfParser p(spec);
  TestFunction tf = p.parse_sum();
  if (p.pos != spec.size()) p.fail("trailing input");
  return tf;
}

std::string TestFunction::to_string() const {
  std::ostringstream out;
  switch (kind) {
    case Kind::One: return "one";
    case Kind::Lp: out << "lp:" << p; return out.str();
    case Kind::Sup: return "sup";
    case Kind::Kl: return "kl";
    case Kind::Inner: return "inner";
    case Kind::DerivL2: out << "deriv:" << order; return out.str();
    case Kind::Variogram: return "vario";
    case Kind::AuxProduct: return "aux-prod";
    case Kind::AuxVariogram: return "aux-vario";
    case Kind::SumOf: {
      for (std::size_t i = 0; i < parts.size(); ++i)
        out << (i ? "+" : "") << parts[i].to_string();
      return out.str();
    }
    case Kind::MaxOf: {
      out << "max(";
      for (std::size_t i = 0; i < parts.size(); ++i)
        out << (i ? "," : "") << parts[i].to_string();
      out << ")";
      return out.str();
    }
  }
  return "?";
}

}  // namespace fmpp

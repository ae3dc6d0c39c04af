#include "csvio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace fmpp {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    // trim surrounding whitespace
    auto b = field.find_first_not_of(" \t\r");
    auto e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v))
      raise(FMPP_ERR_PARSE, "bad " + what + ": '" + s + "'");
    return v;
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    raise(FMPP_ERR_PARSE, "bad " + what + ": '" + s + "'");
  }
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(FMPP_ERR_IO, "cannot open " + path);
  return in;
}

bool next_data_line(std::ifstream& in, std::string& line) {
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') continue;
    return true;
  }
  return false;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

namespace {

struct PointRow {
  Vec2 loc;
  AuxMark aux;
};

std::map<std::string, PointRow> load_point_rows(const std::string& points_path) {
  std::ifstream pin = open_input(points_path);
  std::string line;
  if (!next_data_line(pin, line))
    raise(FMPP_ERR_PARSE, points_path + ": missing header");
  auto header = split_csv_line(line);
  if (header.size() < 3 || header[0] != "id" || header[1] != "x" ||
      header[2] != "y")
    raise(FMPP_ERR_PARSE, points_path + ": header must start id,x,y");
  int label_col = -1, scalar_col = -1;
  for (std::size_t c = 3; c < header.size(); ++c) {
    if (header[c] == "label")
      label_col = static_cast<int>(c);
    else if (header[c] == "scalar")
      scalar_col = static_cast<int>(c);
    else
      raise(FMPP_ERR_PARSE, points_path + ": unknown column " + header[c]);
  }

  std::map<std::string, PointRow> rows;  // ordered by id
  while (next_data_line(pin, line)) {
    auto f = split_csv_line(line);
    if (f.size() != header.size())
      raise(FMPP_ERR_PARSE, points_path + ": ragged row '" + line + "'");
    PointRow r;
    r.loc = {parse_double(f[1], "x"), parse_double(f[2], "y")};
    if (label_col >= 0 && !f[label_col].empty()) {
      double lv = parse_double(f[label_col], "label");
      int li = static_cast<int>(lv);
      if (li != lv || li < 0)
        raise(FMPP_ERR_PARSE, "label must be a small nonnegative integer");
      r.aux.label = li;
    }
    if (scalar_col >= 0 && !f[scalar_col].empty())
      r.aux.scalar = parse_double(f[scalar_col], "scalar");
    if (!rows.emplace(f[0], r).second)
      raise(FMPP_ERR_DUPLICATE_ID, "duplicate point id: " + f[0]);
  }
  return rows;
}

}  // namespace

Pattern load_pattern(const std::string& points_path,
                     const std::string& curves_path, const Window& window) {
  auto rows = load_point_rows(points_path);
  std::string line;

  // curves file, long form
  std::ifstream cin_ = open_input(curves_path);
  if (!next_data_line(cin_, line))
    raise(FMPP_ERR_PARSE, curves_path + ": missing header");
  auto chead = split_csv_line(line);
  if (chead.size() != 3 || chead[0] != "id" || chead[1] != "t" ||
      chead[2] != "value")
    raise(FMPP_ERR_PARSE, curves_path + ": header must be id,t,value");
  std::map<std::string, std::vector<std::pair<double, double>>> samples;
  while (next_data_line(cin_, line)) {
    auto f = split_csv_line(line);
    if (f.size() != 3)
      raise(FMPP_ERR_PARSE, curves_path + ": ragged row '" + line + "'");
    samples[f[0]].emplace_back(parse_double(f[1], "t"),
                               parse_double(f[2], "value"));
  }

  std::shared_ptr<const TimeGrid> grid;
  std::map<std::string, std::vector<double>> curve_values;
  for (auto& [id, sv] : samples) {
    std::sort(sv.begin(), sv.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<double> t, v;
    for (auto& [ti, vi] : sv) {
      if (!t.empty() && ti == t.back())
        raise(FMPP_ERR_GRID_MISMATCH, "duplicate sample time for id " + id);
      t.push_back(ti);
      v.push_back(vi);
    }
    if (!grid) {
      grid = make_grid(std::move(t));
    } else if (t != *grid) {
      raise(FMPP_ERR_GRID_MISMATCH, "curve grid of id " + id +
                                        " differs from the shared grid");
    }
    curve_values.emplace(id, std::move(v));
  }
  if (!grid) raise(FMPP_ERR_PARSE, curves_path + ": no curve rows");

  std::vector<FmPoint> points;
  points.reserve(rows.size());
  for (auto& [id, row] : rows) {
    auto it = curve_values.find(id);
    if (it == curve_values.end())
      raise(FMPP_ERR_MISSING_CURVE, "no curve rows for point id " + id);
    FmPoint p;
    p.id = id;
    p.loc = row.loc;
    p.aux = row.aux;
    p.curve = make_curve(grid, std::move(it->second));
    points.push_back(std::move(p));
    curve_values.erase(it);
  }
  if (!curve_values.empty())
    raise(FMPP_ERR_PARSE,
          "curve rows for unknown point id " + curve_values.begin()->first);

  return Pattern(window, std::move(points), grid);
}

Pattern load_points_pattern(const std::string& points_path,
                            const Window& window,
                            std::shared_ptr<const TimeGrid> grid) {
  auto rows = load_point_rows(points_path);
  std::vector<FmPoint> points;
  points.reserve(rows.size());
  for (auto& [id, row] : rows) {
    FmPoint p;
    p.id = id;
    p.loc = row.loc;
    p.aux = row.aux;
    p.curve = make_curve(grid, std::vector<double>(grid->size(), 0.0));
    points.push_back(std::move(p));
  }
  return Pattern(window, std::move(points), grid);
}

void save_pattern(const Pattern& p, const std::string& points_path,
                  const std::string& curves_path) {
  bool any_label = false, any_scalar = false;
  for (const FmPoint& pt : p.points()) {
    any_label |= pt.aux.label.has_value();
    any_scalar |= pt.aux.scalar.has_value();
  }
  std::ofstream pout(points_path);
  if (!pout) raise(FMPP_ERR_IO, "cannot write " + points_path);
  pout << "id,x,y";
  if (any_label) pout << ",label";
  if (any_scalar) pout << ",scalar";
  pout << "\n";
  for (const FmPoint& pt : p.points()) {
    pout << pt.id << ',' << format_double(pt.loc.x) << ','
         << format_double(pt.loc.y);
    if (any_label) {
      pout << ',';
      if (pt.aux.label) pout << *pt.aux.label;
    }
    if (any_scalar) {
      pout << ',';
      if (pt.aux.scalar) pout << format_double(*pt.aux.scalar);
    }
    pout << "\n";
  }

  std::ofstream cout_(curves_path);
  if (!cout_) raise(FMPP_ERR_IO, "cannot write " + curves_path);
  cout_ << "id,t,value\n";
  const TimeGrid& g = *p.grid();
  for (const FmPoint& pt : p.points())
    for (std::size_t j = 0; j < g.size(); ++j)
      cout_ << pt.id << ',' << format_double(g[j]) << ','
            << format_double(pt.curve.values[j]) << "\n";
}

}  // namespace fmpp

#include "config.hpp"

#include <fstream>
#include <sstream>

#include "cli_util.hpp"
#include "json.hpp"

namespace fmppcli {

std::map<std::string, std::string> load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliError(FMPP_ERR_IO, "cannot open config file " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string t = trim(line);
    if (t.empty()) continue;
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw CliError(FMPP_ERR_PARSE, path + ":" + std::to_string(lineno) +
                                         ": expected key = value");
    std::string key = trim(t.substr(0, eq));
    std::string val = trim(t.substr(eq + 1));
    if (key.empty())
      throw CliError(FMPP_ERR_PARSE,
                     path + ":" + std::to_string(lineno) + ": empty key");
    kv[key] = val;
  }
  return kv;
}

std::vector<double> parse_rgrid(const std::string& spec) {
  double start, stop, step;
  char c1, c2;
  std::istringstream in(spec);
  if (!(in >> start >> c1 >> stop >> c2 >> step) || c1 != ':' || c2 != ':' ||
      !(step > 0) || !(stop >= start) || (in >> c1))
    throw CliError(FMPP_ERR_PARSE, "bad r grid '" + spec +
                                       "' (expected start:stop:step)");
  std::vector<double> r;
  for (int i = 0;; ++i) {
    double v = start + i * step;
    if (v > stop + 1e-9 * step) break;
    r.push_back(v);
  }
  if (r.empty())
    throw CliError(FMPP_ERR_PARSE, "empty r grid from '" + spec + "'");
  return r;
}

std::string provenance_json(
    const std::string& command,
    const std::map<std::string, std::string>& options) {
  nlohmann::ordered_json j;
  j["schema"] = "fmpp-provenance/1";
  j["library_version"] = fmpp_version();
  j["command"] = command;
  nlohmann::ordered_json opts;
  for (const auto& [k, v] : options) opts[k] = v;
  j["options"] = opts;
  return j.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CliError(FMPP_ERR_IO, "cannot write " + path);
  out << content;
  if (!out) throw CliError(FMPP_ERR_IO, "failed writing " + path);
}

}  // namespace fmppcli

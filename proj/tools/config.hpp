#pragma once

#include <map>
#include <string>
#include <vector>

namespace fmppcli {

/// Plain-text run configuration: `key = value` lines, '#' comments. Command
/// line flags override file values (flags win).
std::map<std::string, std::string> load_config_file(const std::string& path);

/// r-grid syntax "start:stop:step" -> explicit grid values.
std::vector<double> parse_rgrid(const std::string& spec);

/// Provenance record written next to every result: schema id, library
/// version, command, effective options, seed. A run is reproducible from
/// this file alone.
std::string provenance_json(const std::string& command,
                            const std::map<std::string, std::string>& options);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace fmppcli

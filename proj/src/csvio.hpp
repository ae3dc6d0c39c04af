#pragma once

#include <string>

#include "pattern.hpp"

namespace fmpp {

/// Loads a pattern from the two CSV sources. points: header
/// `id,x,y[,label][,scalar]`; curves (long form): header `id,t,value` with an
/// identical set of t values per id. `#`-prefixed lines are skipped.
Pattern load_pattern(const std::string& points_path,
                     const std::string& curves_path, const Window& window);

/// Points file only; every point gets an all-zero curve on `grid`.
Pattern load_points_pattern(const std::string& points_path,
                            const Window& window,
                            std::shared_ptr<const TimeGrid> grid);

void save_pattern(const Pattern& p, const std::string& points_path,
                  const std::string& curves_path);

}  // namespace fmpp

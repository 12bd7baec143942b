/*
 * Copyright 2026 The pathcalc Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 */
#pragma once

#include <map>
#include <string>
#include <vector>

#include "core/generators.hpp"
#include "core/path_space.hpp"

namespace pathcalc {

/// 17 significant digits; round-trips every double.
std::string format_number(double value);

// Path CSV:
//   # depth=16
//   # horizon=1
//   t,x1,...,xd
// one row per grid point; a jump writes its time twice, left limit first.
// Extra comment lines are written verbatim after "# ".
void write_path_csv(const std::string& file, const CadlagPath& path, const std::vector<std::string>& comments = {});

/// Reads the format above. Times are snapped to the grid; gaps between rows
/// are filled with the previous row (piecewise-constant paths); a repeated
/// time registers a jump of (second row - first row). Without depth/horizon
/// comments the horizon is the last time and the depth is inferred from the
/// number of distinct times.
CadlagPath read_path_csv(const std::string& file);

struct MetaFile {
  GroundTruth truth;
  Grid grid;
  std::map<std::string, std::string> fields;  // every scalar field as written
};

// Sidecar `field,value` table; jump rows read `jump,t,delta`.
void write_meta_csv(const std::string& file, const GroundTruth& truth, const Grid& grid,
                    const std::map<std::string, std::string>& extra = {},
                    const std::vector<std::string>& comments = {});
MetaFile read_meta_csv(const std::string& file);

/// "bm.csv" -> "bm.meta.csv".
std::string meta_path_for(const std::string& path_file);

}  // namespace pathcalc

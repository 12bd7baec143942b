/*
 * Copyright 2026 The pathcalc Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 */
#include "core/path_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"

namespace pathcalc {

std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& text, const std::string& file, std::size_t line) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || trim(text.substr(used)).size() != 0) {
    throw IoError(file + ":" + std::to_string(line) + ": not a number: '" + text + "'");
  }
  return value;
}

std::ofstream open_out(const std::string& file) {
  std::ofstream out(file);
  if (!out) throw IoError("cannot open '" + file + "' for writing");
  return out;
}

std::ifstream open_in(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open '" + file + "' for reading");
  return in;
}

// Parses "# key=value" comment lines into `keys`.
void read_comment(const std::string& line, std::map<std::string, std::string>& keys) {
  const std::string body = trim(line.substr(1));
  const auto eq = body.find('=');
  if (eq != std::string::npos && body.find(' ') > eq) keys[body.substr(0, eq)] = body.substr(eq + 1);
}

}  // namespace

void write_path_csv(const std::string& file, const CadlagPath& path, const std::vector<std::string>& comments) {
  auto out = open_out(file);
  for (const auto& c : comments) out << "# " << c << '\n';
  out << "# depth=" << path.grid().depth << '\n';
  out << "# horizon=" << format_number(path.grid().horizon) << '\n';
  out << 't';
  for (std::size_t c = 1; c <= path.dim(); ++c) out << ",x" << c;
  out << '\n';
  auto row = [&](double t, const Vector& v) {
    out << format_number(t);
    for (Eigen::Index c = 0; c < v.size(); ++c) out << ',' << format_number(v(c));
    out << '\n';
  };
  for (std::size_t i = 0; i <= path.last_index(); ++i) {
    if (path.jump_at(i)) row(path.grid().time(i), path.left_value(i));
    row(path.grid().time(i), path.value(i));
  }
  if (!out) throw IoError("write to '" + file + "' failed");
}

CadlagPath read_path_csv(const std::string& file) {
  auto in = open_in(file);
  std::map<std::string, std::string> keys;
  std::vector<std::pair<double, std::vector<double>>> rows;
  std::vector<std::size_t> row_lines;
  std::size_t dim = 0;
  bool header = false;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    line = trim(line);
    if (line.empty()) continue;
    if (line[0] == '#') {
      read_comment(line, keys);
      continue;
    }
    auto cells = split(line, ',');
    if (!header) {
      if (cells.size() < 2 || trim(cells[0]) != "t") throw IoError(file + ": expected header 't,x1,...,xd'");
      dim = cells.size() - 1;
      header = true;
      continue;
    }
    if (cells.size() != dim + 1) {
      throw IoError(file + ":" + std::to_string(lineno) + ": expected " + std::to_string(dim + 1) + " columns");
    }
    std::vector<double> values;
    for (std::size_t c = 1; c <= dim; ++c) values.push_back(parse_double(cells[c], file, lineno));
    rows.emplace_back(parse_double(cells[0], file, lineno), std::move(values));
    row_lines.push_back(lineno);
  }
  if (!header || rows.empty()) throw IoError(file + ": no path rows");

  double horizon = rows.back().first;
  int depth = -1;
  try {
    if (keys.count("horizon")) horizon = std::stod(keys["horizon"]);
    if (keys.count("depth")) depth = std::stoi(keys["depth"]);
  } catch (const std::exception&) {
    throw IoError(file + ": malformed depth/horizon comment");
  }
  if (depth < 0) {
    std::size_t distinct = 0;
    for (std::size_t r = 0; r < rows.size(); ++r) distinct += (r == 0 || rows[r].first != rows[r - 1].first);
    const std::size_t intervals = distinct - 1;
    if (intervals == 0 || (intervals & (intervals - 1)) != 0) {
      throw IoError(file + ": no depth comment and the row count is not 2^n + 1");
    }
    depth = 0;
    while ((std::size_t{1} << depth) < intervals) ++depth;
  }
  Grid grid;
  try {
    grid = Grid(horizon, depth);
  } catch (const Error& e) {
    throw IoError(file + ": " + e.what());
  }

  std::vector<std::size_t> index(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const double scaled = rows[r].first / grid.step();
    const double nearest = std::round(scaled);
    if (std::abs(scaled - nearest) > 1e-6 || nearest < 0 || nearest > static_cast<double>(grid.intervals())) {
      throw IoError(file + ":" + std::to_string(row_lines[r]) + ": time " + format_number(rows[r].first) +
                    " is not on the grid");
    }
    index[r] = static_cast<std::size_t>(nearest);
    if (r > 0 && index[r] < index[r - 1]) throw IoError(file + ": rows are not time-sorted");
    if (r > 1 && index[r] == index[r - 2]) {
      throw IoError(file + ":" + std::to_string(row_lines[r]) + ": a time may appear at most twice");
    }
  }
  if (index.front() != 0) throw IoError(file + ": the first row must be at t = 0");

  const std::size_t last = index.back();
  std::vector<double> values((last + 1) * dim);
  std::vector<Jump> jumps;
  std::size_t filled = 0;  // next grid index without a value
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::size_t i = index[r];
    while (filled < i) {  // forward fill the gap with the previous value
      std::copy_n(values.begin() + static_cast<std::ptrdiff_t>((filled - 1) * dim), dim,
                  values.begin() + static_cast<std::ptrdiff_t>(filled * dim));
      ++filled;
    }
    std::copy(rows[r].second.begin(), rows[r].second.end(), values.begin() + static_cast<std::ptrdiff_t>(i * dim));
    filled = i + 1;
    if (r > 0 && index[r - 1] == i) {
      if (i == 0) throw IoError(file + ": a jump at t = 0 is not allowed");
      Vector delta(static_cast<Eigen::Index>(dim));
      for (std::size_t c = 0; c < dim; ++c) delta(static_cast<Eigen::Index>(c)) = rows[r].second[c] - rows[r - 1].second[c];
      jumps.push_back({i, delta});
    }
  }
  try {
    return CadlagPath::from_samples(grid, dim, std::move(values), std::move(jumps));
  } catch (const Error& e) {
    throw IoError(file + ": " + e.what());
  }
}

void write_meta_csv(const std::string& file, const GroundTruth& truth, const Grid& grid,
                    const std::map<std::string, std::string>& extra, const std::vector<std::string>& comments) {
  auto out = open_out(file);
  for (const auto& c : comments) out << "# " << c << '\n';
  out << "field,value\n";
  out << "kind," << to_string(truth.kind) << '\n';
  out << "T," << format_number(grid.horizon) << '\n';
  out << "depth," << grid.depth << '\n';
  out << "seed," << truth.seed << '\n';
  for (const auto& [key, value] : extra) out << key << ',' << value << '\n';
  out << "qv_continuous_rate," << format_number(truth.qv_rate) << '\n';
  out << "jump_count," << truth.jumps.size() << '\n';
  for (const auto& jump : truth.jumps) {
    out << "jump," << format_number(grid.time(jump.index)) << ',' << format_number(jump.delta(0)) << '\n';
  }
  if (!out) throw IoError("write to '" + file + "' failed");
}

MetaFile read_meta_csv(const std::string& file) {
  auto in = open_in(file);
  MetaFile meta;
  std::vector<std::pair<double, double>> jump_rows;
  std::string line;
  bool header = false;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    auto cells = split(line, ',');
    if (!header) {
      if (cells.size() != 2 || cells[0] != "field") throw IoError(file + ": expected header 'field,value'");
      header = true;
      continue;
    }
    if (cells.size() == 3 && cells[0] == "jump") {
      jump_rows.emplace_back(parse_double(cells[1], file, lineno), parse_double(cells[2], file, lineno));
    } else if (cells.size() == 2) {
      meta.fields[cells[0]] = cells[1];
    } else {
      throw IoError(file + ":" + std::to_string(lineno) + ": malformed row");
    }
  }
  auto need = [&](const std::string& key) {
    auto it = meta.fields.find(key);
    if (it == meta.fields.end()) throw IoError(file + ": missing field '" + key + "'");
    return it->second;
  };
  try {
    meta.grid = Grid(parse_double(need("T"), file, 0), std::stoi(need("depth")));
    meta.truth.kind = parse_gen_kind(need("kind"));
    meta.truth.seed = std::stoull(need("seed"));
    meta.truth.qv_rate = parse_double(need("qv_continuous_rate"), file, 0);
  } catch (const IoError&) {
    throw;
  } catch (const std::exception& e) {
    throw IoError(file + ": " + e.what());
  }
  for (const auto& [t, delta] : jump_rows) {
    const auto index = meta.grid.index_of(t);
    if (!index) throw IoError(file + ": jump time " + format_number(t) + " is not on the grid");
    meta.truth.jumps.push_back({*index, Vector::Constant(1, delta)});
  }
  if (meta.fields.count("jump_count") && std::to_string(jump_rows.size()) != meta.fields["jump_count"]) {
    throw IoError(file + ": jump_count does not match the jump rows");
  }
  return meta;
}

std::string meta_path_for(const std::string& path_file) {
  const std::string suffix = ".csv";
  if (path_file.size() > suffix.size() && path_file.compare(path_file.size() - suffix.size(), suffix.size(), suffix) == 0) {
    return path_file.substr(0, path_file.size() - suffix.size()) + ".meta.csv";
  }
  return path_file + ".meta.csv";
}

}  // namespace pathcalc

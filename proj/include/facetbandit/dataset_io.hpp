/*
 * Copyright 2026 The facetbandit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

// Plain-text facet directories:
//
//   root/<facet>/*          training examples of <facet>
//   root/dev/<facet>/*      dev examples of <facet> (or a file root/dev/<facet>.txt)
//
// One example per line: the target followed by the features, separated by
// whitespace. Blank lines and lines starting with '#' are ignored. Facets are
// ordered by name.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "facetbandit/dataset.hpp"
#include "facetbandit/errors.hpp"

namespace facetbandit {

namespace detail {

inline void read_examples(const std::filesystem::path& p, std::size_t facet, std::vector<Example>& out) {
  std::ifstream in(p);
  if (!in) throw ConfigError("cannot read " + p.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line);
    Example ex;
    ex.facet = facet;
    if (!(ss >> ex.target)) throw ConfigError(p.string() + ":" + std::to_string(lineno) + ": bad target");
    double v = 0.0;
    while (ss >> v) ex.features.push_back(v);
    if (!ss.eof()) throw ConfigError(p.string() + ":" + std::to_string(lineno) + ": bad feature value");
    out.push_back(std::move(ex));
  }
}

inline void read_path(const std::filesystem::path& p, std::size_t facet, std::vector<Example>& out) {
  namespace fs = std::filesystem;
  if (fs::is_directory(p)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(p))
      if (e.is_regular_file()) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) read_examples(f, facet, out);
  } else {
    read_examples(p, facet, out);
  }
}

}  // namespace detail

inline FacetedDataset load_facet_directory(const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root)) throw ConfigError("data directory " + root.string() + " does not exist");
  FacetedDataset data;
  for (const auto& e : fs::directory_iterator(root))
    if (e.is_directory() && e.path().filename() != "dev") data.names.push_back(e.path().filename().string());
  std::sort(data.names.begin(), data.names.end());
  if (data.names.empty()) throw ConfigError("no facet directories under " + root.string());

  const fs::path dev = root / "dev";
  data.facets.resize(data.names.size());
  for (std::size_t f = 0; f < data.names.size(); ++f) {
    detail::read_path(root / data.names[f], f, data.facets[f]);
    fs::path dev_path = dev / data.names[f];
    if (!fs::exists(dev_path)) dev_path = dev / (data.names[f] + ".txt");
    if (!fs::exists(dev_path)) throw ConfigError("missing dev data for facet '" + data.names[f] + "'");
    detail::read_path(dev_path, f, data.dev);
  }
  if (fs::is_directory(dev)) {
    for (const auto& e : fs::directory_iterator(dev)) {
      std::string name = e.is_directory() ? e.path().filename().string() : e.path().stem().string();
      if (std::find(data.names.begin(), data.names.end(), name) == data.names.end())
        throw ConfigError("dev entry '" + name + "' has no matching facet");
    }
  }
  data.validate();
  return data;
}

}  // namespace facetbandit

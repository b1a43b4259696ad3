// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "qviz/sql/schema.hpp"

namespace qviz::testing {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// Reads a file from the repository's queries/ directory.
inline std::string golden(const std::string& name) {
  return read_file(std::string(QVIZ_SOURCE_DIR) + "/queries/" + name);
}

inline sql::Schema rs_schema() { return sql::Schema::from_json(golden("rs_schema.json")); }

}  // namespace qviz::testing

#pragma once

#include <iosfwd>
#include <string>

#include "fbm.hpp"

namespace fou2 {

// Round-trip exact formatting (17 significant digits).
std::string format_g17(double v);

// Delimited text export: a '#' header line carrying the path's metadata, a
// column header, then (t, value) rows.
void write_path(const SamplePath& path, std::ostream& os);
void write_path_file(const SamplePath& path, const std::string& file);
SamplePath read_path_file(const std::string& file);

}  // namespace fou2

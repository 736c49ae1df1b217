#include "io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace fou2 {

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_path(const SamplePath& path, std::ostream& os) {
  os << "# fou2kit path";
  if (!path.meta.empty()) os << ' ' << path.meta;
  os << '\n';
  os << "t\tvalue\n";
  for (std::size_t i = 0; i < path.size(); ++i)
    os << format_g17(path.grid.times[i]) << '\t' << format_g17(path.values[i])
       << '\n';
}

void write_path_file(const SamplePath& path, const std::string& file) {
  std::ofstream os(file);
  if (!os) throw std::runtime_error("cannot open for writing: " + file);
  write_path(path, os);
  if (!os.good()) throw std::runtime_error("write failed: " + file);
}

SamplePath read_path_file(const std::string& file) {
  std::ifstream is(file);
  if (!is) throw std::runtime_error("cannot open: " + file);
  std::string line;
  std::string meta;
  std::vector<double> times, values;
  bool saw_header = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string tag = "# fou2kit path";
      if (meta.empty() && line.compare(0, tag.size(), tag) == 0) {
        meta = line.size() > tag.size() + 1 ? line.substr(tag.size() + 1) : "";
      }
      continue;
    }
    if (!saw_header && line.rfind("t\t", 0) == 0) {
      saw_header = true;
      continue;
    }
    std::istringstream row(line);
    double t = 0.0, v = 0.0;
    if (!(row >> t >> v))
      throw std::runtime_error("malformed path row in " + file + ": " + line);
    times.push_back(t);
    values.push_back(v);
  }
  if (times.size() < 2)
    throw std::runtime_error("path file has fewer than 2 rows: " + file);
  SamplePath out;
  out.grid = TimeGrid(std::move(times));
  out.values = std::move(values);
  out.meta = meta;
  return out;
}

}  // namespace fou2

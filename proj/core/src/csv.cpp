#include <cerrno>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>

#include "pulseforge/errors.hpp"
#include "pulseforge/waveform.hpp"

namespace pulseforge {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_double(std::string_view cell, double& out) {
  cell = trim(cell);
  if (cell.empty()) return false;
  if (cell.front() == '+') cell.remove_prefix(1);
  const auto* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

[[noreturn]] void fail(const std::filesystem::path& path, std::size_t row, const std::string& msg) {
  std::ostringstream os;
  os << path.string() << ": row " << row << ": " << msg;
  throw ParseError(os.str(), row);
}

}  // namespace

Waveform read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());

  std::vector<double> times;
  std::vector<double> values;
  std::vector<std::size_t> rows;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    const auto comma = view.find(',');
    if (comma == std::string_view::npos || view.find(',', comma + 1) != std::string_view::npos)
      fail(path, row, "expected exactly 2 columns");
    double t = 0.0;
    double p = 0.0;
    const bool ok_t = parse_double(view.substr(0, comma), t);
    const bool ok_p = parse_double(view.substr(comma + 1), p);
    if (!ok_t || !ok_p) {
      if (row == 1 && times.empty()) continue;  // header
      fail(path, row, "non-numeric cell");
    }
    times.push_back(t);
    values.push_back(p);
    rows.push_back(row);
  }
  if (times.size() < 2) throw ParseError(path.string() + ": fewer than 2 data rows", row);

  const std::size_t n = times.size();
  const double dt = (times.back() - times.front()) / static_cast<double>(n - 1);
  if (!(dt > 0.0)) fail(path, row, "time column is not increasing");
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (std::size_t k = 0; k < n; ++k) {
    const double expected = times.front() + static_cast<double>(k) * dt;
    const double tol = kCsvTimeJitterTolerance * dt + 8.0 * eps * std::max(std::abs(expected), std::abs(times.front()));
    if (std::abs(times[k] - expected) > tol) {
      std::ostringstream os;
      os.precision(17);
      os << "non-uniform time step: expected t = " << expected << " s, found " << times[k] << " s";
      fail(path, rows[k], os.str());
    }
  }
  return Waveform(TimeGrid(times.front(), dt, n), std::move(values));
}

void write_csv(const std::filesystem::path& path, const Waveform& w) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out.precision(17);
  out << "time_s,power_w\n";
  for (std::size_t k = 0; k < w.size(); ++k) out << w.time(k) << ',' << w[k] << '\n';
  if (!out) throw DataError("write failed for " + path.string());
}

}  // namespace pulseforge

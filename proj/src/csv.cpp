#include "fcsmpc/csv.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace fcsmpc {

namespace {

void append_g9(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  out += buf;
}

std::string strip(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(strip(line.substr(start)));
      return out;
    }
    out.push_back(strip(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

double parse_double(const std::string& s, std::size_t line_no) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw std::runtime_error("runlog csv: bad number '" + s + "' on line " +
                             std::to_string(line_no));
  return v;
}

}  // namespace

void write_runlog_csv(const RunLog& log, std::ostream& os) {
  log.check_consistent();
  std::string buf;
  buf.reserve(1 << 20);
  buf += kRunLogHeader;
  buf += '\n';
  for (std::size_t n = 0; n < log.size(); ++n) {
    append_g9(buf, log.t[n]);
    for (int k = 0; k < 3; ++k) {
      buf += ',';
      append_g9(buf, log.i[static_cast<std::size_t>(k)][n]);
    }
    for (int k = 0; k < 3; ++k) {
      buf += ',';
      buf += std::to_string(static_cast<int>(log.u[static_cast<std::size_t>(k)][n]));
    }
    for (int k = 0; k < 3; ++k) {
      buf += ',';
      append_g9(buf, log.vd[static_cast<std::size_t>(k)][n]);
    }
    for (int k = 0; k < 3; ++k) {
      buf += ',';
      append_g9(buf, log.i_ref[static_cast<std::size_t>(k)][n]);
    }
    buf += '\n';
    if (buf.size() > (1 << 20)) {
      os << buf;
      buf.clear();
    }
  }
  os << buf;
}

void write_runlog_csv(const RunLog& log, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_runlog_csv(log, f);
  if (!f.good()) throw std::runtime_error("write to '" + path + "' failed");
}

RunLog read_runlog_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("runlog csv: empty input");
  {
    const auto names = split_fields(line);
    const auto expected = split_fields(kRunLogHeader);
    if (names != expected) throw std::runtime_error("runlog csv: unexpected header");
  }
  RunLog log;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (strip(line).empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 13)
      throw std::runtime_error("runlog csv: expected 13 columns on line " +
                               std::to_string(line_no));
    log.t.push_back(parse_double(f[0], line_no));
    for (int k = 0; k < 3; ++k)
      log.i[static_cast<std::size_t>(k)].push_back(parse_double(f[static_cast<std::size_t>(1 + k)], line_no));
    for (int k = 0; k < 3; ++k) {
      const double lv = parse_double(f[static_cast<std::size_t>(4 + k)], line_no);
      const double r = std::round(lv);
      if (std::abs(lv - r) > 0.0 || r < -2.0 || r > 2.0)
        throw std::runtime_error("runlog csv: bad level on line " + std::to_string(line_no));
      log.u[static_cast<std::size_t>(k)].push_back(static_cast<std::int8_t>(r));
    }
    for (int k = 0; k < 3; ++k)
      log.vd[static_cast<std::size_t>(k)].push_back(parse_double(f[static_cast<std::size_t>(7 + k)], line_no));
    for (int k = 0; k < 3; ++k)
      log.i_ref[static_cast<std::size_t>(k)].push_back(parse_double(f[static_cast<std::size_t>(10 + k)], line_no));
  }
  if (log.t.empty()) throw std::runtime_error("runlog csv: no samples");
  log.t0 = log.t.front();
  if (log.t.size() >= 2) {
    const double span = log.t.back() - log.t.front();
    if (!(span > 0.0)) throw std::runtime_error("runlog csv: non-increasing time column");
    log.sample_rate = static_cast<double>(log.t.size() - 1) / span;
  }
  log.check_consistent();
  return log;
}

RunLog read_runlog_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  return read_runlog_csv(f);
}

}  // namespace fcsmpc

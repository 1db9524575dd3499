#pragma once

// File formats: CSV tables with 17-significant-digit floats, the sample
// record schema, flat key=value config files and FNV-1a content checksums.

#include <cerrno>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hsaw/bridges.hpp"

namespace hsaw {

/// Raised for unreadable or malformed input files.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Row-at-a-time CSV writer; fields are written verbatim.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
      : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot open " + path.string() + " for writing");
    columns_ = header.size();
    row(header);
  }

  void row(const std::vector<std::string>& fields) {
    if (fields.size() != columns_) throw std::logic_error("CSV row width does not match header");
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ << ',';
      out_ << fields[i];
    }
    out_ << '\n';
    if (!out_) throw std::runtime_error("write failure on " + path_.string());
  }

  void close() {
    out_.close();
    if (!out_) throw std::runtime_error("write failure on " + path_.string());
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t columns_ = 0;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw FormatError("missing CSV column '" + std::string(name) + "'");
  }

  std::vector<std::string> values(std::string_view name) const {
    const std::size_t c = column(name);
    std::vector<std::string> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[c]);
    return out;
  }
};

inline std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.emplace_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw FormatError(path.string() + ": empty file");
  t.header = split(line, ',');
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto fields = split(line, ',');
    if (fields.size() != t.header.size()) {
      throw FormatError(path.string() + ":" + std::to_string(lineno) + ": wrong number of fields");
    }
    t.rows.push_back(std::move(fields));
  }
  return t;
}

inline double parse_double(const std::string& s) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE) throw FormatError("not a number: '" + s + "'");
  return v;
}

inline std::uint64_t parse_u64(const std::string& s) {
  errno = 0;
  char* end = nullptr;
  if (s.empty() || s[0] == '-') throw FormatError("not a nonnegative integer: '" + s + "'");
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size() || errno == ERANGE) throw FormatError("not a nonnegative integer: '" + s + "'");
  return v;
}

inline std::int64_t parse_i64(const std::string& s) {
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE) throw FormatError("not an integer: '" + s + "'");
  return v;
}

// ---------------------------------------------------------------------------
// Sample records

struct TaggedRecord {
  std::uint64_t chain = 0;
  std::uint64_t iter = 0;
  SampleRecord record;
};

inline const std::vector<std::string>& sample_csv_header() {
  static const std::vector<std::string> h{"chain", "iter", "n", "y_n", "exit_x", "rightmost", "weight"};
  return h;
}

inline std::vector<std::string> sample_csv_row(const TaggedRecord& t) {
  return {std::to_string(t.chain),       std::to_string(t.iter),           std::to_string(t.record.n),
          std::to_string(t.record.y_n),  format_double(t.record.exit_x),   format_double(t.record.rightmost),
          format_double(t.record.weight)};
}

inline void write_samples(const std::filesystem::path& path, const std::vector<TaggedRecord>& records) {
  CsvWriter w(path, sample_csv_header());
  for (const auto& r : records) w.row(sample_csv_row(r));
  w.close();
}

inline std::vector<TaggedRecord> read_samples(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  const std::size_t c_chain = t.column("chain"), c_iter = t.column("iter"), c_n = t.column("n"),
                    c_y = t.column("y_n"), c_x = t.column("exit_x"), c_r = t.column("rightmost"),
                    c_w = t.column("weight");
  std::vector<TaggedRecord> out;
  out.reserve(t.rows.size());
  for (const auto& row : t.rows) {
    TaggedRecord r;
    r.chain = parse_u64(row[c_chain]);
    r.iter = parse_u64(row[c_iter]);
    r.record.n = parse_u64(row[c_n]);
    r.record.y_n = parse_i64(row[c_y]);
    r.record.exit_x = parse_double(row[c_x]);
    r.record.rightmost = parse_double(row[c_r]);
    r.record.weight = parse_double(row[c_w]);
    out.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Config files

/// key = value lines; '#' starts a comment; blank lines ignored. Later
/// duplicates override earlier ones.
inline std::map<std::string, std::string> parse_key_values(std::istream& in, const std::string& origin) {
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string{};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw FormatError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw FormatError(origin + ":" + std::to_string(lineno) + ": empty key");
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

inline std::map<std::string, std::string> read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config " + path.string());
  return parse_key_values(in, path.string());
}

// ---------------------------------------------------------------------------
// Checksums

/// 64-bit FNV-1a of a byte string.
inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::string file_checksum(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string() + " for checksum");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    h = fnv1a64(std::string_view(buf, static_cast<std::size_t>(in.gcount())), h);
  }
  return "fnv1a64:" + hex64(h);
}

}  // namespace hsaw

#pragma once

#include <openssl/evp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "../error.hpp"
#include "../grid.hpp"

namespace susyq::io {

inline std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw IoError("sha256: digest failed");
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

/// Columnar text: `# key value` metadata lines, a `# columns ...` line, then space-separated rows.
struct Table {
  std::vector<std::string> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_meta(const std::string& key, const std::string& value) { meta.push_back(key + " " + value); }
  void add_row(std::vector<double> r) {
    if (r.size() != columns.size()) throw Error("table: row width does not match columns");
    rows.push_back(std::move(r));
  }
  bool empty() const { return rows.empty(); }

  std::string render() const {
    std::string out;
    for (const auto& m : meta) out += "# " + m + "\n";
    out += "# columns";
    for (const auto& c : columns) out += " " + c;
    out += "\n";
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) {
        if (i) out += ' ';
        out += format_double(r[i]);
      }
      out += '\n';
    }
    return out;
  }
};

inline void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!os) throw IoError("write failed for " + path.string());
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

}  // namespace susyq::io

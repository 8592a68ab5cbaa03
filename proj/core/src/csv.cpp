// SPDX-License-Identifier: Apache-2.0
#include "symneg/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace symneg {

void CsvTable::add_row(std::vector<std::string> row) {
  if (row.size() != header.size())
    throw std::invalid_argument("CSV row width does not match header");
  rows.push_back(std::move(row));
}

std::string CsvTable::to_string() const {
  std::ostringstream out;
  auto emit = [&out](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out << ',';
      out << fields[i];
    }
    out << '\n';
  };
  emit(header);
  for (const auto& r : rows) emit(r);
  return out.str();
}

CsvTable CsvTable::parse(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t pos = 0;
    for (;;) {
      std::size_t comma = line.find(',', pos);
      if (comma == std::string::npos) {
        fields.push_back(line.substr(pos));
        break;
      }
      fields.push_back(line.substr(pos, comma - pos));
      pos = comma + 1;
    }
    if (first) {
      t.header = std::move(fields);
      first = false;
    } else {
      t.add_row(std::move(fields));
    }
  }
  return t;
}

std::string format_double(double x) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, p);
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace symneg

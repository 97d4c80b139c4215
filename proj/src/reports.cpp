#include "riccati_lab/reports.hpp"

#include <cerrno>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "riccati_lab/core.hpp"

namespace rlab {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

namespace {

std::string escape_csv(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

CsvWriter::CsvWriter(const std::string& path,
                     const std::vector<std::string>& columns)
    : columns_(columns.size()), path_(path) {
  if (columns.empty())
    throw ValidationError("BadOutput", "csv writer needs at least one column");
  file_ = std::fopen(path.c_str(), "wb");
  if (!file_)
    throw ValidationError("BadOutput", "cannot open " + path + " for writing: " +
                                           std::strerror(errno));
  std::string header;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) header += ',';
    header += escape_csv(columns[i]);
  }
  header += '\n';
  std::fputs(header.c_str(), file_);
}

CsvWriter::~CsvWriter() {
  if (file_) std::fclose(file_);
}

void CsvWriter::row(const std::vector<CsvCell>& cells) {
  if (!file_)
    throw ValidationError("BadOutput", "csv writer for " + path_ + " is closed");
  if (cells.size() != columns_)
    throw ValidationError(
        "BadOutput", "csv row for " + path_ + " has " +
                         std::to_string(cells.size()) + " cells, expected " +
                         std::to_string(columns_));
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    if (const auto* n = std::get_if<long long>(&cells[i]))
      line += std::to_string(*n);
    else if (const auto* d = std::get_if<double>(&cells[i]))
      line += format_double(*d);
    else
      line += escape_csv(std::get<std::string>(cells[i]));
  }
  line += '\n';
  std::fputs(line.c_str(), file_);
}

void CsvWriter::close() {
  if (!file_) return;
  int rc = std::fclose(file_);
  file_ = nullptr;
  if (rc != 0)
    throw ValidationError("BadOutput", "error closing " + path_);
}

std::string ensure_directory(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec)
    throw ValidationError("BadOutput",
                          "cannot create directory " + path + ": " + ec.message());
  return path;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw ValidationError("BadOutput", "cannot open " + path + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out)
    throw ValidationError("BadOutput", "error writing " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ValidationError("BadInput", "cannot open " + path + " for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace rlab

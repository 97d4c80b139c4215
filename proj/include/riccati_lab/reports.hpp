#pragma once

#include <cstdio>
#include <string>
#include <variant>
#include <vector>

namespace rlab {

// One CSV value: integer, double (printed as %.17g so reruns are
// byte-identical), or verbatim string.
using CsvCell = std::variant<long long, double, std::string>;

std::string format_double(double v);

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void row(const std::vector<CsvCell>& cells);
  void close();

 private:
  std::FILE* file_ = nullptr;
  std::size_t columns_ = 0;
  std::string path_;
};

// Creates the directory (and parents) if needed; returns the path.
std::string ensure_directory(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace rlab

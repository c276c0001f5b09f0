#ifndef OIE_IO_HPP
#define OIE_IO_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace oie::io {

/// Malformed or mismatching input data (distinct from numerical failures so
/// the CLI can map it to its own exit code).
struct SchemaError : std::runtime_error {
  explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

/// Canonical decimal formatting: shortest of 9 significant digits, C locale.
/// parse(format(x)) re-formats to the identical string.
std::string format_double(double x);
double parse_double(std::string_view text);

/// Header + string cells. All tabular artifacts go through this type so that
/// emitted files re-parse exactly.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(std::string_view name) const;  // -1 when absent
  int require_column(std::string_view name) const;  // SchemaError when absent
  double number(std::size_t row, int col) const;
};

CsvTable read_csv(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

/// Convenience writer: formats every cell with format_double.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

/// Line-based key=value configuration ('#' starts a comment). Unknown keys are
/// the caller's concern; getters throw SchemaError on malformed values.
class KeyValueConfig {
 public:
  static KeyValueConfig from_file(const std::filesystem::path& path);
  static KeyValueConfig from_string(std::string_view text);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  double get(const std::string& key, double fallback) const;
  std::optional<double> maybe(const std::string& key) const;
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace oie::io

#endif  // OIE_IO_HPP

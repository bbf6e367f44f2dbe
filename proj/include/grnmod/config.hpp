#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "grnmod/evolution.hpp"

namespace grnmod {

/// One `key = value` setting with the line it came from (0 when synthesized).
struct ConfigEntry
{
    std::string key;
    std::string value;
    int line = 0;
};

using ConfigEntries = std::vector<ConfigEntry>;

/// Raised for malformed or invalid configuration; carries every problem found.
class ConfigError : public std::runtime_error
{
  public:
    explicit ConfigError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const noexcept { return problems_; }

  private:
    std::vector<std::string> problems_;
};

/// Reads `key = value` lines; blank lines and '#' comments are skipped.
ConfigEntries read_config_entries(std::istream& is);
ConfigEntries load_config_entries(const std::string& path);

/// Later entries override earlier ones with the same key.
ConfigEntries merge_entries(const ConfigEntries& base, const ConfigEntries& overrides);

/// Builds and validates a configuration. Unknown keys and bad values are all
/// reported together in one ConfigError.
EvoConfig config_from_entries(const ConfigEntries& entries);

/// Every key with its current value, in canonical order. Round-trips through
/// config_from_entries().
ConfigEntries config_to_entries(const EvoConfig& cfg);
void write_config(std::ostream& os, const EvoConfig& cfg);

/// Names of all recognised keys.
const std::vector<std::string>& config_keys();

std::string to_string(SelectionType t);
std::string to_string(CrossoverType t);
std::string to_string(FitnessMode m);
std::string to_string(EdgeCollapse c);
std::string to_string(InitMode m);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

} // namespace grnmod

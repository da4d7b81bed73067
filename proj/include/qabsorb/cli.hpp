#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qabsorb/asymptotic_bounds.hpp"

namespace qabsorb::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitCap = 3;

enum class Units { nats, bits };

/// Defaults reproduce the Bernoulli(0.11), eps = 0.01, n in [20, 200] setup.
struct RunConfig {
  std::string pmf_spec = "0.11,0.89";
  double eps = 0.01;
  long long n_min = 20;
  long long n_max = 200;
  long long n_step = 1;
  std::optional<double> alpha_override;
  std::uint64_t seed = 20240611;
  long long samples = 100'000;
  std::optional<std::string> output_path;
  Units units = Units::nats;

  /// Throws DomainError when a field is out of range.
  void validate() const;
};

/// Shortest round-trip decimal, or 12 significant digits when that is longer.
std::string format_number(double value);

/// key=value lines; '#' starts a comment; blank lines ignored.
std::map<std::string, std::string> parse_config_text(const std::string& text);

/// Applies one key (long flag name without dashes) to cfg.
void apply_config_value(RunConfig& cfg, const std::string& key, const std::string& value);

/// Rows as CSV with the fixed header; nats are divided by ln 2 for bits.
std::string sweep_csv(const std::vector<BoundRow>& rows, Units units);

/// Converts every nats-valued column of a row.
BoundRow convert_row(const BoundRow& row, Units units);

int cmd_stats(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_exact(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Full command line (args excludes the program name) to exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qabsorb::cli

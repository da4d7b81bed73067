#include "qabsorb/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <system_error>

#include "qabsorb/errors.hpp"
#include "qabsorb/exact_limit.hpp"
#include "qabsorb/monte_carlo.hpp"
#include "qabsorb/numerics.hpp"
#include "qabsorb/q_algebra.hpp"
#include "qabsorb/source_model.hpp"

namespace qabsorb::cli {

namespace {

constexpr double kLn2 = std::numbers::ln2;
constexpr int kMaxSignificantDigits = 12;
constexpr double kIdentityUlps = 4.0;
constexpr double kCentralizationRelTol = 1e-9;
constexpr double kCentralizationMaxZ = 4.0;
constexpr double kSlopeTolerance = 0.1;

double unit_scale(Units units, int power) {
  return units == Units::bits ? std::pow(kLn2, power) : 1.0;
}

const char* unit_name(Units units) { return units == Units::bits ? "bits" : "nats"; }

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw DomainError("invalid value '" + text + "' for " + key);
  }
  return value;
}

// Accepts n-min, n_min, nmin and --n-min alike.
std::string normalize_key(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  if (key.rfind("--", 0) == 0) {
    key.erase(0, 2);
  }
  for (const char* name : {"min", "max", "step"}) {
    if (key == std::string("n") + name) {
      key.insert(1, "-");
    }
  }
  return key;
}

class Reporter {
 public:
  explicit Reporter(std::ostream& out) : out_(out) {}

  void pass(const std::string& name, const std::string& detail) { line("PASS", name, detail); }
  void fail(const std::string& name, const std::string& detail) {
    failed_ = true;
    line("FAIL", name, detail);
  }
  void skip(const std::string& name, const std::string& detail) { line("SKIP", name, detail); }
  void check(bool ok, const std::string& name, const std::string& detail) {
    ok ? pass(name, detail) : fail(name, detail);
  }

  [[nodiscard]] bool failed() const { return failed_; }

 private:
  void line(const char* status, const std::string& name, const std::string& detail) {
    out_ << status << ' ' << name;
    if (!detail.empty()) {
      out_ << ' ' << detail;
    }
    out_ << '\n';
  }

  std::ostream& out_;
  bool failed_ = false;
};

}  // namespace

void RunConfig::validate() const {
  (void)SourcePmf::parse(pmf_spec);
  if (!(eps > 0.0 && eps < 1.0)) {
    throw DomainError("eps must lie in (0, 1)");
  }
  if (n_min < 1 || n_max < n_min) {
    throw DomainError("need 1 <= n-min <= n-max");
  }
  if (n_step < 1) {
    throw DomainError("n-step must be positive");
  }
  if (samples < 1) {
    throw DomainError("samples must be positive");
  }
  if (alpha_override && !std::isfinite(*alpha_override)) {
    throw DomainError("alpha must be finite");
  }
}

std::string format_number(double value) {
  if (std::isnan(value)) {
    return "nan";
  }
  if (std::isinf(value)) {
    return value > 0 ? "inf" : "-inf";
  }
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  std::string shortest(buf, res.ptr);
  int digits = 0;
  bool leading = true;
  for (const char c : shortest) {
    if (c == 'e' || c == 'E') {
      break;
    }
    if (c < '0' || c > '9') {
      continue;
    }
    if (leading && c == '0') {
      continue;
    }
    leading = false;
    ++digits;
  }
  if (digits <= kMaxSignificantDigits) {
    return shortest;
  }
  res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general,
                      kMaxSignificantDigits);
  return {buf, res.ptr};
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> entries;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(std::string_view(raw).substr(0, hash));
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw DomainError("config line " + std::to_string(line_no) + ": expected key=value");
    }
    std::string key = trim(std::string_view(line).substr(0, eq));
    if (key.empty()) {
      throw DomainError("config line " + std::to_string(line_no) + ": empty key");
    }
    entries[normalize_key(key)] = trim(std::string_view(line).substr(eq + 1));
  }
  return entries;
}

void apply_config_value(RunConfig& cfg, const std::string& raw_key, const std::string& value) {
  const std::string key = normalize_key(raw_key);
  if (key == "pmf") {
    cfg.pmf_spec = value;
  } else if (key == "eps") {
    cfg.eps = parse_number<double>(key, value);
  } else if (key == "n-min") {
    cfg.n_min = parse_number<long long>(key, value);
  } else if (key == "n-max") {
    cfg.n_max = parse_number<long long>(key, value);
  } else if (key == "n-step") {
    cfg.n_step = parse_number<long long>(key, value);
  } else if (key == "alpha") {
    cfg.alpha_override = parse_number<double>(key, value);
  } else if (key == "seed") {
    cfg.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "samples") {
    cfg.samples = parse_number<long long>(key, value);
  } else if (key == "out") {
    cfg.output_path = value;
  } else if (key == "units") {
    if (value == "nats") {
      cfg.units = Units::nats;
    } else if (value == "bits") {
      cfg.units = Units::bits;
    } else {
      throw DomainError("units must be nats or bits");
    }
  } else {
    throw DomainError("unknown key '" + raw_key + "'");
  }
}

BoundRow convert_row(const BoundRow& row, Units units) {
  if (units == Units::nats) {
    return row;
  }
  const auto scale = [](double v) { return v / kLn2; };
  BoundRow out = row;
  out.shannon = scale(row.shannon);
  out.normal = scale(row.normal);
  if (row.edgeworth) {
    out.edgeworth = scale(*row.edgeworth);
  }
  if (row.q_bound) {
    out.q_bound = scale(*row.q_bound);
  }
  if (row.exact) {
    out.exact = scale(*row.exact);
  }
  return out;
}

std::string sweep_csv(const std::vector<BoundRow>& rows, Units units) {
  std::string csv = "n,shannon,normal,edgeworth,qbound,exact\n";
  const auto optional_field = [](const std::optional<double>& v) {
    return v ? format_number(*v) : std::string{};
  };
  for (const BoundRow& raw : rows) {
    const BoundRow row = convert_row(raw, units);
    csv += std::to_string(row.n);
    csv += ',' + format_number(row.shannon);
    csv += ',' + format_number(row.normal);
    csv += ',' + optional_field(row.edgeworth);
    csv += ',' + optional_field(row.q_bound);
    csv += ',' + optional_field(row.exact);
    csv += '\n';
  }
  return csv;
}

int cmd_stats(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const SourcePmf pmf = SourcePmf::parse(cfg.pmf_spec);
  const InfoMoments m = info_moments(pmf, 6);
  const Units u = cfg.units;
  out << "pmf=" << cfg.pmf_spec << '\n';
  out << "alphabet_size=" << pmf.size() << '\n';
  out << "units=" << unit_name(u) << '\n';
  out << "h1=" << format_number(m.h1 / unit_scale(u, 1)) << '\n';
  out << "varentropy=" << format_number(m.varentropy / unit_scale(u, 2)) << '\n';
  out << "third_central=" << format_number(m.third_central / unit_scale(u, 3)) << '\n';
  for (int j = 2; j <= 6; ++j) {
    out << "central_moment_" << j << '=' << format_number(m.central(j) / unit_scale(u, j))
        << '\n';
  }
  std::optional<double> alpha = cfg.alpha_override;
  if (has_degenerate_varentropy(m)) {
    err << "degenerate source: varentropy is zero, alpha = T/(3V^2) is undefined\n";
    out << "alpha_optimal=undefined\n";
  } else {
    const double optimal = optimal_alpha(m).alpha;
    out << "alpha_optimal=" << format_number(optimal) << '\n';
    alpha = alpha.value_or(optimal);
  }
  // alpha and q_n scale the fluctuation in nats whatever the display units.
  if (alpha) {
    out << "alpha=" << format_number(*alpha) << '\n';
    out << "q_at_n_min=" << format_number(scaling_q({*alpha}, cfg.n_min).q) << '\n';
    out << "q_at_n_max=" << format_number(scaling_q({*alpha}, cfg.n_max).q) << '\n';
  } else {
    out << "alpha=undefined\nq_at_n_min=undefined\nq_at_n_max=undefined\n";
  }
  return kExitOk;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const SourcePmf pmf = SourcePmf::parse(cfg.pmf_spec);
  const auto rows =
      bound_sweep(pmf, cfg.eps, {cfg.n_min, cfg.n_max, cfg.n_step}, true, cfg.alpha_override);
  const bool degenerate = std::any_of(rows.begin(), rows.end(), [](const BoundRow& r) {
    return r.degenerate;
  });
  const long long capped = std::count_if(rows.begin(), rows.end(), [](const BoundRow& r) {
    return !r.exact.has_value();
  });
  if (degenerate) {
    err << "degenerate source: varentropy is zero; edgeworth"
        << (cfg.alpha_override ? "" : " and qbound") << " columns left empty\n";
  }
  if (capped > 0) {
    err << capped << " row(s) exceed the exact-enumeration cap; exact column left empty\n";
  }
  out << sweep_csv(rows, cfg.units);
  return kExitOk;
}

int cmd_exact(const RunConfig& cfg, std::ostream& out, std::ostream& /*err*/) {
  if (cfg.n_min != cfg.n_max) {
    throw DomainError("exact needs a single blocklength (n-min = n-max)");
  }
  const SourcePmf pmf = SourcePmf::parse(cfg.pmf_spec);
  const Spectrum spec = exact_spectrum(pmf, cfg.n_min);
  const SourceLimit limit = exact_source_limit_detail(spec, cfg.eps);
  out << "n=" << cfg.n_min << '\n';
  out << "eps=" << format_number(cfg.eps) << '\n';
  out << "units=" << unit_name(cfg.units) << '\n';
  out << "L_star=" << format_number(limit.value / unit_scale(cfg.units, 1)) << '\n';
  out << "atom_index=" << limit.index << '\n';
  out << "atom_count=" << spec.atoms.size() << '\n';
  out << "cumulative=" << format_number(limit.cumulative) << '\n';
  return kExitOk;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& /*err*/) {
  const SourcePmf pmf = SourcePmf::parse(cfg.pmf_spec);
  const InfoMoments moments = info_moments(pmf, 6);
  Reporter report(out);

  if (has_degenerate_varentropy(moments)) {
    const std::string why = "reason=degenerate_source(varentropy=0)";
    report.skip("identity", why);
    report.skip("centralization_exact", why);
    report.skip("centralization_mc", why);
    report.skip("slopes", why);
    return kExitOk;
  }

  const double alpha_opt = optimal_alpha(moments).alpha;
  const double alpha = cfg.alpha_override.value_or(alpha_opt);

  // L_q with alpha = T/(3V^2) against the Cornish-Fisher form.
  double worst_ulps = 0.0;
  for (long long n = cfg.n_min; n <= cfg.n_max; n += cfg.n_step) {
    const BoundInputs in = make_bound_inputs(moments, n, cfg.eps, alpha_opt);
    const double edge = edgeworth_third(in);
    worst_ulps = std::max(worst_ulps, std::fabs(q_bound(in) - edge) / ulp(edge));
  }
  report.check(worst_ulps <= kIdentityUlps, "identity",
               "max_deviation_ulp=" + format_number(worst_ulps) +
                   " alpha=" + format_number(alpha_opt));

  std::vector<long long> exact_ns{cfg.n_min};
  if (cfg.n_max != cfg.n_min) {
    exact_ns.push_back(cfg.n_max);
  }
  for (const long long n : exact_ns) {
    const std::string label = "n=" + std::to_string(n);
    try {
      const Spectrum spec = exact_spectrum(pmf, n);
      const CentralizedQDensity map(pmf, n, scaling_q({alpha}, n));
      CompensatedSum mean;
      for (const auto& atom : spec.atoms) {
        mean.add(atom.prob() * map(atom.value));
      }
      const double rel = std::fabs(mean.value() - map.mean()) / map.mean();
      report.check(rel <= kCentralizationRelTol, "centralization_exact",
                   label + " relative_error=" + format_number(rel));
    } catch (const CapExceededError&) {
      report.skip("centralization_exact", label + " reason=enumeration_cap");
    } catch (const OverflowError&) {
      report.fail("centralization_exact", label + " reason=mgf_overflow");
    }
  }

  McConfig mc;
  mc.samples = cfg.samples;
  mc.seed = cfg.seed;
  mc.alpha = alpha;
  mc.max_k = 3;
  if (cfg.samples >= 2) {
    try {
      const CentralizationEstimate est = verify_centralization(pmf, cfg.n_min, mc);
      report.check(std::fabs(est.z_score) <= kCentralizationMaxZ, "centralization_mc",
                   "n=" + std::to_string(cfg.n_min) +
                       " mean=" + format_number(est.empirical_mean) +
                       " z=" + format_number(est.z_score));
    } catch (const OverflowError&) {
      report.fail("centralization_mc", "n=" + std::to_string(cfg.n_min) + " reason=mgf_overflow");
    }
  } else {
    report.skip("centralization_mc", "reason=too_few_samples");
  }

  try {
    for (const SlopeEstimate& s : estimate_term_scaling(pmf, mc)) {
      report.check(std::fabs(s.slope - s.expected) <= kSlopeTolerance,
                   "slope_k" + std::to_string(s.k),
                   "slope=" + format_number(s.slope) + " stderr=" + format_number(s.std_error) +
                       " expected=" + format_number(s.expected));
    }
  } catch (const OverflowError&) {
    report.fail("slopes", "reason=overflow");
  } catch (const DomainError& e) {
    report.skip("slopes", std::string("reason=") + e.what());
  }

  return report.failed() ? kExitVerifyFailed : kExitOk;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite-blocklength source-coding limits and q-algebraic bounds", "qabsorb"};
  app.require_subcommand(1);
  app.fallthrough();

  std::map<std::string, std::string> given;
  const auto flag = [&](const std::string& name, const std::string& help) {
    app.add_option_function<std::string>(
        "--" + name, [&given, name](const std::string& v) { given[name] = v; }, help);
  };
  flag("pmf", "comma-separated symbol probabilities (default 0.11,0.89)");
  flag("eps", "target error probability (default 0.01)");
  flag("n-min", "smallest blocklength (default 20)");
  flag("n-max", "largest blocklength (default 200)");
  flag("n-step", "blocklength stride (default 1)");
  flag("alpha", "override the scaling constant alpha");
  flag("seed", "Monte Carlo seed");
  flag("samples", "Monte Carlo sample count (default 100000)");
  flag("units", "nats or bits");
  flag("out", "write output to this path instead of stdout");
  flag("config", "key=value configuration file; flags take precedence");

  auto* stats = app.add_subcommand("stats", "moments of the self-information and alpha");
  auto* sweep = app.add_subcommand("sweep", "CSV of Shannon/normal/Edgeworth/q-bound/exact");
  auto* verify = app.add_subcommand("verify", "identity, centralization and slope checks");
  auto* exact = app.add_subcommand("exact", "exact limit L*(n, eps) at one blocklength");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  RunConfig cfg;
  bool n_max_given = false;
  try {
    if (const auto it = given.find("config"); it != given.end()) {
      std::ifstream file(it->second);
      if (!file) {
        throw DomainError("cannot read config file '" + it->second + "'");
      }
      std::stringstream buffer;
      buffer << file.rdbuf();
      for (const auto& [key, value] : parse_config_text(buffer.str())) {
        if (key == "config") {
          throw DomainError("config files cannot include other config files");
        }
        if (given.count(key) == 0) {
          apply_config_value(cfg, key, value);
          n_max_given = n_max_given || key == "n-max";
        }
      }
    }
    for (const auto& [key, value] : given) {
      if (key != "config") {
        apply_config_value(cfg, key, value);
        n_max_given = n_max_given || key == "n-max";
      }
    }
    if (exact->parsed() && !n_max_given) {
      cfg.n_max = cfg.n_min;
    }
    cfg.validate();
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  std::ofstream file;
  std::ostream* sink = &out;
  if (cfg.output_path) {
    file.open(*cfg.output_path, std::ios::binary);
    if (!file) {
      err << "error: cannot open '" << *cfg.output_path << "' for writing\n";
      return kExitUsage;
    }
    sink = &file;
  }

  try {
    if (stats->parsed()) {
      return cmd_stats(cfg, *sink, err);
    }
    if (sweep->parsed()) {
      return cmd_sweep(cfg, *sink, err);
    }
    if (verify->parsed()) {
      return cmd_verify(cfg, *sink, err);
    }
    return cmd_exact(cfg, *sink, err);
  } catch (const CapExceededError& e) {
    err << "error: " << e.what() << '\n';
    return kExitCap;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace qabsorb::cli

#pragma once

// Command dispatch and report serialization shared by the CLI and the tests.

#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "geodet/errors.hpp"
#include "geodet/fredholm_galerkin.hpp"
#include "geodet/gelfand_yaglom.hpp"
#include "geodet/heat_asymptotics.hpp"
#include "geodet/model_geometry.hpp"
#include "geodet/validation.hpp"

namespace geodet {

enum class Command { DetFredholm, DetGy, DetZeta, HeatLimit, EvalJacobian, Validate };
enum class Format { Json, Csv, Text };

inline const std::map<std::string, Command>& command_table() {
  static const std::map<std::string, Command> table = {
      {"det-fredholm", Command::DetFredholm}, {"det-gy", Command::DetGy},
      {"det-zeta", Command::DetZeta},         {"heat-limit", Command::HeatLimit},
      {"eval-jacobian", Command::EvalJacobian}, {"validate", Command::Validate}};
  return table;
}

inline std::string command_name(Command c) {
  for (const auto& [name, value] : command_table())
    if (value == c) return name;
  return "unknown";
}

inline std::optional<Command> parse_command(const std::string& name) {
  const auto it = command_table().find(name);
  if (it == command_table().end()) return std::nullopt;
  return it->second;
}

inline std::optional<Format> parse_format(const std::string& name) {
  if (name == "json") return Format::Json;
  if (name == "csv") return Format::Csv;
  if (name == "text") return Format::Text;
  return std::nullopt;
}

struct RunConfig {
  Command command = Command::Validate;
  std::map<std::string, std::string> parameters;
  std::optional<std::string> output_path;
  Format format = Format::Json;
};

struct RunResult {
  int exit_code = 0;
  std::string output;
};

inline constexpr const char* kUsage =
    "usage: geodet <command> [options]\n"
    "commands:\n"
    "  det-fredholm   --kappa K --r R --n N [--modes 64,128,256,512] [--case fourier|deflated|piecewise]\n"
    "                 [--partition-N 8,16,32,64,128,256]\n"
    "  det-gy         --kappa K --r R --n N [--steps S]\n"
    "  det-zeta       --case laplacian --t T --n N | --case jacobi --kappa K --r R --n N [--steps S]\n"
    "  heat-limit     --n N [--radius R] --case antipodal | --case nondegenerate --r D\n"
    "  eval-jacobian  --kappa K --r R --n N --partition-N M\n"
    "  validate\n"
    "common: --format json|csv|text  --out PATH  --config FILE.toml\n";

namespace report_detail {

using nlohmann::json;

class Parameters {
 public:
  explicit Parameters(const std::map<std::string, std::string>& p) : p_(p) {}

  bool has(const std::string& key) const { return p_.count(key) != 0; }

  std::string text(const std::string& key, std::optional<std::string> fallback = std::nullopt) const {
    const auto it = p_.find(key);
    if (it != p_.end()) return it->second;
    if (fallback) return *fallback;
    throw Error(ErrorKind::Usage, "missing required parameter --" + key);
  }

  double real(const std::string& key, std::optional<double> fallback = std::nullopt) const {
    if (!has(key)) {
      if (fallback) return record(key, *fallback);
      throw Error(ErrorKind::Usage, "missing required parameter --" + key);
    }
    return record(key, parse_real(key, p_.at(key)));
  }

  int integer(const std::string& key, std::optional<int> fallback = std::nullopt) const {
    const double v = real(key, fallback ? std::optional<double>(*fallback) : std::nullopt);
    if (v != std::floor(v) || std::abs(v) > 1e9) throw Error(ErrorKind::Usage, "--" + key + " must be an integer");
    inputs_[key] = static_cast<int>(v);
    return static_cast<int>(v);
  }

  std::vector<int> integer_list(const std::string& key, const std::string& fallback) const {
    const std::string raw = text(key, fallback);
    std::vector<int> out;
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const double v = parse_real(key, item);
      if (v != std::floor(v) || std::abs(v) > 1e9) throw Error(ErrorKind::Usage, "--" + key + " must list integers");
      out.push_back(static_cast<int>(v));
    }
    inputs_[key] = out;
    return out;
  }

  std::string choice(const std::string& key, const std::vector<std::string>& allowed, std::optional<std::string> fallback) const {
    const std::string v = text(key, fallback);
    for (const auto& a : allowed)
      if (a == v) {
        inputs_[key] = v;
        return v;
      }
    throw Error(ErrorKind::Usage, "--" + key + " has unsupported value '" + v + "'");
  }

  const json& inputs() const { return inputs_; }

 private:
  double record(const std::string& key, double v) const {
    inputs_[key] = v;
    return v;
  }

  static double parse_real(const std::string& key, const std::string& raw) {
    const char* begin = raw.data();
    const char* end = raw.data() + raw.size();
    while (begin != end && *begin == ' ') ++begin;
    if (begin != end && *begin == '+') ++begin;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
      throw Error(ErrorKind::Usage, "--" + key + " must be a finite number, got '" + raw + "'");
    }
    return v;
  }

  const std::map<std::string, std::string>& p_;
  mutable json inputs_ = json::object();
};

struct Report {
  json body = json::object();
  std::string csv;  // series, if the command has one
};

inline json series_json(const DeterminantEstimate& est) {
  json rows = json::array();
  for (const auto& l : est.levels) {
    rows.push_back({{"level", l.size}, {"value", l.value}, {"tail_correction", l.tail_correction},
                    {"extrapolated", l.extrapolated}});
  }
  return rows;
}

inline JacobiSystem curvature_system(const Parameters& p) {
  const double kappa = p.real("kappa");
  const double r = p.real("r");
  const int n = p.integer("n");
  return jacobi_endomorphism({ModelManifold::constant_curvature(n, kappa), r});
}

inline Report det_fredholm(const Parameters& p) {
  const JacobiSystem sys = curvature_system(p);
  const std::string route = p.choice("case", {"fourier", "deflated", "piecewise"}, "fourier");
  Report out;
  std::ostringstream csv;
  if (route == "piecewise") {
    const DeterminantEstimate est = piecewise_det(sys, p.integer_list("partition-N", "8,16,32,64,128,256"));
    out.body["value"] = est.extrapolated;
    out.body["error_estimate"] = est.error_estimate;
    out.body["route"] = "fredholm-piecewise-linear";
    out.body["series"] = series_json(est);
    write_series_csv(csv, est);
  } else {
    const std::vector<int> modes = p.integer_list("modes", "64,128,256,512");
    if (route == "deflated") {
      const DeflatedEstimate d = fredholm_det_deflated(sys, kDefaultKernelTolerance, modes);
      out.body["value"] = d.estimate.extrapolated;
      out.body["error_estimate"] = d.estimate.error_estimate;
      out.body["kernel_dimension"] = d.kernel_dimension;
      out.body["route"] = "fredholm-fourier-deflated";
      out.body["series"] = series_json(d.estimate);
      write_series_csv(csv, d.estimate);
    } else {
      const DeterminantEstimate est = fredholm_det(sys, modes);
      out.body["value"] = est.extrapolated;
      out.body["error_estimate"] = est.error_estimate;
      out.body["route"] = "fredholm-fourier";
      out.body["series"] = series_json(est);
      write_series_csv(csv, est);
    }
  }
  out.csv = csv.str();
  return out;
}

inline Report det_gy(const Parameters& p) {
  const JacobiSystem sys = curvature_system(p);
  const int steps = p.integer("steps", kDefaultOdeSteps);
  const JacobiSystem ref = JacobiSystem::zero(sys.n(), sys.length());
  Report out;
  const JacobiPropagation prop = solve_jacobi_ode(sys, steps);
  if (is_degenerate(prop)) {
    const DegenerateRatio d = gy_degenerate_ratio(sys, ref, steps);
    out.body["value"] = d.value;
    out.body["zero_modes"] = d.zero_modes;
    out.body["route"] = "gelfand-yaglom-degenerate";
  } else {
    out.body["value"] = gy_ratio(ref, sys, steps);
    out.body["route"] = "gelfand-yaglom";
  }
  out.body["error_estimate"] = prop.error_estimate;
  std::ostringstream csv;
  write_propagation_csv(csv, prop);
  out.csv = csv.str();
  return out;
}

inline Report det_zeta(const Parameters& p) {
  const std::string which = p.choice("case", {"laplacian", "jacobi"}, "laplacian");
  Report out;
  ZetaDetValue v;
  if (which == "laplacian") {
    v = zeta_det_dirichlet_laplacian(p.real("t"), p.integer("n"));
    out.body["error_estimate"] = 0.0;
  } else {
    const JacobiSystem sys = curvature_system(p);
    const int steps = p.integer("steps", kDefaultOdeSteps);
    v = zeta_det_jacobi(sys, steps);
    out.body["error_estimate"] = solve_jacobi_ode(sys, steps).error_estimate * std::abs(v.value);
    out.body["excluded_zero_modes"] = v.excluded_zero_modes;
  }
  out.body["value"] = v.value;
  out.body["route"] = std::string("zeta-") + route_name(v.route);
  return out;
}

inline Report heat_limit(const Parameters& p) {
  const int n = p.integer("n");
  const double R = p.real("radius", 1.0);
  const std::string which = p.choice("case", {"antipodal", "nondegenerate"}, std::nullopt);
  const HeatLimitReport rep = which == "antipodal"
                                  ? heat_limit_validation(n, R, HeatCase::Antipodal)
                                  : heat_limit_validation(n, R, HeatCase::Nondegenerate, p.real("r"));
  Report out;
  out.body["value"] = rep.extrapolated_oracle;
  out.body["predicted"] = rep.predicted;
  out.body["k"] = rep.k;
  out.body["rel_deviation"] = rep.rel_deviation;
  out.body["error_estimate"] = std::abs(rep.extrapolated_oracle - rep.predicted);
  out.body["route"] = which == "antipodal" ? "heat-oracle-vs-sxy" : "heat-oracle-vs-van-vleck";
  json rows = json::array();
  for (const auto& [t, ratio] : rep.oracle_values) rows.push_back({{"t", t}, {"ratio", ratio}});
  out.body["series"] = rows;
  std::ostringstream csv;
  write_heat_series_csv(csv, rep);
  out.csv = csv.str();
  return out;
}

inline Report eval_jacobian(const Parameters& p) {
  const double kappa = p.real("kappa");
  const double r = p.real("r");
  const int n = p.integer("n");
  const int N = p.integer("partition-N");
  const Partition tau = Partition::uniform(N);
  const GeodesicData g{ModelManifold::constant_curvature(n, kappa), r};
  Report out;
  out.body["value"] = evaluation_map_jacobian(g, tau);
  out.body["phi0_chain"] = phi0_chain(g.manifold, r, tau);
  out.body["mesh"] = tau.mesh();
  out.body["error_estimate"] = nullptr;
  out.body["route"] = "evaluation-map-jacobian";
  return out;
}

// Durations vary between runs; timing records report only the bound and the verdict.
inline json record_json(const ValidationRecord& r) {
  json out = {{"check_name", r.check_name}, {"expected", r.expected}, {"tolerance", r.tolerance},
              {"comparison", comparison_name(r.comparison)}, {"passed", r.passed}};
  out["computed"] = r.timing ? json(nullptr) : json(r.computed);
  return out;
}

inline std::string format_real(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace report_detail

/// Makes the determinism record of the validation suite compare two serialized reports.
inline void install_report_determinism_probe();

inline RunResult run(const RunConfig& config) {
  using report_detail::json;
  const report_detail::Parameters params(config.parameters);
  const std::string name = command_name(config.command);
  json body = json::object();
  std::string csv;
  RunResult result;

  if (config.command == Command::Validate) {
    install_report_determinism_probe();
    const std::vector<ValidationRecord> records = validate();
    json rows = json::array();
    int passed = 0;
    std::ostringstream table;
    table << "check_name,expected,computed,tolerance,comparison,passed\n";
    for (const auto& r : records) {
      rows.push_back(report_detail::record_json(r));
      passed += r.passed ? 1 : 0;
      table << r.check_name << ',' << report_detail::format_real(r.expected) << ','
            << (r.timing ? std::string() : report_detail::format_real(r.computed)) << ',' << report_detail::format_real(r.tolerance) << ','
            << comparison_name(r.comparison) << ',' << (r.passed ? "true" : "false") << '\n';
    }
    const int failed = static_cast<int>(records.size()) - passed;
    body = {{"command", name},     {"inputs", json::object()}, {"value", passed},
            {"error_estimate", nullptr}, {"route", "acceptance-suite"}, {"records", rows},
            {"passed", passed},    {"failed", failed},
            {"summary", std::to_string(passed) + " passed, " + std::to_string(failed) + " failed"}};
    csv = table.str();
    result.exit_code = failed == 0 ? 0 : 1;
  } else {
    try {
      report_detail::Report rep;
      switch (config.command) {
        case Command::DetFredholm: rep = report_detail::det_fredholm(params); break;
        case Command::DetGy: rep = report_detail::det_gy(params); break;
        case Command::DetZeta: rep = report_detail::det_zeta(params); break;
        case Command::HeatLimit: rep = report_detail::heat_limit(params); break;
        case Command::EvalJacobian: rep = report_detail::eval_jacobian(params); break;
        case Command::Validate: break;
      }
      body = std::move(rep.body);
      body["command"] = name;
      body["inputs"] = params.inputs();
      csv = rep.csv;
    } catch (const Error& e) {
      result.exit_code = e.kind() == ErrorKind::Usage ? 2 : 1;
      body = {{"command", name}, {"inputs", params.inputs()}, {"error", std::string(e.name())},
              {"message", e.what()}};
      if (result.exit_code == 2 && config.format == Format::Text) {
        result.output = std::string(e.what()) + "\n" + kUsage;
        return result;
      }
    } catch (const std::exception& e) {
      result.exit_code = 1;
      body = {{"command", name}, {"inputs", params.inputs()}, {"error", "internal-error"}, {"message", e.what()}};
    }
  }

  switch (config.format) {
    case Format::Json: result.output = body.dump(2) + "\n"; break;
    case Format::Csv:
      if (body.contains("error")) {
        result.output = "error,message\n" + body["error"].get<std::string>() + "," +
                        body["message"].get<std::string>() + "\n";
      } else if (!csv.empty()) {
        result.output = csv;
      } else {
        result.output = "quantity,value\nvalue," + report_detail::format_real(body["value"].get<double>()) + "\n";
      }
      break;
    case Format::Text: {
      std::ostringstream os;
      for (const auto& key : {"command", "route", "value", "error_estimate", "error", "message", "summary"}) {
        if (!body.contains(key)) continue;
        const json& v = body[key];
        os << key << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
      }
      if (config.command == Command::Validate) {
        for (const auto& r : body["records"]) {
          os << (r["passed"].get<bool>() ? "PASS " : "FAIL ") << r["check_name"].get<std::string>() << '\n';
        }
      }
      result.output = os.str();
      break;
    }
  }
  return result;
}

inline void install_report_determinism_probe() {
  validation::determinism_probe() = [] {
    RunConfig config;
    config.command = Command::DetFredholm;
    config.parameters = {{"kappa", "1"}, {"r", "1.5707963267948966"}, {"n", "3"}};
    return run(config).output;
  };
}

}  // namespace geodet

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "geodet/report.hpp"

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << geodet::kUsage;
    return 2;
  }

  CLI::App app{"Functional determinants along geodesics and short-time heat-kernel limits"};
  app.set_config("--config", "", "TOML file with option values; flags on the command line win");
  app.allow_config_extras(false);

  std::string command;
  std::string format = "json";
  std::string out_path;
  app.add_option("command", command, "det-fredholm | det-gy | det-zeta | heat-limit | eval-jacobian | validate")
      ->required();
  app.add_option("--format", format, "json | csv | text");
  app.add_option("--out", out_path, "write the report to this file instead of stdout");

  static const char* keys[] = {"kappa", "r", "n", "t", "modes", "steps", "partition-N", "radius", "case"};
  std::map<std::string, std::string> values;
  for (const char* key : keys) {
    app.add_option(std::string("--") + key, values[key]);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help() << geodet::kUsage;
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << '\n' << geodet::kUsage;
    return 2;
  }

  const auto cmd = geodet::parse_command(command);
  const auto fmt = geodet::parse_format(format);
  if (!cmd || !fmt) {
    std::cerr << (cmd ? "unknown format '" + format + "'" : "unknown command '" + command + "'") << '\n'
              << geodet::kUsage;
    return 2;
  }

  geodet::RunConfig config;
  config.command = *cmd;
  config.format = *fmt;
  for (const char* key : keys) {
    if (app.get_option(std::string("--") + key)->count() > 0) config.parameters[key] = values[key];
  }
  if (!out_path.empty()) config.output_path = out_path;

  const geodet::RunResult result = geodet::run(config);
  if (config.output_path) {
    std::ofstream file(*config.output_path, std::ios::binary);
    if (!file) {
      std::cerr << "cannot open " << *config.output_path << '\n';
      return 1;
    }
    file << result.output;
  } else {
    (result.exit_code == 2 ? std::cerr : std::cout) << result.output;
  }
  if (result.exit_code == 2 && config.format != geodet::Format::Text) std::cerr << geodet::kUsage;
  return result.exit_code;
}

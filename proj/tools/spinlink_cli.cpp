// spinlink: fidelity, rate, sweep, Monte Carlo and diagnostics for heralded
// polarization-to-spin transfer.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spinlink/commands.hpp"
#include "spinlink/config.hpp"
#include "spinlink/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Heralded polarization-to-spin transfer: device fidelity and link rate"};

  std::string config_path;
  std::string preset;
  std::vector<std::string> overrides;
  std::string out;
  std::string format;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> trials;
  std::string command;

  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--preset", preset, "paper-design | mirror-h | effective-pulse-4x");
  app.add_option("--set", overrides, "key=value override (repeatable)")->take_all();
  app.add_option("--out", out, "output path (default: standard output)");
  app.add_option("--format", format, "csv | json");
  app.add_option("--seed", seed, "Monte Carlo master seed");
  app.add_option("--trials", trials, "Monte Carlo trials");
  app.add_option("--command", command, "fidelity | rate | sweep | montecarlo | diagnose");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(spinlink::ErrorKind::Validation);
  }

  // Flags are applied as overrides so they win over the config file.
  if (!out.empty()) overrides.push_back("out=" + nlohmann::json(out).dump());
  if (!format.empty()) overrides.push_back("format=" + nlohmann::json(format).dump());
  if (seed) overrides.push_back("seed=" + std::to_string(*seed));
  if (trials) overrides.push_back("trials=" + std::to_string(*trials));
  if (!command.empty()) overrides.push_back("command=" + nlohmann::json(command).dump());

  try {
    const spinlink::RunConfig cfg = spinlink::load_config(config_path, overrides, preset);
    return spinlink::run_command(cfg, std::cout, std::cerr).exit_code;
  } catch (const spinlink::Error& e) {
    std::cerr << nlohmann::json{{"error", spinlink::error_kind_name(e.kind())},
                                {"exit_code", e.exit_code()},
                                {"message", e.what()}}
                     .dump()
              << '\n';
    return e.exit_code();
  }
}

#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "sleigh/analysis.hpp"
#include "sleigh/controller.hpp"
#include "sleigh/integrator.hpp"
#include "sleigh/model.hpp"

namespace sleigh {

/// Invalid or unreadable run configuration. The message names the field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Scenario {
  std::string name;
  QState initial;
};

struct OutputOptions {
  std::filesystem::path directory = "out";
  bool csv = true;
  bool json = true;
};

/// Sample counts for the verification sweeps; the seed lives on RunConfig.
struct VerificationOptions {
  std::size_t matching_samples = 1000;
  std::size_t residual_samples = 100000;
  std::size_t schwarz_functions = 1000;
};

struct RunConfig {
  ModelParams model{2.0, 1.0, 1.0, CoulombDamping{0.1}};
  ControllerParams controller{Vec3(2.0, 0.5, 0.8), 0.1, Vec2(4.0, 8.0).asDiagonal()};
  IntegratorConfig integrator;
  std::vector<Scenario> scenarios;
  OutputOptions outputs;
  VerificationOptions verification;
  std::uint64_t seed = 0;
};

/// Parses TOML text after applying `key.path=value` overrides (values in TOML
/// syntax, e.g. `controller.k=0.2`, `controller.form="momentum"`).
/// @throws ConfigError
RunConfig parse_run_config(const std::string& toml_text,
                           const std::vector<std::string>& overrides = {},
                           const std::string& source = "<config>");

/// @throws ConfigError
RunConfig load_run_config(const std::filesystem::path& path,
                          const std::vector<std::string>& overrides = {});

/// TOML text of the shipped default: the published parameter set and its
/// scenario batch.
const std::string& default_config_toml();

}  // namespace sleigh

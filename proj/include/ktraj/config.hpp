#pragma once

#include "ktraj/optimizer.hpp"

#include <filesystem>
#include <string>

namespace ktraj {

enum class ReconMethod
{
  Adjoint,
  DcAdjoint,
  Cg,
};

std::string to_string(ReconMethod r);
ReconMethod recon_method_from_string(std::string const &s);

/// Synthetic dataset and evaluation settings.
struct DataConfig
{
  int n_train = 32;
  int n_test = 8;
  std::uint64_t data_seed = 1;
  double phase_smoothness = 0.25;
  ReconMethod recon = ReconMethod::DcAdjoint;
  int cg_iters = 15;
};

/// Everything a CLI run depends on. Serialized as flat `key = value` lines.
struct RunConfig
{
  HardwareSpec hardware;
  OptimConfig optim;
  DataConfig data;

  void validate() const;
};

/// Parses `key = value` lines; `#` starts a comment; lists are comma-separated.
/// Unknown keys and malformed values are errors. Missing keys keep defaults.
RunConfig parse_config(std::string const &text);
RunConfig load_config(std::filesystem::path const &path);

/// Canonical text form: every key, fixed order, 17 significant digits.
std::string to_text(RunConfig const &cfg);

/// First 16 hex digits of SHA-256 over the canonical text.
std::string config_hash(RunConfig const &cfg);

} // namespace ktraj

#include "ktraj/config.hpp"
#include "ktraj/error.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <openssl/evp.h>

#include <charconv>
#include <functional>
#include <fstream>
#include <map>
#include <sstream>

namespace ktraj {

std::string to_string(ReconMethod r)
{
  switch (r) {
  case ReconMethod::Adjoint:
    return "adjoint";
  case ReconMethod::DcAdjoint:
    return "dc_adjoint";
  case ReconMethod::Cg:
    return "cg";
  }
  return "?";
}

ReconMethod recon_method_from_string(std::string const &s)
{
  if (s == "adjoint") {
    return ReconMethod::Adjoint;
  }
  if (s == "dc_adjoint") {
    return ReconMethod::DcAdjoint;
  }
  if (s == "cg") {
    return ReconMethod::Cg;
  }
  throw Error(fmt::format("unknown recon method '{}' (expected adjoint|dc_adjoint|cg)", s));
}

void RunConfig::validate() const
{
  hardware.validate();
  optim.validate();
  if (data.n_train < 1 || data.n_test < 0 || data.cg_iters < 1 || !(data.phase_smoothness > 0)) {
    throw Error("config: n_train >= 1, n_test >= 0, cg_iters >= 1 and phase_smoothness > 0 required");
  }
}

namespace {

std::string trim(std::string s)
{
  auto const b = s.find_first_not_of(" \t\r");
  auto const e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

std::vector<std::string> split(std::string const &s)
{
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(trim(item));
  }
  return out;
}

template <typename T>
T parse_number(std::string const &key, std::string const &v)
{
  T out{};
  auto const *end = v.data() + v.size();
  auto const [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc{} || ptr != end) {
    throw Error(fmt::format("config: bad value '{}' for key '{}'", v, key));
  }
  return out;
}

template <typename T, size_t K>
std::array<T, K> parse_array(std::string const &key, std::string const &v)
{
  auto const parts = split(v);
  if (parts.size() != K) {
    throw Error(fmt::format("config: key '{}' expects {} comma-separated values", key, K));
  }
  std::array<T, K> out{};
  for (size_t i = 0; i < K; ++i) {
    out[i] = parse_number<T>(key, parts[i]);
  }
  return out;
}

bool parse_bool(std::string const &key, std::string const &v)
{
  if (v == "true" || v == "1") {
    return true;
  }
  if (v == "false" || v == "0") {
    return false;
  }
  throw Error(fmt::format("config: bad boolean '{}' for key '{}'", v, key));
}

} // namespace

RunConfig parse_config(std::string const &text)
{
  RunConfig c;
  auto &hw = c.hardware;
  auto &o = c.optim;
  auto &d = c.data;
  using Setter = std::function<void(std::string const &, std::string const &)>;
  auto num = [](auto &field) -> Setter {
    return [&field](std::string const &k, std::string const &v) {
      field = parse_number<std::remove_reference_t<decltype(field)>>(k, v);
    };
  };
  std::map<std::string, Setter> const setters{
    {"gamma", num(hw.gamma)},
    {"g_max", num(hw.g_max)},
    {"s_max", num(hw.s_max)},
    {"raster_dt", num(hw.raster_dt)},
    {"dwell_dt", num(hw.dwell_dt)},
    {"fov", num(hw.fov)},
    {"matrix_size", num(hw.matrix_size)},
    {"mode", [&](auto const &, auto const &v) { o.mode = constraint_mode_from_string(v); }},
    {"lr", num(o.lr)},
    {"adam_betas", [&](auto const &k, auto const &v) { o.adam_betas = parse_array<double, 2>(k, v); }},
    {"adam_eps", num(o.adam_eps)},
    {"steps_per_level", num(o.steps_per_level)},
    {"decimation_levels",
     [&](auto const &k, auto const &v) {
       o.decimation_levels.clear();
       for (auto const &p : split(v)) {
         o.decimation_levels.push_back(parse_number<int>(k, p));
       }
     }},
    {"loss_weights",
     [&](auto const &k, auto const &v) {
       auto const a = parse_array<double, 3>(k, v);
       o.loss_weights = {a[0], a[1], a[2]};
     }},
    {"penalty_weights", [&](auto const &k, auto const &v) { o.penalty_weights = parse_array<double, 2>(k, v); }},
    {"batch_size", num(o.batch_size)},
    {"seed", num(o.seed)},
    {"dwell_ratio", num(o.dwell_ratio)},
    {"n_shots", num(o.n_shots)},
    {"n_samples", num(o.n_samples)},
    {"pipe_iters", num(o.pipe_iters)},
    {"projection_tol", num(o.projection_tol)},
    {"projection_max_iter", num(o.projection_max_iter)},
    {"activity_tol", num(o.activity_tol)},
    {"reset_adam_between_levels",
     [&](auto const &k, auto const &v) { o.reset_adam_between_levels = parse_bool(k, v); }},
    {"n_train", num(d.n_train)},
    {"n_test", num(d.n_test)},
    {"data_seed", num(d.data_seed)},
    {"phase_smoothness", num(d.phase_smoothness)},
    {"recon", [&](auto const &, auto const &v) { d.recon = recon_method_from_string(v); }},
    {"cg_iters", num(d.cg_iters)},
  };

  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (auto const hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    auto const eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(fmt::format("config line {}: expected `key = value`", lineno));
    }
    auto const key = trim(line.substr(0, eq));
    auto const value = trim(line.substr(eq + 1));
    auto const it = setters.find(key);
    if (it == setters.end()) {
      throw Error(fmt::format("config line {}: unknown key '{}'", lineno, key));
    }
    it->second(key, value);
  }
  return c;
}

RunConfig load_config(std::filesystem::path const &path)
{
  std::ifstream is(path);
  if (!is) {
    throw Error(fmt::format("cannot open config {}", path.string()));
  }
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

std::string to_text(RunConfig const &c)
{
  auto const &hw = c.hardware;
  auto const &o = c.optim;
  auto const &d = c.data;
  std::string s;
  auto put = [&s](std::string_view k, std::string const &v) { s += fmt::format("{} = {}\n", k, v); };
  auto g = [](double v) { return fmt::format("{:.17g}", v); };
  put("gamma", g(hw.gamma));
  put("g_max", g(hw.g_max));
  put("s_max", g(hw.s_max));
  put("raster_dt", g(hw.raster_dt));
  put("dwell_dt", g(hw.dwell_dt));
  put("fov", g(hw.fov));
  put("matrix_size", std::to_string(hw.matrix_size));
  put("mode", to_string(o.mode));
  put("lr", g(o.lr));
  put("adam_betas", g(o.adam_betas[0]) + ", " + g(o.adam_betas[1]));
  put("adam_eps", g(o.adam_eps));
  put("steps_per_level", std::to_string(o.steps_per_level));
  put("decimation_levels", fmt::format("{}", fmt::join(o.decimation_levels, ", ")));
  put("loss_weights", g(o.loss_weights.l1) + ", " + g(o.loss_weights.l2) + ", " + g(o.loss_weights.ssim));
  put("penalty_weights", g(o.penalty_weights[0]) + ", " + g(o.penalty_weights[1]));
  put("batch_size", std::to_string(o.batch_size));
  put("seed", std::to_string(o.seed));
  put("dwell_ratio", std::to_string(o.dwell_ratio));
  put("n_shots", std::to_string(o.n_shots));
  put("n_samples", std::to_string(o.n_samples));
  put("pipe_iters", std::to_string(o.pipe_iters));
  put("projection_tol", g(o.projection_tol));
  put("projection_max_iter", std::to_string(o.projection_max_iter));
  put("activity_tol", g(o.activity_tol));
  put("reset_adam_between_levels", o.reset_adam_between_levels ? "true" : "false");
  put("n_train", std::to_string(d.n_train));
  put("n_test", std::to_string(d.n_test));
  put("data_seed", std::to_string(d.data_seed));
  put("phase_smoothness", g(d.phase_smoothness));
  put("recon", to_string(d.recon));
  put("cg_iters", std::to_string(d.cg_iters));
  return s;
}

std::string config_hash(RunConfig const &cfg)
{
  std::string const text = to_text(cfg);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("config_hash: SHA-256 failed");
  }
  std::string hex;
  for (unsigned i = 0; i < 8 && i < len; ++i) {
    hex += fmt::format("{:02x}", digest[i]);
  }
  return hex;
}

} // namespace ktraj

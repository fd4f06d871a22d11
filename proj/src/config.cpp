#include "hjive/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hjive/errors.hpp"

namespace hjive {

using nlohmann::json;

std::string_view to_string(Method method) noexcept {
  switch (method) {
    case Method::HeteroJive: return "heterojive";
    case Method::Ajive: return "ajive";
    case Method::StackSvd: return "stacksvd";
  }
  return "heterojive";
}

Method parse_method(std::string_view name) {
  for (auto m : {Method::HeteroJive, Method::Ajive, Method::StackSvd})
    if (to_string(m) == name) return m;
  raise(ErrorKind::InvalidInput, "unknown method '" + std::string(name) + "'");
}

namespace {

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
  raise(ErrorKind::InvalidInput, "config field '" + field + "': " + what);
}

template <class T>
T get_as(const json& j, const std::string& field) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    field_error(field, "has the wrong type");
  }
}

Index get_count(const json& obj, const std::string& field) {
  const json& j = obj.at(field);
  if (!j.is_number_integer()) field_error(field, "must be an integer");
  const auto v = j.get<std::int64_t>();
  return static_cast<Index>(v);
}

double get_real(const json& obj, const std::string& field) {
  const json& j = obj.at(field);
  if (!j.is_number()) field_error(field, "must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) field_error(field, "must be finite");
  return v;
}

std::string subspace_name(SubspaceConstruction c) {
  return c == SubspaceConstruction::Mixed ? "mixed" : "independent";
}

const std::vector<std::string> kKnownKeys = {
    "n",     "d",          "r",        "r_k",       "K_grid",  "scheme",        "subspaces",
    "s",     "gamma",      "theta",    "sigma",     "sigma_lo", "sigma_hi",     "replicates",
    "seed",  "methods",    "weight_source", "weights", "t_max", "tol",          "refresh_each_iter"};

}  // namespace

void ExperimentConfig::validate() const {
  if (n < 1) field_error("n", "must be at least 1");
  if (d < 1) field_error("d", "must be at least 1");
  if (r < 1) field_error("r", "must be at least 1");
  if (r_k < 0) field_error("r_k", "must be nonnegative");
  if (r + r_k > std::min(n, d)) field_error("r_k", "r + r_k must not exceed min(n, d)");
  if (construction == SubspaceConstruction::Mixed && r + 2 * r_k > n)
    field_error("subspaces", "the mixed construction needs r + 2 r_k <= n");
  if (K_grid.empty()) field_error("K_grid", "must be nonempty");
  for (std::size_t i = 0; i < K_grid.size(); ++i) {
    if (K_grid[i] < 1) field_error("K_grid", "entries must be at least 1");
    if (i > 0 && K_grid[i] <= K_grid[i - 1]) field_error("K_grid", "must be strictly ascending");
  }
  if (!(s >= 0.0)) field_error("s", "must be nonnegative");
  if (!(gamma >= 0.0)) field_error("gamma", "must be nonnegative");
  if (!(theta >= 0.0 && theta <= 1.0)) field_error("theta", "must lie in [0, 1]");
  if (!(noise.lo >= 0.0)) field_error("sigma_lo", "must be nonnegative");
  if (!(noise.lo <= noise.hi)) field_error("sigma_hi", "must be >= sigma_lo");
  if (replicates < 1) field_error("replicates", "must be at least 1");
  if (methods.empty()) field_error("methods", "must name at least one method");
  if (iteration.t_max < 0) field_error("t_max", "must be nonnegative");
  if (!(iteration.tol > 0.0)) field_error("tol", "must be positive");
  if (weight_source.kind == WeightSourceKind::Fixed) {
    if (K_grid.size() != 1 || static_cast<Index>(weight_source.fixed.size()) != K_grid.front())
      field_error("weights", "fixed weights need a single K and exactly K entries");
    try {
      const WeightVector check{std::span<const double>(weight_source.fixed)};
      (void)check;
    } catch (const Error& e) {
      field_error("weights", e.what());
    }
  }
}

ExperimentConfig parse_config_text(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    raise(ErrorKind::InvalidInput, std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) raise(ErrorKind::InvalidInput, "config must be a JSON object");
  for (const auto& [key, value] : root.items()) {
    if (std::find(kKnownKeys.begin(), kKnownKeys.end(), key) == kKnownKeys.end())
      field_error(key, "unknown key");
  }
  for (const char* key : {"n", "d", "r", "r_k", "K_grid"})
    if (!root.contains(key)) field_error(key, "is required");

  ExperimentConfig c;
  c.n = get_count(root, "n");
  c.d = get_count(root, "d");
  c.r = get_count(root, "r");
  c.r_k = get_count(root, "r_k");

  const json& grid = root.at("K_grid");
  if (!grid.is_array()) field_error("K_grid", "must be an array of integers");
  for (const auto& k : grid) {
    if (!k.is_number_integer()) field_error("K_grid", "must be an array of integers");
    c.K_grid.push_back(static_cast<Index>(k.get<std::int64_t>()));
  }

  if (root.contains("scheme")) {
    try {
      c.scheme = parse_loading_scheme(get_as<std::string>(root.at("scheme"), "scheme"));
    } catch (const Error& e) {
      field_error("scheme", e.what());
    }
  }
  if (root.contains("subspaces")) {
    const auto name = get_as<std::string>(root.at("subspaces"), "subspaces");
    if (name == "mixed") c.construction = SubspaceConstruction::Mixed;
    else if (name == "independent") c.construction = SubspaceConstruction::IndependentComplement;
    else field_error("subspaces", "must be 'mixed' or 'independent'");
  }
  if (root.contains("s")) c.s = get_real(root, "s");
  if (root.contains("gamma")) c.gamma = get_real(root, "gamma");
  if (root.contains("theta")) c.theta = get_real(root, "theta");

  const bool has_sigma = root.contains("sigma");
  const bool has_range = root.contains("sigma_lo") || root.contains("sigma_hi");
  if (has_sigma && has_range) field_error("sigma", "give either sigma or sigma_lo/sigma_hi, not both");
  if (has_sigma) {
    c.noise.lo = c.noise.hi = get_real(root, "sigma");
  } else if (has_range) {
    if (!root.contains("sigma_lo")) field_error("sigma_lo", "is required with sigma_hi");
    if (!root.contains("sigma_hi")) field_error("sigma_hi", "is required with sigma_lo");
    c.noise.lo = get_real(root, "sigma_lo");
    c.noise.hi = get_real(root, "sigma_hi");
  } else {
    field_error("sigma", "is required (or sigma_lo and sigma_hi)");
  }

  if (root.contains("replicates")) c.replicates = get_count(root, "replicates");
  if (root.contains("seed")) {
    const json& s = root.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0))
      field_error("seed", "must be a nonnegative 64-bit integer");
    c.seed = s.get<std::uint64_t>();
  }
  if (root.contains("methods")) {
    const json& m = root.at("methods");
    if (!m.is_array()) field_error("methods", "must be an array of method names");
    c.methods.clear();
    for (const auto& name : m) {
      try {
        const Method method = parse_method(get_as<std::string>(name, "methods"));
        if (std::find(c.methods.begin(), c.methods.end(), method) != c.methods.end())
          field_error("methods", "lists a method twice");
        c.methods.push_back(method);
      } catch (const Error& e) {
        if (std::string(e.what()).rfind("config field", 0) == 0) throw;
        field_error("methods", e.what());
      }
    }
  }
  if (root.contains("weight_source")) {
    const auto name = get_as<std::string>(root.at("weight_source"), "weight_source");
    if (name == "oracle") c.weight_source.kind = WeightSourceKind::Oracle;
    else if (name == "data_driven") c.weight_source.kind = WeightSourceKind::DataDriven;
    else if (name == "equal") c.weight_source.kind = WeightSourceKind::Equal;
    else if (name == "fixed") c.weight_source.kind = WeightSourceKind::Fixed;
    else field_error("weight_source", "must be oracle, data_driven, equal or fixed");
  }
  if (root.contains("weights")) {
    if (c.weight_source.kind != WeightSourceKind::Fixed)
      field_error("weights", "only allowed with weight_source = fixed");
    const json& w = root.at("weights");
    if (!w.is_array()) field_error("weights", "must be an array of numbers");
    for (const auto& x : w) {
      if (!x.is_number()) field_error("weights", "must be an array of numbers");
      c.weight_source.fixed.push_back(x.get<double>());
    }
  } else if (c.weight_source.kind == WeightSourceKind::Fixed) {
    field_error("weights", "is required with weight_source = fixed");
  }
  if (root.contains("t_max")) c.iteration.t_max = get_count(root, "t_max");
  if (root.contains("tol")) c.iteration.tol = get_real(root, "tol");
  if (root.contains("refresh_each_iter")) {
    const json& b = root.at("refresh_each_iter");
    if (!b.is_boolean()) field_error("refresh_each_iter", "must be true or false");
    c.refresh_each_iter = b.get<bool>();
  }

  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorKind::Io, "cannot open config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string canonical_config(const ExperimentConfig& c) {
  json j;
  j["n"] = c.n;
  j["d"] = c.d;
  j["r"] = c.r;
  j["r_k"] = c.r_k;
  j["K_grid"] = c.K_grid;
  j["scheme"] = std::string(to_string(c.scheme));
  j["subspaces"] = subspace_name(c.construction);
  j["s"] = c.s;
  j["gamma"] = c.gamma;
  j["theta"] = c.theta;
  j["sigma_lo"] = c.noise.lo;
  j["sigma_hi"] = c.noise.hi;
  j["replicates"] = c.replicates;
  j["seed"] = c.seed;
  json methods = json::array();
  for (Method m : c.methods) methods.push_back(std::string(to_string(m)));
  j["methods"] = methods;
  const char* source = "data_driven";
  switch (c.weight_source.kind) {
    case WeightSourceKind::Oracle: source = "oracle"; break;
    case WeightSourceKind::DataDriven: source = "data_driven"; break;
    case WeightSourceKind::Equal: source = "equal"; break;
    case WeightSourceKind::Fixed: source = "fixed"; break;
  }
  j["weight_source"] = source;
  j["weights"] = c.weight_source.fixed;
  j["t_max"] = c.iteration.t_max;
  j["tol"] = c.iteration.tol;
  j["refresh_each_iter"] = c.refresh_each_iter;
  return j.dump();
}

std::string config_hash(const ExperimentConfig& config) {
  const std::uint64_t h = stable_hash(canonical_config(config));
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 0; i < 16; ++i) out[static_cast<std::size_t>(15 - i)] = kHex[(h >> (4 * i)) & 0xF];
  return out;
}

void apply_seed_override(ExperimentConfig& config) {
  const char* env = std::getenv("JIVE_SEED");
  if (env == nullptr || *env == '\0') return;
  const std::string text(env);
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    raise(ErrorKind::InvalidInput, "JIVE_SEED must be a nonnegative 64-bit integer, got '" + text + "'");
  config.seed = value;
}

SynthesisSpec synthesis_spec(const ExperimentConfig& config, Index K, Rng& rng) {
  SynthesisSpec spec;
  spec.n = config.n;
  spec.d = config.d;
  spec.ranks.joint = config.r;
  spec.ranks.individual.assign(static_cast<std::size_t>(K), config.r_k);
  spec.theta = config.theta;
  spec.construction = config.construction;
  spec.scheme = config.scheme;
  spec.s_k.assign(static_cast<std::size_t>(K), config.s);
  spec.gamma = config.gamma;
  if (config.noise.fixed()) {
    spec.sigma_k.assign(static_cast<std::size_t>(K), config.noise.lo);
  } else {
    const double width = config.noise.hi - config.noise.lo;
    for (Index k = 0; k < K; ++k) {
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      spec.sigma_k.push_back(config.noise.lo + width * u);
    }
  }
  return spec;
}

}  // namespace hjive

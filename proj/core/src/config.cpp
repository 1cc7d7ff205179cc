#include "conman/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <variant>

#include <fmt/format.h>
#include <toml.hpp>

#include "conman/error.hpp"
#include "conman/normalize.hpp"
#include "conman/time.hpp"

extern char** environ;

namespace conman {
namespace {

using List = std::vector<double>;
using Value = std::variant<std::int64_t, double, bool, std::string, List>;

enum class Type { Int, UInt, Double, Bool, String, Path, IntList, DoubleList };

struct KeyDef {
  std::string name;
  Type type;
  std::function<void(PipelineConfig&, const Value&, const std::filesystem::path&)> set;
};

std::int64_t as_int(const std::string& key, const Value& v) {
  if (auto p = std::get_if<std::int64_t>(&v)) return *p;
  if (auto d = std::get_if<double>(&v); d && std::floor(*d) == *d) return static_cast<std::int64_t>(*d);
  throw ConfigError(fmt::format("{} must be an integer", key));
}

double as_double(const std::string& key, const Value& v) {
  if (auto p = std::get_if<double>(&v)) return *p;
  if (auto p = std::get_if<std::int64_t>(&v)) return static_cast<double>(*p);
  throw ConfigError(fmt::format("{} must be a number", key));
}

bool as_bool(const std::string& key, const Value& v) {
  if (auto p = std::get_if<bool>(&v)) return *p;
  throw ConfigError(fmt::format("{} must be true or false", key));
}

std::string as_string(const std::string& key, const Value& v) {
  if (auto p = std::get_if<std::string>(&v)) return *p;
  throw ConfigError(fmt::format("{} must be a string", key));
}

List as_list(const std::string& key, const Value& v) {
  if (auto p = std::get_if<List>(&v)) return *p;
  if (std::holds_alternative<std::int64_t>(v) || std::holds_alternative<double>(v)) return {as_double(key, v)};
  throw ConfigError(fmt::format("{} must be a list of numbers", key));
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return {};
  std::filesystem::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

template <typename T>
std::vector<T> to_sizes(const std::string& key, const List& l) {
  std::vector<T> out;
  for (double d : l) {
    if (d < 0 || std::floor(d) != d) throw ConfigError(fmt::format("{} must hold non-negative integers", key));
    out.push_back(static_cast<T>(d));
  }
  return out;
}

#define CONMAN_INT(key, field)                                                                  \
  KeyDef {                                                                                      \
    key, Type::Int, [](PipelineConfig& c, const Value& v, const std::filesystem::path&) {       \
      c.field = static_cast<decltype(c.field)>(as_int(key, v));                                 \
    }                                                                                           \
  }
#define CONMAN_DOUBLE(key, field)                                                               \
  KeyDef {                                                                                      \
    key, Type::Double,                                                                          \
        [](PipelineConfig& c, const Value& v, const std::filesystem::path&) { c.field = as_double(key, v); } \
  }
#define CONMAN_PATH(key, field)                                                                 \
  KeyDef {                                                                                      \
    key, Type::Path, [](PipelineConfig& c, const Value& v, const std::filesystem::path& base) { \
      c.field = resolve(base, as_string(key, v));                                               \
    }                                                                                           \
  }

const std::vector<KeyDef>& keys() {
  static const std::vector<KeyDef> defs{
      {"seed", Type::UInt,
       [](PipelineConfig& c, const Value& v, const std::filesystem::path&) {
         const auto s = as_int("seed", v);
         if (s < 0) throw ConfigError("seed must be non-negative");
         c.seed = static_cast<std::uint64_t>(s);
       }},
      {"threads", Type::Int,
       [](PipelineConfig& c, const Value& v, const std::filesystem::path&) {
         const auto t = as_int("threads", v);
         if (t < 1 || t > 256) throw ConfigError("threads must be in [1,256]");
         c.threads = static_cast<unsigned>(t);
       }},
      {"report.format", Type::String,
       [](PipelineConfig& c, const Value& v, const std::filesystem::path&) {
         c.format = parse_report_format(as_string("report.format", v));
       }},
      CONMAN_PATH("paths.out_dir", paths.out_dir),
      CONMAN_PATH("paths.report_dir", paths.report_dir),
      CONMAN_PATH("paths.bank", paths.bank),
      CONMAN_PATH("paths.rules", paths.rules),
      CONMAN_PATH("paths.registry", paths.registry),
      CONMAN_PATH("paths.payment_rules", paths.payment_rules),
      CONMAN_PATH("paths.btc_ledger", paths.btc_ledger),
      CONMAN_PATH("paths.btc_addresses", paths.btc_addresses),
      CONMAN_PATH("paths.eth_ledger", paths.eth_ledger),
      CONMAN_PATH("paths.honey_wallets", paths.honey_wallets),
      CONMAN_INT("lure.profiles", lure.profiles),
      CONMAN_INT("lure.per_profile", lure.per_profile),
      {"lure.start", Type::String,
       [](PipelineConfig& c, const Value& v, const std::filesystem::path&) {
         c.lure.start = as_string("lure.start", v);
       }},
      CONMAN_INT("lure.interval_minutes", lure.interval_minutes),
      CONMAN_INT("sim.n_scammers", sim.n_scammers),
      CONMAN_INT("sim.horizon_days", sim.horizon_days),
      CONMAN_INT("sim.n_campaigns", sim.n_campaigns),
      CONMAN_DOUBLE("sim.repeat_text_prob", sim.repeat_text_prob),
      CONMAN_DOUBLE("sim.suspension_hazard", sim.suspension_hazard),
      CONMAN_DOUBLE("sim.deactivation_hazard", sim.deactivation_hazard),
      CONMAN_DOUBLE("sim.engagement_lambda", sim.engagement_lambda),
      CONMAN_DOUBLE("sim.response_prob", sim.response_prob),
      CONMAN_DOUBLE("sim.benign_rate", sim.benign_rate),
      CONMAN_INT("embed.total", embed.total),
      CONMAN_INT("embed.dim", embed.dim),
      {"embed.unit_norm", Type::Bool,
       [](PipelineConfig& c, const Value& v, const std::filesystem::path&) {
         c.embed.unit_norm = as_bool("embed.unit_norm", v);
       }},
      {"embed.reduce_to", Type::IntList,
       [](PipelineConfig& c, const Value& v, const std::filesystem::path&) {
         c.embed.grid.reduce_to = to_sizes<std::size_t>("embed.reduce_to", as_list("embed.reduce_to", v));
       }},
      {"embed.linkage_cutoff", Type::DoubleList,
       [](PipelineConfig& c, const Value& v, const std::filesystem::path&) {
         c.embed.grid.linkage_cutoff = as_list("embed.linkage_cutoff", v);
       }},
      {"embed.min_cluster_size", Type::IntList,
       [](PipelineConfig& c, const Value& v, const std::filesystem::path&) {
         c.embed.grid.min_cluster_size =
             to_sizes<std::size_t>("embed.min_cluster_size", as_list("embed.min_cluster_size", v));
       }},
      CONMAN_INT("engage.probe_after_days", engage.probe_after_days),
      CONMAN_DOUBLE("chain.usd_per_eth", chain.usd_per_eth),
      CONMAN_DOUBLE("chain.threshold", chain.threshold),
      CONMAN_INT("chain.bucket_days", chain.bucket_days),
  };
  return defs;
}

#undef CONMAN_INT
#undef CONMAN_DOUBLE
#undef CONMAN_PATH

const KeyDef* find_key(std::string_view name) {
  for (const auto& k : keys()) {
    if (k.name == name) return &k;
  }
  return nullptr;
}

Value from_toml(const std::string& key, const toml::node& n) {
  if (auto v = n.as_integer()) return v->get();
  if (auto v = n.as_floating_point()) return v->get();
  if (auto v = n.as_boolean()) return v->get();
  if (auto v = n.as_string()) return v->get();
  if (auto a = n.as_array()) {
    List l;
    for (const auto& e : *a) {
      if (auto i = e.as_integer()) {
        l.push_back(static_cast<double>(i->get()));
      } else if (auto f = e.as_floating_point()) {
        l.push_back(f->get());
      } else {
        throw ConfigError(fmt::format("{} must be a list of numbers", key));
      }
    }
    return l;
  }
  throw ConfigError(fmt::format("{} has an unsupported value type", key));
}

Value from_env(const KeyDef& k, const std::string& raw) {
  const std::string s(trim(raw));
  auto number = [&](const std::string& t) -> double {
    try {
      std::size_t used = 0;
      const double d = std::stod(t, &used);
      if (used != t.size()) throw std::invalid_argument(t);
      return d;
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("{}: '{}' is not a number", k.name, t));
    }
  };
  switch (k.type) {
    case Type::Int:
    case Type::UInt: {
      try {
        std::size_t used = 0;
        const auto v = std::stoll(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return static_cast<std::int64_t>(v);
      } catch (const std::exception&) {
        throw ConfigError(fmt::format("{}: '{}' is not an integer", k.name, s));
      }
    }
    case Type::Double: return number(s);
    case Type::Bool: {
      const auto l = to_lower(s);
      if (l == "1" || l == "true" || l == "yes") return true;
      if (l == "0" || l == "false" || l == "no") return false;
      throw ConfigError(fmt::format("{}: '{}' is not a boolean", k.name, s));
    }
    case Type::String:
    case Type::Path: return s;
    case Type::IntList:
    case Type::DoubleList: {
      List l;
      std::stringstream ss(s);
      std::string part;
      while (std::getline(ss, part, ',')) l.push_back(number(std::string(trim(part))));
      return l;
    }
  }
  return s;
}

void walk(const toml::table& t, const std::string& prefix, PipelineConfig& cfg, const std::filesystem::path& base) {
  for (const auto& [k, node] : t) {
    const std::string name = prefix.empty() ? std::string(k.str()) : prefix + "." + std::string(k.str());
    if (const auto* sub = node.as_table()) {
      walk(*sub, name, cfg, base);
      continue;
    }
    const auto* def = find_key(name);
    if (!def) throw ConfigError(fmt::format("unknown config key '{}'", name));
    def->set(cfg, from_toml(name, node), base);
  }
}

}  // namespace

std::filesystem::path PipelineConfig::report_dir() const {
  return paths.report_dir.empty() ? paths.out_dir / "report" : paths.report_dir;
}

Timestamp PipelineConfig::start_time() const { return parse_iso8601(lure.start); }

PipelineConfig parse_config(const std::string& toml_text, const std::filesystem::path& base_dir) {
  PipelineConfig cfg;
  cfg.paths.out_dir = resolve(base_dir, "out");
  toml::table t;
  try {
    t = toml::parse(toml_text);
  } catch (const toml::parse_error& e) {
    throw ConfigError(fmt::format("config line {}: {}", e.source().begin.line, e.description()));
  }
  walk(t, "", cfg, base_dir);
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::filesystem::absolute(path).parent_path());
}

void apply_env(PipelineConfig& cfg, const std::map<std::string, std::string>& env,
               const std::filesystem::path& base_dir) {
  for (const auto& [name, value] : env) {
    if (name.rfind("CONMAN_", 0) != 0) continue;
    std::string key = to_lower(name.substr(7));
    const KeyDef* def = nullptr;
    for (const auto& k : keys()) {
      std::string flat = k.name;
      std::replace(flat.begin(), flat.end(), '.', '_');
      if (flat == key) def = &k;
    }
    if (!def) continue;  // CONMAN_LOG_LEVEL and friends are not config keys
    def->set(cfg, from_env(*def, value), base_dir);
  }
}

std::map<std::string, std::string> conman_environment() {
  std::map<std::string, std::string> out;
  for (char** e = environ; e && *e; ++e) {
    std::string_view kv(*e);
    if (kv.rfind("CONMAN_", 0) != 0) continue;
    const auto eq = kv.find('=');
    if (eq == std::string_view::npos) continue;
    out.emplace(std::string(kv.substr(0, eq)), std::string(kv.substr(eq + 1)));
  }
  return out;
}

void validate(const PipelineConfig& cfg) {
  if (!cfg.seed) throw ConfigError("seed is mandatory (config key 'seed', CONMAN_SEED or --seed)");
  if (cfg.lure.profiles < 1) throw ConfigError("lure.profiles must be at least 1");
  if (cfg.lure.per_profile < 0) throw ConfigError("lure.per_profile must be non-negative");
  if (cfg.lure.interval_minutes < 1) throw ConfigError("lure.interval_minutes must be positive");
  (void)cfg.start_time();
  if (cfg.sim.n_campaigns < 0) throw ConfigError("sim.n_campaigns must be non-negative");
  if (cfg.sim.benign_rate < 0 || cfg.sim.benign_rate > 1) throw ConfigError("sim.benign_rate outside [0,1]");
  if (cfg.embed.dim < 2) throw ConfigError("embed.dim must be at least 2");
  if (cfg.engage.probe_after_days < 0) throw ConfigError("engage.probe_after_days must be non-negative");
  if (cfg.chain.bucket_days < 1) throw ConfigError("chain.bucket_days must be positive");
  if (!(cfg.chain.usd_per_eth > 0)) throw ConfigError("chain.usd_per_eth must be positive");
  for (const auto& r : cfg.embed.grid.reduce_to) {
    for (const auto& c : cfg.embed.grid.linkage_cutoff) {
      for (const auto& m : cfg.embed.grid.min_cluster_size) validate(EmbedConfig{r, c, m});
    }
  }
  for (const auto* p : {&cfg.paths.bank, &cfg.paths.rules, &cfg.paths.registry, &cfg.paths.payment_rules,
                        &cfg.paths.btc_ledger, &cfg.paths.btc_addresses, &cfg.paths.eth_ledger,
                        &cfg.paths.honey_wallets}) {
    if (!p->empty() && !std::filesystem::is_regular_file(*p)) {
      throw ConfigError("configured input does not exist: " + p->string());
    }
  }
  if (cfg.paths.btc_ledger.empty() != cfg.paths.btc_addresses.empty()) {
    throw ConfigError("paths.btc_ledger and paths.btc_addresses go together");
  }
  if (cfg.paths.eth_ledger.empty() != cfg.paths.honey_wallets.empty()) {
    throw ConfigError("paths.eth_ledger and paths.honey_wallets go together");
  }
  validate(make_sim_config(cfg));
}

SimConfig make_sim_config(const PipelineConfig& cfg) {
  SimConfig s;
  s.seed = cfg.seed.value_or(0);
  s.n_scammers = cfg.sim.n_scammers;
  s.horizon_days = cfg.sim.horizon_days;
  s.repeat_text_prob = cfg.sim.repeat_text_prob;
  s.suspension_hazard = cfg.sim.suspension_hazard;
  s.deactivation_hazard = cfg.sim.deactivation_hazard;
  s.engagement_lambda = cfg.sim.engagement_lambda;
  s.response_prob = cfg.sim.response_prob;
  if (cfg.sim.n_scammers > 0 && cfg.sim.n_campaigns > 0) {
    s.planted_campaigns = plant_campaigns(cfg.sim.n_campaigns, cfg.sim.n_scammers, s.seed);
  }
  return s;
}

}  // namespace conman

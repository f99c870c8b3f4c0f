#include "varl/harness/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "varl/envs/registry.hpp"
#include "varl/errors.hpp"

namespace varl::harness {

using nlohmann::json;

Algorithm parse_algorithm(const std::string& name) {
    if (name == "varl") return Algorithm::Varl;
    if (name == "sac") return Algorithm::Sac;
    if (name == "sac_expert_prefill") return Algorithm::SacExpertPrefill;
    throw ConfigError("unknown algorithm '" + name + "' (expected varl, sac or sac_expert_prefill)");
}

std::string algorithm_name(Algorithm algo) {
    switch (algo) {
        case Algorithm::Varl: return "varl";
        case Algorithm::Sac: return "sac";
        case Algorithm::SacExpertPrefill: return "sac_expert_prefill";
    }
    return "varl";
}

namespace {

/// Walks one JSON object, handing out typed fields and remembering which
/// keys were consumed so leftovers can be reported.
class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(where() + " must be an object");
    }

    template <typename T>
    void get(const char* key, T& out) {
        seen_.insert(key);
        const auto it = j_.find(key);
        if (it == j_.end()) return;
        try {
            out = it->template get<T>();
        } catch (const json::exception&) {
            throw ConfigError(where(key) + " has the wrong type");
        }
    }

    template <typename T>
    void get_optional(const char* key, std::optional<T>& out) {
        seen_.insert(key);
        const auto it = j_.find(key);
        if (it == j_.end()) return;
        if (it->is_null()) {
            out.reset();
            return;
        }
        T value{};
        get(key, value);
        out = value;
    }

    std::optional<Reader> object(const char* key) {
        seen_.insert(key);
        const auto it = j_.find(key);
        if (it == j_.end()) return std::nullopt;
        return Reader(*it, where(key));
    }

    const json* raw(const char* key) {
        seen_.insert(key);
        const auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    std::string where(const std::string& key = "") const {
        if (key.empty()) return path_.empty() ? "config" : path_;
        return path_.empty() ? key : path_ + "." + key;
    }

    void finish() const {
        for (const auto& [key, value] : j_.items()) {
            if (!seen_.count(key)) throw ConfigError("unknown config key '" + where(key) + "'");
        }
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

void read_agent(Reader r, AgentSettings& a) {
    std::string activation(numerics::activation_name(a.sac.activation));
    r.get("hidden", a.sac.hidden);
    r.get("activation", activation);
    a.sac.activation = numerics::parse_activation(activation);
    r.get("actor_lr", a.sac.actor_lr);
    r.get("critic_lr", a.sac.critic_lr);
    r.get("alpha_lr", a.sac.alpha_lr);
    r.get("gamma", a.sac.gamma);
    r.get("tau", a.sac.tau);
    r.get("alpha", a.sac.alpha);
    r.get("auto_alpha", a.sac.auto_alpha);
    r.get_optional("target_entropy", a.sac.target_entropy);
    r.get("batch_size", a.sac.batch_size);
    r.get("log_std_min", a.sac.log_std_min);
    r.get("log_std_max", a.sac.log_std_max);
    r.get("replay_capacity", a.replay_capacity);
    r.get("warmup_steps", a.warmup_steps);
    r.finish();
}

void read_shaping(Reader r, shaping::ShapingConfig& s) {
    r.get("lambda", s.lambda);
    r.get("cutoff", s.cutoff);
    r.get("kappa", s.kappa);
    r.get("guidance_batch", s.guidance_batch);
    r.finish();
}

void read_advisor(Reader r, AdvisorSettings& a) {
    std::string kind = a.kind == AdvisorKind::Scripted ? "scripted" : "remote";
    r.get("kind", kind);
    if (kind == "scripted") {
        a.kind = AdvisorKind::Scripted;
    } else if (kind == "remote") {
        a.kind = AdvisorKind::Remote;
    } else {
        throw ConfigError("advisor.kind must be 'scripted' or 'remote'");
    }
    r.get("recent", a.recent);
    r.get_optional("trigger_steps", a.trigger_steps);
    r.get("trigger_fractions", a.trigger_fractions);
    r.get("accuracy", a.quality.accuracy);
    r.get("bias", a.quality.bias);
    r.get("noise", a.quality.noise);
    r.get("endpoint", a.remote.endpoint);
    r.get("api_key_header", a.remote.api_key_header);
    r.get("api_key_env", a.remote.api_key_env);
    r.get("timeout_seconds", a.remote.timeout_seconds);
    r.get("retries", a.remote.retries);
    r.get("parallelism", a.remote.parallelism);
    r.get("repair", a.remote.repair);
    r.finish();
}

}  // namespace

void ExperimentConfig::validate() const {
    const auto names = envs::env_names();
    if (std::find(names.begin(), names.end(), env) == names.end()) {
        throw ConfigError("unknown environment '" + env + "'");
    }
    envs::make_env(env, env_options, 0);  // rejects unknown or invalid options
    if (seeds.empty()) throw ConfigError("seeds must list at least one seed");
    if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
        throw ConfigError("seeds must be distinct");
    }
    if (max_steps == 0) throw ConfigError("max_steps must be positive");
    if (eval_every == 0) throw ConfigError("eval_every must be positive");
    if (eval_episodes == 0) throw ConfigError("eval_episodes must be positive");
    if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
    if (agent.replay_capacity == 0) throw ConfigError("agent.replay_capacity must be positive");
    if (agent.sac.hidden.empty()) throw ConfigError("agent.hidden must list at least one layer");
    shaping.validate();
    schedule();
    if (advisor.kind == AdvisorKind::Remote) advisor.remote.validate();
    if (!(advisor.quality.accuracy >= 0.0 && advisor.quality.accuracy <= 1.0)) {
        throw ConfigError("advisor.accuracy must lie in [0, 1]");
    }
    if (!(advisor.quality.noise >= 0.0)) throw ConfigError("advisor.noise must be non-negative");
    if (!(threshold.success > 0.0 && threshold.success <= 1.0)) throw ConfigError("threshold.success must lie in (0, 1]");
    if (!(threshold.return_fraction > 0.0)) throw ConfigError("threshold.return_fraction must be positive");
    if (threshold.window == 0) throw ConfigError("threshold.window must be positive");
    if (sweep) {
        if (sweep->values.empty()) throw ConfigError("sweep.values must list at least one value");
        if (std::set<double>(sweep->values.begin(), sweep->values.end()).size() != sweep->values.size()) {
            throw ConfigError("sweep.values must be distinct");
        }
        for (const auto& [label, variant] : expand_sweep(*this)) variant.validate();
    }
}

namespace {

std::string sweep_label(const std::string& parameter, double value) {
    std::ostringstream out;
    out << parameter << '_' << value;
    return out.str();
}

std::uint64_t whole(const std::string& parameter, double value) {
    if (!(value >= 1.0) || value != std::floor(value)) {
        throw ConfigError("sweep over " + parameter + " needs positive whole numbers");
    }
    return static_cast<std::uint64_t>(value);
}

}  // namespace

std::vector<std::pair<std::string, ExperimentConfig>> expand_sweep(const ExperimentConfig& config) {
    std::vector<std::pair<std::string, ExperimentConfig>> out;
    if (!config.sweep) {
        out.emplace_back("", config);
        return out;
    }
    const auto& p = config.sweep->parameter;
    for (const double v : config.sweep->values) {
        ExperimentConfig c = config;
        c.sweep.reset();
        if (p == "lambda") {
            c.shaping.lambda = v;
        } else if (p == "cutoff") {
            c.shaping.cutoff = whole(p, v);
        } else if (p == "kappa") {
            c.shaping.kappa = v;
        } else if (p == "recent") {
            c.advisor.recent = whole(p, v);
        } else if (p == "accuracy") {
            c.advisor.quality.accuracy = v;
        } else {
            throw ConfigError("sweep.parameter must be one of lambda, cutoff, kappa, recent, accuracy");
        }
        out.emplace_back(sweep_label(p, v), std::move(c));
    }
    return out;
}

advisor::TriggerSchedule ExperimentConfig::schedule() const {
    if (advisor.trigger_steps) {
        advisor::TriggerSchedule s{*advisor.trigger_steps, advisor.recent};
        s.validate();
        return s;
    }
    return advisor::TriggerSchedule::spread(shaping.cutoff, advisor.recent, advisor.trigger_fractions);
}

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig cfg;
    Reader r(j, "");
    r.get("env", cfg.env);
    if (const json* opts = r.raw("env_options")) {
        if (!opts->is_object()) throw ConfigError("env_options must be an object");
        for (const auto& [key, value] : opts->items()) {
            if (value.is_boolean()) {
                cfg.env_options[key] = value.get<bool>() ? 1.0 : 0.0;
            } else if (value.is_number()) {
                cfg.env_options[key] = value.get<double>();
            } else {
                throw ConfigError("env_options." + key + " must be a number or boolean");
            }
        }
    }
    std::string algo = algorithm_name(cfg.algorithm);
    r.get("algorithm", algo);
    cfg.algorithm = parse_algorithm(algo);
    r.get("seeds", cfg.seeds);
    r.get("max_steps", cfg.max_steps);
    r.get("eval_every", cfg.eval_every);
    r.get("eval_episodes", cfg.eval_episodes);
    r.get("output_dir", cfg.output_dir);
    if (auto a = r.object("agent")) read_agent(*a, cfg.agent);
    if (auto s = r.object("shaping")) read_shaping(*s, cfg.shaping);
    if (auto a = r.object("advisor")) read_advisor(*a, cfg.advisor);
    if (auto e = r.object("expert")) {
        e->get("episodes", cfg.expert_episodes);
        e->finish();
    }
    if (auto t = r.object("threshold")) {
        t->get("success", cfg.threshold.success);
        t->get("return_fraction", cfg.threshold.return_fraction);
        t->get("window", cfg.threshold.window);
        t->finish();
    }
    if (const json* sw = r.raw("sweep"); sw && !sw->is_null()) {
        Reader sr(*sw, "sweep");
        Sweep sweep;
        sr.get("parameter", sweep.parameter);
        sr.get("values", sweep.values);
        sr.finish();
        cfg.sweep = std::move(sweep);
    }
    r.finish();
    cfg.validate();
    return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
    json options = json::object();
    for (const auto& [k, v] : cfg.env_options) options[k] = v;
    const auto& s = cfg.agent.sac;
    const auto& a = cfg.advisor;
    return json{
        {"env", cfg.env},
        {"env_options", options},
        {"algorithm", algorithm_name(cfg.algorithm)},
        {"seeds", cfg.seeds},
        {"max_steps", cfg.max_steps},
        {"eval_every", cfg.eval_every},
        {"eval_episodes", cfg.eval_episodes},
        {"output_dir", cfg.output_dir},
        {"agent",
         {{"hidden", s.hidden},
          {"activation", std::string(numerics::activation_name(s.activation))},
          {"actor_lr", s.actor_lr},
          {"critic_lr", s.critic_lr},
          {"alpha_lr", s.alpha_lr},
          {"gamma", s.gamma},
          {"tau", s.tau},
          {"alpha", s.alpha},
          {"auto_alpha", s.auto_alpha},
          {"target_entropy", s.target_entropy ? json(*s.target_entropy) : json(nullptr)},
          {"batch_size", s.batch_size},
          {"log_std_min", s.log_std_min},
          {"log_std_max", s.log_std_max},
          {"replay_capacity", cfg.agent.replay_capacity},
          {"warmup_steps", cfg.agent.warmup_steps}}},
        {"shaping",
         {{"lambda", cfg.shaping.lambda},
          {"cutoff", cfg.shaping.cutoff},
          {"kappa", cfg.shaping.kappa},
          {"guidance_batch", cfg.shaping.guidance_batch}}},
        {"advisor",
         {{"kind", a.kind == AdvisorKind::Scripted ? "scripted" : "remote"},
          {"recent", a.recent},
          // Sweeps over the cutoff or K re-derive the steps per variant.
          {"trigger_steps", !cfg.sweep                ? json(cfg.schedule().steps)
                            : a.trigger_steps ? json(*a.trigger_steps)
                                              : json(nullptr)},
          {"trigger_fractions", a.trigger_fractions},
          {"accuracy", a.quality.accuracy},
          {"bias", a.quality.bias},
          {"noise", a.quality.noise},
          {"endpoint", a.remote.endpoint},
          {"api_key_header", a.remote.api_key_header},
          {"api_key_env", a.remote.api_key_env},
          {"timeout_seconds", a.remote.timeout_seconds},
          {"retries", a.remote.retries},
          {"parallelism", a.remote.parallelism},
          {"repair", a.remote.repair}}},
        {"expert", {{"episodes", cfg.expert_episodes}}},
        {"threshold",
         {{"success", cfg.threshold.success},
          {"return_fraction", cfg.threshold.return_fraction},
          {"window", cfg.threshold.window}}},
        {"sweep", cfg.sweep ? json{{"parameter", cfg.sweep->parameter}, {"values", cfg.sweep->values}} : json(nullptr)},
    };
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    json j;
    try {
        j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

}  // namespace varl::harness

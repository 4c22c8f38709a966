#include "mfgfn/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mfgfn/errors.hpp"

namespace mfgfn {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

/// Raw flat key-value view of a config ("section.key" -> value text), with
/// consumption tracking so unknown keys can be reported.
class RawConfig {
public:
    void set(const std::string& key, const std::string& value) {
        values_[key] = value;
    }

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::optional<std::string> take(const std::string& key) {
        auto it = values_.find(key);
        if (it == values_.end()) return std::nullopt;
        consumed_.insert(key);
        return it->second;
    }

    std::vector<std::string> unconsumed() const {
        std::vector<std::string> out;
        for (const auto& [k, _] : values_)
            if (!consumed_.count(k)) out.push_back(k);
        return out;
    }

private:
    std::map<std::string, std::string> values_;
    std::set<std::string> consumed_;
};

RawConfig parse_toml(const std::string& text) {
    RawConfig raw;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        // strip comments outside quotes
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') quoted = !quoted;
            if (line[i] == '#' && !quoted) {
                line = line.substr(0, i);
                break;
            }
        }
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": malformed section header '" + t + "'");
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected 'key = value' but got '" + t + "'");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": empty key or value");
        raw.set(section.empty() ? key : section + "." + key, value);
    }
    return raw;
}

RawConfig parse_json(const std::string& text) {
    RawConfig raw;
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config JSON parse error: ") + e.what());
    }
    for (const auto& [section, body] : j.items()) {
        if (!body.is_object())
            throw ConfigError("config JSON: section '" + section +
                              "' must be an object");
        for (const auto& [key, value] : body.items())
            raw.set(section + "." + key, value.dump());
    }
    return raw;
}

void apply_overrides(RawConfig& raw, const std::vector<std::string>& overrides) {
    for (const auto& ov : overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ConfigError("override '" + ov + "' must look like section.key=value");
        raw.set(trim(ov.substr(0, eq)), trim(ov.substr(eq + 1)));
    }
}

std::string unquote(const std::string& v) {
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"')
        return v.substr(1, v.size() - 2);
    return v;
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (...) {
        throw ConfigError(key + ": '" + v + "' is not a number");
    }
}

std::int64_t to_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long long i = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return i;
    } catch (...) {
        throw ConfigError(key + ": '" + v + "' is not an integer");
    }
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true") return true;
    if (v == "false") return false;
    throw ConfigError(key + ": '" + v + "' is not a boolean (true/false)");
}

std::vector<std::string> split_list(const std::string& key, const std::string& v) {
    const std::string t = trim(v);
    if (t.size() < 2 || t.front() != '[' || t.back() != ']')
        throw ConfigError(key + ": expected an array like [a, b, c]");
    std::vector<std::string> parts;
    std::string body = t.substr(1, t.size() - 2);
    std::size_t start = 0;
    while (start <= body.size()) {
        const auto comma = body.find(',', start);
        const std::string item =
            trim(body.substr(start, comma == std::string::npos ? std::string::npos
                                                               : comma - start));
        if (!item.empty()) parts.push_back(item);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return parts;
}

struct TaskDefaults {
    int grid_side;
    std::vector<Cost> costs;
    double gamma;
    int batch_size;
    int top_k;
    std::vector<int> init_counts;
    double beta;
    double rho;
};

TaskDefaults defaults_for(const std::string& task) {
    if (task == "branin")
        return {100,
                {Cost::parse("0.01"), Cost::parse("0.1"), Cost::parse("1")},
                300.0,
                30,
                50,
                {20, 20, 2},
                1.0,
                1.0};
    if (task == "hartmann6")
        return {10,
                {Cost::parse("0.125"), Cost::parse("0.25"), Cost::parse("1")},
                100.0,
                10,
                10,
                {80, 40, 5},
                1e-2,
                1.0};
    if (task == "sequence_toy")
        return {0,
                {Cost::parse("0.2"), Cost::parse("20")},
                40.0,
                10,
                20,
                {40, 4},
                1e-5,
                2.0};
    throw ConfigError("task.name: unknown task '" + task +
                      "' (expected branin, hartmann6 or sequence_toy)");
}

ExperimentConfig resolve(RawConfig raw) {
    ExperimentConfig cfg;

    if (auto v = raw.take("task.name")) cfg.task_name = unquote(*v);
    const TaskDefaults def = defaults_for(cfg.task_name);

    cfg.grid_side = def.grid_side;
    if (auto v = raw.take("task.grid_side"))
        cfg.grid_side = static_cast<int>(to_int("task.grid_side", *v));
    if (auto v = raw.take("task.seq_length"))
        cfg.seq_length = static_cast<int>(to_int("task.seq_length", *v));

    cfg.costs = def.costs;
    if (auto v = raw.take("oracles.costs")) {
        cfg.costs.clear();
        for (const auto& item : split_list("oracles.costs", *v))
            cfg.costs.push_back(Cost::parse(unquote(item)));
    }

    if (auto v = raw.take("loop.sampler")) cfg.sampler = sampler_from_string(unquote(*v));
    cfg.gamma = def.gamma;
    if (auto v = raw.take("loop.gamma")) cfg.gamma = to_double("loop.gamma", *v);
    cfg.batch_size = def.batch_size;
    if (auto v = raw.take("loop.batch_size"))
        cfg.batch_size = static_cast<int>(to_int("loop.batch_size", *v));
    if (auto v = raw.take("loop.pool_size"))
        cfg.pool_size = static_cast<int>(to_int("loop.pool_size", *v));
    cfg.top_k = def.top_k;
    if (auto v = raw.take("loop.top_k"))
        cfg.top_k = static_cast<int>(to_int("loop.top_k", *v));
    cfg.init_counts = def.init_counts;
    if (auto v = raw.take("loop.init_counts")) {
        cfg.init_counts.clear();
        for (const auto& item : split_list("loop.init_counts", *v))
            cfg.init_counts.push_back(
                static_cast<int>(to_int("loop.init_counts", item)));
    }
    if (auto v = raw.take("loop.seed"))
        cfg.seed = static_cast<std::uint64_t>(to_int("loop.seed", *v));
    if (auto v = raw.take("loop.max_rounds"))
        cfg.max_rounds = static_cast<int>(to_int("loop.max_rounds", *v));
    if (auto v = raw.take("loop.count_init_budget"))
        cfg.count_init_budget = to_bool("loop.count_init_budget", *v);
    if (auto v = raw.take("loop.save_round_snapshots"))
        cfg.save_round_snapshots = to_bool("loop.save_round_snapshots", *v);
    if (auto v = raw.take("loop.diverse_threshold"))
        cfg.diverse_threshold = to_double("loop.diverse_threshold", *v);

    if (auto v = raw.take("surrogate.kernel")) {
        const std::string k = unquote(*v);
        if (k == "squared_exponential") cfg.kernel = XKernel::SquaredExponential;
        else if (k == "matern52") cfg.kernel = XKernel::Matern52;
        else
            throw ConfigError(
                "surrogate.kernel: unknown kernel '" + k +
                "' (expected squared_exponential or matern52)");
    }
    if (auto v = raw.take("surrogate.fit_iters"))
        cfg.fit_iters = static_cast<int>(to_int("surrogate.fit_iters", *v));
    if (auto v = raw.take("surrogate.fit_restarts"))
        cfg.fit_restarts = static_cast<int>(to_int("surrogate.fit_restarts", *v));
    if (auto v = raw.take("surrogate.fit_warm_iters"))
        cfg.fit_warm_iters = static_cast<int>(to_int("surrogate.fit_warm_iters", *v));
    if (auto v = raw.take("surrogate.fit_lr"))
        cfg.fit_lr = to_double("surrogate.fit_lr", *v);
    if (auto v = raw.take("surrogate.fit_subset_cap"))
        cfg.fit_subset_cap = static_cast<int>(to_int("surrogate.fit_subset_cap", *v));

    if (auto v = raw.take("acquisition.n_max_value_samples"))
        cfg.n_max_value_samples =
            static_cast<int>(to_int("acquisition.n_max_value_samples", *v));
    if (auto v = raw.take("acquisition.candidate_pool_size"))
        cfg.candidate_pool_size =
            static_cast<int>(to_int("acquisition.candidate_pool_size", *v));
    if (auto v = raw.take("acquisition.enumerate_cap"))
        cfg.enumerate_cap =
            static_cast<std::uint64_t>(to_int("acquisition.enumerate_cap", *v));
    if (auto v = raw.take("acquisition.gibbon_batch_term"))
        cfg.gibbon_batch_term = to_bool("acquisition.gibbon_batch_term", *v);

    if (auto v = raw.take("policy.hidden"))
        cfg.hidden = static_cast<int>(to_int("policy.hidden", *v));
    if (auto v = raw.take("policy.trajectories_per_round"))
        cfg.trajectories_per_round =
            static_cast<int>(to_int("policy.trajectories_per_round", *v));
    if (auto v = raw.take("policy.minibatch"))
        cfg.minibatch = static_cast<int>(to_int("policy.minibatch", *v));
    if (auto v = raw.take("policy.epsilon"))
        cfg.epsilon = to_double("policy.epsilon", *v);
    if (auto v = raw.take("policy.lr")) cfg.lr = to_double("policy.lr", *v);
    if (auto v = raw.take("policy.lr_logz"))
        cfg.lr_logz = to_double("policy.lr_logz", *v);
    if (auto v = raw.take("policy.leaky_slope"))
        cfg.leaky_slope = to_double("policy.leaky_slope", *v);
    if (auto v = raw.take("policy.reward_exponent"))
        cfg.reward_exponent = to_double("policy.reward_exponent", *v);

    cfg.beta = def.beta;
    if (auto v = raw.take("reward.beta")) cfg.beta = to_double("reward.beta", *v);
    cfg.rho = def.rho;
    if (auto v = raw.take("reward.rho")) cfg.rho = to_double("reward.rho", *v);

    if (auto v = raw.take("output.dir")) cfg.out_dir = unquote(*v);

    const auto leftovers = raw.unconsumed();
    if (!leftovers.empty()) {
        std::string msg = "unknown config key(s):";
        for (const auto& k : leftovers) msg += " " + k;
        throw ConfigError(msg);
    }

    // Validation beyond types.
    if (cfg.epsilon < 0.0 || cfg.epsilon > 1.0)
        throw ConfigError("policy.epsilon must lie in [0, 1]");
    if (cfg.batch_size < 1) throw ConfigError("loop.batch_size must be >= 1");
    if (cfg.top_k < 1) throw ConfigError("loop.top_k must be >= 1");
    if (cfg.gamma < 0.0) throw ConfigError("loop.gamma must be >= 0");
    if (cfg.diverse_threshold < 0.0 || cfg.diverse_threshold > 1.0)
        throw ConfigError("loop.diverse_threshold must lie in [0, 1]");
    const int want_m = cfg.task_name == "sequence_toy" ? 2 : 3;
    if (static_cast<int>(cfg.costs.size()) != want_m)
        throw ConfigError("oracles.costs: expected " + std::to_string(want_m) +
                          " entries for task " + cfg.task_name);
    for (std::size_t i = 0; i < cfg.costs.size(); ++i) {
        if (cfg.costs[i].micros() <= 0)
            throw ConfigError("oracles.costs: entries must be positive");
        if (i > 0 && cfg.costs[i] < cfg.costs[i - 1])
            throw ConfigError("oracles.costs: entries must be non-decreasing");
        if (i > 0 && cfg.costs[i] == cfg.costs[i - 1])
            std::fprintf(stderr,
                         "warning: oracle costs %s and %s are equal "
                         "(degenerate cost ratio)\n",
                         cfg.costs[i - 1].str().c_str(), cfg.costs[i].str().c_str());
    }
    if (static_cast<int>(cfg.init_counts.size()) != want_m)
        throw ConfigError("loop.init_counts: expected " + std::to_string(want_m) +
                          " entries for task " + cfg.task_name);
    return cfg;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_toml_text(
    const std::string& text, const std::vector<std::string>& overrides) {
    RawConfig raw = parse_toml(text);
    apply_overrides(raw, overrides);
    return resolve(std::move(raw));
}

ExperimentConfig ExperimentConfig::from_json_text(
    const std::string& text, const std::vector<std::string>& overrides) {
    RawConfig raw = parse_json(text);
    apply_overrides(raw, overrides);
    return resolve(std::move(raw));
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path,
                                        const std::vector<std::string>& overrides) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    if (path.extension() == ".json") return from_json_text(buffer.str(), overrides);
    return from_toml_text(buffer.str(), overrides);
}

std::string ExperimentConfig::to_json() const {
    nlohmann::json j;
    j["task"] = {{"name", task_name},
                 {"grid_side", grid_side},
                 {"seq_length", seq_length}};
    std::vector<std::string> cost_texts;
    for (const auto& c : costs) cost_texts.push_back(c.str());
    j["oracles"] = {{"costs", cost_texts}};
    j["loop"] = {{"sampler", to_string(sampler)},
                 {"gamma", gamma},
                 {"batch_size", batch_size},
                 {"pool_size", pool_size},
                 {"top_k", top_k},
                 {"init_counts", init_counts},
                 {"seed", seed},
                 {"max_rounds", max_rounds},
                 {"count_init_budget", count_init_budget},
                 {"save_round_snapshots", save_round_snapshots},
                 {"diverse_threshold", diverse_threshold}};
    j["surrogate"] = {{"kernel", kernel == XKernel::SquaredExponential
                                     ? "squared_exponential"
                                     : "matern52"},
                      {"fit_iters", fit_iters},
                      {"fit_restarts", fit_restarts},
                      {"fit_warm_iters", fit_warm_iters},
                      {"fit_lr", fit_lr},
                      {"fit_subset_cap", fit_subset_cap}};
    j["acquisition"] = {{"n_max_value_samples", n_max_value_samples},
                        {"candidate_pool_size", candidate_pool_size},
                        {"enumerate_cap", enumerate_cap},
                        {"gibbon_batch_term", gibbon_batch_term}};
    j["policy"] = {{"hidden", hidden},
                   {"trajectories_per_round", trajectories_per_round},
                   {"minibatch", minibatch},
                   {"epsilon", epsilon},
                   {"lr", lr},
                   {"lr_logz", lr_logz},
                   {"leaky_slope", leaky_slope},
                   {"reward_exponent", reward_exponent}};
    j["reward"] = {{"beta", beta}, {"rho", rho}};
    j["output"] = {{"dir", out_dir}};
    return j.dump(2);
}

Task ExperimentConfig::make_task() const {
    Task task;
    task.name = task_name;
    if (task_name == "branin") {
        task.env_spec = EnvSpec{PayloadKind::Grid, 2, grid_side, 4, 8, 3, true};
        task.oracles = make_branin_oracles(grid_side, costs);
        const double denom = grid_side > 1 ? grid_side - 1.0 : 1.0;
        task.gp_features = [denom](const std::vector<int>& p) {
            Eigen::VectorXd x(p.size());
            for (std::size_t i = 0; i < p.size(); ++i) x[i] = p[i] / denom;
            return x;
        };
        task.feature_dim = 2;
        task.similarity = SimilarityMetric{PayloadKind::Grid, grid_side, 2};
    } else if (task_name == "hartmann6") {
        task.env_spec = EnvSpec{PayloadKind::Grid, 6, grid_side, 4, 8, 3, true};
        task.oracles = make_hartmann6_oracles(grid_side, costs);
        const double denom = grid_side > 1 ? grid_side - 1.0 : 1.0;
        task.gp_features = [denom](const std::vector<int>& p) {
            Eigen::VectorXd x(p.size());
            for (std::size_t i = 0; i < p.size(); ++i) x[i] = p[i] / denom;
            return x;
        };
        task.feature_dim = 6;
        task.similarity = SimilarityMetric{PayloadKind::Grid, grid_side, 6};
    } else {
        task.env_spec = EnvSpec{PayloadKind::Sequence, 2, 100, 4, seq_length, 2, true};
        task.oracles = make_sequence_oracles(seq_length, costs);
        const int len = seq_length;
        task.gp_features = [len](const std::vector<int>& p) {
            Eigen::VectorXd x = Eigen::VectorXd::Zero(4 * len);
            for (int i = 0; i < len && i < static_cast<int>(p.size()); ++i)
                x[4 * i + p[i]] = 1.0;
            return x;
        };
        task.feature_dim = 4 * seq_length;
        task.similarity = SimilarityMetric{PayloadKind::Sequence, 0, 0};
    }
    return task;
}

LoopConfig ExperimentConfig::make_loop_config() const {
    LoopConfig lc;
    lc.sampler = sampler;
    lc.batch_size = batch_size;
    lc.pool_size = pool_size;
    lc.top_k = top_k;
    lc.gamma = gamma;
    lc.init_counts = init_counts;
    lc.seed = seed;
    lc.max_rounds = max_rounds;
    lc.count_init_budget = count_init_budget;
    lc.save_round_snapshots = save_round_snapshots;
    lc.diverse_threshold = diverse_threshold;
    lc.policy_hidden = hidden;
    lc.train.trajectories_per_round = trajectories_per_round;
    lc.train.minibatch_size = minibatch;
    lc.train.epsilon = epsilon;
    lc.train.lr_policy = lr;
    lc.train.lr_logz = lr_logz;
    lc.train.leaky_slope = leaky_slope;
    lc.reward_beta = beta;
    lc.reward_rho = rho;
    lc.reward_exponent = reward_exponent;
    lc.surrogate.x_kernel = kernel;
    lc.surrogate.fit_iters = fit_iters;
    lc.surrogate.fit_restarts = fit_restarts;
    lc.surrogate.fit_lr = fit_lr;
    lc.surrogate.fit_subset_cap = fit_subset_cap;
    lc.fit_warm_iters = fit_warm_iters;
    lc.acq.n_max_value_samples = n_max_value_samples;
    lc.acq.candidate_pool_size = candidate_pool_size;
    lc.acq.enumerate_cap = enumerate_cap;
    lc.acq.gibbon_batch_term = gibbon_batch_term;
    return lc;
}

std::vector<AblationRun> run_cost_ablation(
    const ExperimentConfig& base, const std::vector<std::pair<Cost, Cost>>& cost_pairs,
    const std::vector<std::uint64_t>& seeds, const std::filesystem::path& out_root) {
    if (base.costs.size() != 2)
        throw ConfigError("cost ablation requires a two-fidelity task");
    if (cost_pairs.empty()) throw ConfigError("cost ablation: no cost pairs");
    std::vector<AblationRun> runs;
    for (const auto& [low, high] : cost_pairs) {
        for (std::uint64_t seed : seeds) {
            ExperimentConfig cfg = base;
            cfg.costs = {low, high};
            cfg.seed = seed;
            const std::string name =
                "low_" + low.str() + "_high_" + high.str() + "_seed" +
                std::to_string(seed);
            const auto dir = out_root / name;
            cfg.out_dir = dir.string();
            Experiment exp(cfg.make_task(), cfg.make_loop_config(), dir);
            exp.persist_config_json(cfg.to_json());
            exp.run();
            runs.push_back({low, high, seed, dir});
        }
    }
    return runs;
}

}  // namespace mfgfn

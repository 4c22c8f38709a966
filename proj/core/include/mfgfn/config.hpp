#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mfgfn/loop.hpp"

namespace mfgfn {

/// Fully resolved experiment description: task selection plus every loop,
/// surrogate, acquisition, policy and reward knob. Built from a TOML-style
/// config file (or a previously persisted resolved config.json), with
/// defaults applied per task and unknown keys rejected.
struct ExperimentConfig {
    // [task]
    std::string task_name = "branin";  // branin | hartmann6 | sequence_toy
    int grid_side = 0;                 // 0 -> task default (100 / 10)
    int seq_length = 8;
    // [oracles]
    std::vector<Cost> costs;  // empty -> task default
    // [loop]
    SamplerKind sampler = SamplerKind::MfGfn;
    double gamma = 0.0;  // 0 -> task default
    int batch_size = 0;
    int pool_size = 0;
    int top_k = 0;
    std::vector<int> init_counts;
    std::uint64_t seed = 0;
    int max_rounds = 100000;
    bool count_init_budget = false;
    bool save_round_snapshots = true;
    double diverse_threshold = 0.6;
    // [surrogate]
    XKernel kernel = XKernel::SquaredExponential;
    int fit_iters = 200;
    int fit_restarts = 2;
    int fit_warm_iters = 80;
    double fit_lr = 0.05;
    int fit_subset_cap = 512;
    // [acquisition]
    int n_max_value_samples = 10;
    int candidate_pool_size = 256;
    std::uint64_t enumerate_cap = 4096;
    bool gibbon_batch_term = false;
    // [policy]
    int hidden = 128;
    int trajectories_per_round = 2000;
    int minibatch = 64;
    double epsilon = 0.1;
    double lr = 1e-3;
    double lr_logz = 1e-1;
    double leaky_slope = 0.01;
    double reward_exponent = 1.0;
    // [reward]
    double beta = 0.0;  // 0 -> task default
    double rho = 0.0;   // 0 -> task default
    // [output]
    std::string out_dir = "";

    /// Parse a .toml (or resolved .json) config file, apply `key=value`
    /// overrides, fill task defaults and validate. Unknown keys and
    /// malformed values raise ConfigError naming the field.
    static ExperimentConfig load(const std::filesystem::path& path,
                                 const std::vector<std::string>& overrides = {});
    static ExperimentConfig from_toml_text(const std::string& text,
                                           const std::vector<std::string>& overrides = {});
    static ExperimentConfig from_json_text(const std::string& text,
                                           const std::vector<std::string>& overrides = {});

    /// Resolved config as JSON; reloading it reproduces this config exactly.
    std::string to_json() const;

    Task make_task() const;
    LoopConfig make_loop_config() const;
};

/// Per-cost-pair comparative runs of the same two-fidelity experiment with
/// shared seeds (the Fig.-5-style harness). Returns the run directories.
struct AblationRun {
    Cost low_cost;
    Cost high_cost;
    std::uint64_t seed;
    std::filesystem::path dir;
};
std::vector<AblationRun> run_cost_ablation(const ExperimentConfig& base,
                                           const std::vector<std::pair<Cost, Cost>>& cost_pairs,
                                           const std::vector<std::uint64_t>& seeds,
                                           const std::filesystem::path& out_root);

}  // namespace mfgfn

// Command-line front end for the multi-fidelity active-learning toolkit:
// run experiments, sweep oracle costs, plot learning curves, inspect oracles
// and sample from saved policies.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mfgfn/config.hpp"
#include "mfgfn/errors.hpp"
#include "mfgfn/loop.hpp"
#include "mfgfn/svg.hpp"

namespace fs = std::filesystem;
using namespace mfgfn;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingDataError("cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc | std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

std::uint64_t env_seed_fallback(std::uint64_t configured) {
    if (const char* env = std::getenv("MFGFN_SEED")) {
        try {
            return std::stoull(env);
        } catch (...) {
            throw ConfigError("MFGFN_SEED: not an integer");
        }
    }
    return configured;
}

ExperimentConfig load_config(const std::string& path,
                             const std::vector<std::string>& overrides,
                             const std::optional<std::uint64_t>& seed,
                             const std::string& out_dir) {
    ExperimentConfig cfg = ExperimentConfig::load(path, overrides);
    cfg.seed = seed ? *seed : env_seed_fallback(cfg.seed);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (cfg.out_dir.empty())
        cfg.out_dir = "runs/" + cfg.task_name + "_" + to_string(cfg.sampler) +
                      "_seed" + std::to_string(cfg.seed);
    return cfg;
}

int cmd_run(const std::string& config_path, const std::vector<std::string>& overrides,
            std::optional<std::uint64_t> seed, const std::string& out_dir) {
    ExperimentConfig cfg = load_config(config_path, overrides, seed, out_dir);
    Experiment exp(cfg.make_task(), cfg.make_loop_config(), cfg.out_dir);
    exp.persist_config_json(cfg.to_json());
    const auto reports = exp.run();
    std::cout << "run: " << cfg.out_dir << "\n";
    std::cout << "rounds: " << reports.size() << "  spent: " << exp.ledger().spent().str()
              << " / " << exp.budget_cap().str() << "\n";
    std::cout << "dataset top-" << cfg.top_k << " (normalized): "
              << exp.dataset_topk(cfg.top_k) << "\n";
    if (!reports.empty()) {
        const auto& last = reports.back();
        std::cout << "final round mean top-K: " << last.mean_topk
                  << "  diversity: " << last.diversity
                  << "  diverse top-K: " << last.diverse_topk << "\n";
    }
    return kExitOk;
}

std::vector<std::pair<Cost, Cost>> parse_cost_pairs(const std::string& text) {
    std::vector<std::pair<Cost, Cost>> pairs;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw ConfigError("--costs: expected low:high pairs, got '" + item + "'");
        pairs.emplace_back(Cost::parse(item.substr(0, colon)),
                           Cost::parse(item.substr(colon + 1)));
        if (pairs.back().second < pairs.back().first)
            throw ConfigError("--costs: low cost exceeds high cost in '" + item + "'");
        if (pairs.back().first == pairs.back().second)
            std::cerr << "warning: equal-cost pair " << item
                      << " (degenerate cost ratio)\n";
    }
    if (pairs.empty()) throw ConfigError("--costs: no pairs given");
    return pairs;
}

int cmd_ablate(const std::string& config_path,
               const std::vector<std::string>& overrides, const std::string& costs,
               const std::string& seeds_text, std::optional<std::uint64_t> seed,
               const std::string& out_dir) {
    ExperimentConfig base = load_config(config_path, overrides, seed, out_dir);
    const auto pairs = parse_cost_pairs(costs);
    std::vector<std::uint64_t> seeds;
    if (!seeds_text.empty()) {
        std::stringstream ss(seeds_text);
        std::string item;
        while (std::getline(ss, item, ','))
            seeds.push_back(std::stoull(item));
    } else {
        seeds.push_back(base.seed);
    }
    const fs::path root = base.out_dir;
    const auto runs = run_cost_ablation(base, pairs, seeds, root);

    // Comparison table + overlay plot.
    std::string csv = "cost_low,cost_high,seed,round,spent,mean_topK\n";
    std::vector<PlotSeries> series;
    for (const auto& run : runs) {
        PlotSeries s;
        s.label = "low=" + run.low_cost.str() + " seed=" + std::to_string(run.seed);
        std::ifstream in(run.dir / "rounds.csv");
        std::string line;
        std::getline(in, line);  // header
        while (std::getline(in, line)) {
            std::stringstream ls(line);
            std::string round, spent, topk, rest;
            std::getline(ls, round, ',');
            std::getline(ls, spent, ',');
            std::getline(ls, topk, ',');
            csv += run.low_cost.str() + "," + run.high_cost.str() + "," +
                   std::to_string(run.seed) + "," + round + "," + spent + "," + topk +
                   "\n";
            s.x.push_back(std::stod(spent));
            s.y.push_back(std::stod(topk));
        }
        if (!s.x.empty()) series.push_back(std::move(s));
    }
    write_file(root / "ablation.csv", csv);
    write_file(root / "ablation.svg",
               render_line_plot(series, "Cost ablation: " + base.task_name,
                                "cumulative cost", "mean top-K score", true));
    std::cout << "ablation: " << root.string() << " (" << runs.size() << " runs)\n";
    return kExitOk;
}

int cmd_plot(const std::vector<std::string>& run_dirs, const std::string& out_file) {
    std::vector<PlotSeries> series;
    for (const auto& dir : run_dirs) {
        const fs::path csv_path = fs::path(dir) / "rounds.csv";
        if (!fs::exists(csv_path))
            throw MissingDataError("no rounds.csv under " + dir);
        PlotSeries s;
        s.label = fs::path(dir).filename().string();
        if (s.label.empty()) s.label = dir;
        std::ifstream in(csv_path);
        std::string line;
        std::getline(in, line);  // header
        while (std::getline(in, line)) {
            std::stringstream ls(line);
            std::string round, spent, topk;
            std::getline(ls, round, ',');
            std::getline(ls, spent, ',');
            std::getline(ls, topk, ',');
            s.x.push_back(std::stod(spent));
            s.y.push_back(std::stod(topk));
        }
        series.push_back(std::move(s));
    }
    write_file(out_file, render_line_plot(series, "Mean top-K score vs budget",
                                          "cumulative cost", "mean top-K score", true));
    std::cout << "wrote " << out_file << "\n";
    return kExitOk;
}

std::vector<int> parse_point(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
    return out;
}

std::vector<int> parse_seq(const std::string& text) {
    std::vector<int> out;
    for (char ch : text) {
        switch (std::toupper(static_cast<unsigned char>(ch))) {
            case 'A': out.push_back(0); break;
            case 'C': out.push_back(1); break;
            case 'G': out.push_back(2); break;
            case 'T': out.push_back(3); break;
            default:
                throw InvalidTokenError(std::string("unknown base '") + ch + "'");
        }
    }
    return out;
}

std::string seq_to_string(const std::vector<int>& tokens) {
    static const char* bases = "ACGT";
    std::string out;
    for (int t : tokens) out += bases[t];
    return out;
}

int cmd_oracle(const std::string& task, int m, const std::string& point,
               const std::string& seq, int side) {
    OracleSet set;
    std::vector<int> x;
    if (task == "branin") {
        set = make_branin_oracles(side > 0 ? side : 100);
        x = parse_point(point);
    } else if (task == "hartmann6") {
        set = make_hartmann6_oracles(side > 0 ? side : 10);
        x = parse_point(point);
    } else if (task == "sequence_toy") {
        x = parse_seq(seq);
        set = make_sequence_oracles(static_cast<int>(x.size()));
    } else {
        throw ConfigError("--task: unknown task '" + task + "'");
    }
    const double value = set.eval(m, x);
    std::cout << "f_" << m << " = " << value << "\n";
    std::cout << "cost = " << set.costs[m - 1].str() << "\n";
    return kExitOk;
}

int cmd_sample(const std::string& policy_path, int count,
               std::optional<std::uint64_t> seed) {
    const nlohmann::json j = nlohmann::json::parse(read_file(policy_path));
    const auto& je = j.at("env");
    EnvSpec spec;
    spec.kind = je.at("kind") == "grid" ? PayloadKind::Grid : PayloadKind::Sequence;
    spec.grid_dims = je.at("grid_dims").get<int>();
    spec.grid_side = je.at("grid_side").get<int>();
    spec.vocab_size = je.at("vocab_size").get<int>();
    spec.seq_length = je.at("seq_length").get<int>();
    spec.n_fidelities = je.at("n_fidelities").get<int>();
    spec.fidelity_choice = je.at("fidelity_choice").get<bool>();
    Env env(spec);
    PolicyNet net = PolicyNet::from_json(j.at("net").dump());

    Rng rng(seed ? *seed : env_seed_fallback(0));
    const auto pairs = sample_terminal_pairs(net, env, count, rng);
    for (const auto& [payload, m] : pairs) {
        if (spec.kind == PayloadKind::Sequence) {
            std::cout << seq_to_string(payload);
        } else {
            for (std::size_t i = 0; i < payload.size(); ++i)
                std::cout << (i ? "," : "") << payload[i];
        }
        std::cout << "\tm=" << m << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-fidelity active learning with GFlowNet samplers"};
    app.require_subcommand(1);

    std::string config_path, out_dir, costs, seeds_text;
    std::vector<std::string> overrides, run_dirs;
    std::optional<std::uint64_t> seed;
    std::string task = "branin", point, seq, out_file = "plot.svg", policy_path;
    int m = 1, side = 0, count = 10;

    auto* run = app.add_subcommand("run", "Run one active-learning experiment");
    run->add_option("--config", config_path, "Config file (.toml or resolved .json)")
        ->required();
    run->add_option("--seed", seed, "Seed override");
    run->add_option("--out", out_dir, "Output directory override");
    run->add_option("--override", overrides, "Config override key=value");

    auto* ablate = app.add_subcommand("ablate", "Cost-ratio ablation harness");
    ablate->add_option("--config", config_path, "Two-fidelity task config")->required();
    ablate->add_option("--costs", costs, "Comma list of low:high cost pairs")
        ->required();
    ablate->add_option("--seeds", seeds_text, "Comma list of seeds (shared per pair)");
    ablate->add_option("--seed", seed, "Seed override");
    ablate->add_option("--out", out_dir, "Output root directory");
    ablate->add_option("--override", overrides, "Config override key=value");

    auto* plot = app.add_subcommand("plot", "Learning-curve SVG from run directories");
    plot->add_option("dirs", run_dirs, "Run directories with rounds.csv")->required();
    plot->add_option("--out", out_file, "Output SVG file");

    auto* oracle = app.add_subcommand("oracle", "Evaluate one oracle query");
    oracle->add_option("--task", task, "branin | hartmann6 | sequence_toy")->required();
    oracle->add_option("--m", m, "Fidelity index (1-based)")->required();
    oracle->add_option("--point", point, "Grid index list, e.g. 3,4");
    oracle->add_option("--seq", seq, "Sequence letters, e.g. ACGT");
    oracle->add_option("--side", side, "Grid side override");

    auto* sample = app.add_subcommand("sample", "Sample from a saved policy");
    sample->add_option("--policy", policy_path, "policy.json from a run directory")
        ->required();
    sample->add_option("-n,--count", count, "Number of samples");
    sample->add_option("--seed", seed, "Sampling seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, overrides, seed, out_dir);
        if (ablate->parsed())
            return cmd_ablate(config_path, overrides, costs, seeds_text, seed, out_dir);
        if (plot->parsed()) return cmd_plot(run_dirs, out_file);
        if (oracle->parsed()) return cmd_oracle(task, m, point, seq, side);
        if (sample->parsed()) return cmd_sample(policy_path, count, seed);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const DivergenceError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitOk;
}

#include "mfgfn/loop.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>

#include <nlohmann/json.hpp>

#include "mfgfn/errors.hpp"

namespace mfgfn {

namespace {

std::string fmt10(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

void append_line(const std::filesystem::path& file, const std::string& line) {
    std::ofstream out(file, std::ios::app);
    if (!out) throw Error("cannot open " + file.string() + " for writing");
    out << line << "\n";
}

void write_text(const std::filesystem::path& file, const std::string& text) {
    std::ofstream out(file, std::ios::trunc | std::ios::binary);
    if (!out) throw Error("cannot open " + file.string() + " for writing");
    out << text;
}

double quantile_sorted(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) return 0.0;
    const std::size_t idx = static_cast<std::size_t>(
        p * static_cast<double>(sorted.size() - 1) + 0.5);
    return sorted[std::min(idx, sorted.size() - 1)];
}

nlohmann::json env_spec_json(const EnvSpec& spec) {
    return {{"kind", spec.kind == PayloadKind::Grid ? "grid" : "sequence"},
            {"grid_dims", spec.grid_dims},
            {"grid_side", spec.grid_side},
            {"vocab_size", spec.vocab_size},
            {"seq_length", spec.seq_length},
            {"n_fidelities", spec.n_fidelities},
            {"fidelity_choice", spec.fidelity_choice}};
}

}  // namespace

std::string to_string(SamplerKind kind) {
    switch (kind) {
        case SamplerKind::MfGfn: return "mf_gfn";
        case SamplerKind::SfGfn: return "sf_gfn";
        case SamplerKind::RandomFidGfn: return "random_fid_gfn";
        case SamplerKind::Random: return "random";
    }
    return "mf_gfn";
}

SamplerKind sampler_from_string(const std::string& name) {
    if (name == "mf_gfn") return SamplerKind::MfGfn;
    if (name == "sf_gfn") return SamplerKind::SfGfn;
    if (name == "random_fid_gfn") return SamplerKind::RandomFidGfn;
    if (name == "random") return SamplerKind::Random;
    throw ConfigError("loop.sampler: unknown sampler '" + name +
                      "' (expected mf_gfn, sf_gfn, random_fid_gfn or random)");
}

ScoreNormalizer ScoreNormalizer::from_dataset(const AnnotatedDataset& dataset,
                                              int sign) {
    ScoreNormalizer n;
    n.sign = sign;
    if (dataset.empty()) return n;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& a : dataset.annotations()) {
        lo = std::min(lo, sign * a.y);
        hi = std::max(hi, sign * a.y);
    }
    n.a = lo;
    n.b = hi > lo ? hi : lo + 1.0;
    return n;
}

AnnotatedDataset Experiment::init_dataset(const Task& task,
                                          const std::vector<int>& counts,
                                          std::uint64_t seed) {
    const int M = task.oracles.fidelity_count();
    if (!counts.empty() && static_cast<int>(counts.size()) != M)
        throw ConfigError("loop.init_counts: expected " + std::to_string(M) +
                          " entries for task " + task.name);
    AnnotatedDataset dataset;
    Env env(task.env_spec);
    Rng rng = Rng(seed).fork(0x1d1);
    std::vector<std::pair<std::vector<int>, int>> queries;
    for (int m = 1; m <= M && !counts.empty(); ++m) {
        int placed = 0;
        int attempts = 0;
        const int want = counts[m - 1];
        std::map<std::vector<int>, bool> used;
        while (placed < want) {
            if (++attempts > 1000 * want + 1000)
                throw Error("init_dataset: cannot draw enough distinct objects");
            auto payload = env.random_payload(rng);
            if (used.count(payload)) continue;
            used[payload] = true;
            queries.emplace_back(std::move(payload), m);
            ++placed;
        }
    }
    auto [annotations, total] = evaluate_batch(task.oracles, queries);
    for (auto& a : annotations) {
        a.round = 0;
        dataset.add(std::move(a));
    }
    return dataset;
}

Experiment::Experiment(Task task, LoopConfig config, std::filesystem::path out_dir)
    : task_(std::move(task)),
      config_(std::move(config)),
      out_dir_(std::move(out_dir)),
      env_pool_(task_.env_spec),
      env_policy_([&] {
          EnvSpec sp = task_.env_spec;
          if (config_.sampler != SamplerKind::MfGfn) sp.fidelity_choice = false;
          return Env(sp);
      }()),
      ledger_(Cost::from_micros(static_cast<std::int64_t>(std::llround(
          config_.gamma *
          static_cast<double>(task_.oracles.costs.back().micros()))))),
      rng_root_(config_.seed) {
    task_.oracles.validate();
    if (config_.pool_size <= 0) config_.pool_size = 10 * config_.batch_size;
    dataset_ = init_dataset(task_, config_.init_counts, config_.seed);
    initial_cost_ = dataset_.total_cost();
    if (config_.count_init_budget) ledger_.charge(initial_cost_, 0);
    normalizer_ = ScoreNormalizer::from_dataset(dataset_, task_.oracles.score_sign);

    if (!out_dir_.empty()) {
        std::filesystem::create_directories(out_dir_);
        write_text(out_dir_ / "rounds.csv",
                   "round,spent,mean_topK,diversity,diverse_topK\n");
        write_text(out_dir_ / "acquisition.csv",
                   "round,fstar_samples,score_min,score_q25,score_med,score_q75,"
                   "score_max\n");
    }
}

Eigen::VectorXd Experiment::features_of(const std::vector<int>& payload) const {
    return task_.gp_features(payload);
}

void Experiment::fit_surrogate(int round) {
    const int n = static_cast<int>(dataset_.size());
    if (n < 1) throw Error("run_round: empty dataset, cannot fit surrogate");
    const int M = task_.oracles.fidelity_count();
    Eigen::MatrixXd X(n, task_.feature_dim);
    Eigen::VectorXd m_norm(n), u(n);
    for (int i = 0; i < n; ++i) {
        const Annotation& a = dataset_.annotations()[i];
        X.row(i) = features_of(a.x).transpose();
        m_norm[i] = fidelity_to_norm(a.m, M);
        u[i] = normalizer_(a.y);
    }
    SurrogateConfig sc = config_.surrogate;
    if (model_) {
        sc.initial_params = model_->params();
        sc.fit_iters = config_.fit_warm_iters;
        sc.fit_restarts = 0;
    }
    model_ = std::make_unique<MfGpModel>(
        MfGpModel::fit(X, m_norm, u, sc, rng_root_.fork(1000 + round).seed()));
}

RoundReport Experiment::run_round() {
    if (ledger_.exhausted())
        throw Error("run_round: budget exhausted");
    if (round_ > config_.max_rounds)
        throw Error("run_round: max_rounds reached");
    const int j = round_++;
    const int M = task_.oracles.fidelity_count();

    // 1. Fit the surrogate on everything annotated so far.
    fit_surrogate(j);

    // 2. Fresh max-value samples for this round's acquisition.
    Rng rng_mes = rng_root_.fork(2000 + j);
    max_samples_ = std::make_unique<MaxValueSamples>(sample_max_values(
        *model_, env_pool_, [this](const std::vector<int>& p) { return features_of(p); },
        config_.acq, rng_mes));

    // 3. Train the sampler (GFlowNet variants only).
    const RewardTransform transform{config_.reward_beta, config_.reward_rho, j,
                                    config_.reward_exponent};
    Rng rng_train = rng_root_.fork(3000 + j);
    Rng rng_reward = rng_root_.fork(6000 + j);
    if (config_.sampler != SamplerKind::Random) {
        if (!net_)
            net_ = std::make_unique<PolicyNet>(
                env_policy_.encoding_size(), config_.policy_hidden,
                env_policy_.action_count(), rng_root_.fork(42).seed(),
                config_.train.leaky_slope);
        const BatchRewardFn reward_fn =
            [&](const std::vector<std::pair<std::vector<int>, int>>& terminals) {
                std::vector<AcqCandidate> cands(terminals.size());
                for (std::size_t i = 0; i < terminals.size(); ++i) {
                    cands[i].x = features_of(terminals[i].first);
                    cands[i].m = config_.sampler == SamplerKind::RandomFidGfn
                                     ? env_pool_.random_fidelity(rng_reward)
                                     : terminals[i].second;
                }
                auto alphas =
                    score_batch(*model_, cands, *max_samples_, task_.oracles.costs);
                std::vector<double> rewards(alphas.size());
                for (std::size_t i = 0; i < alphas.size(); ++i)
                    rewards[i] = reward_transform(alphas[i], transform);
                return rewards;
            };
        train_batched(*net_, env_policy_, reward_fn, config_.train, rng_train);
    }

    // 4. Propose N candidate (x, m) pairs.
    Rng rng_cand = rng_root_.fork(4000 + j);
    std::vector<std::pair<std::vector<int>, int>> proposals;
    proposals.reserve(config_.pool_size);
    if (config_.sampler == SamplerKind::Random) {
        for (int i = 0; i < config_.pool_size; ++i)
            proposals.emplace_back(env_pool_.random_payload(rng_cand),
                                   env_pool_.random_fidelity(rng_cand));
    } else {
        proposals =
            sample_terminal_pairs(*net_, env_policy_, config_.pool_size, rng_cand);
        if (config_.sampler == SamplerKind::RandomFidGfn)
            for (auto& [payload, m] : proposals)
                m = env_pool_.random_fidelity(rng_cand);
    }

    // Deduplicate (x, m) pairs, preserving sampling order.
    std::vector<std::pair<std::vector<int>, int>> candidates;
    candidates.reserve(proposals.size());
    {
        std::map<std::pair<std::vector<int>, int>, bool> seen;
        for (auto& p : proposals) {
            if (seen.emplace(p, true).second) candidates.push_back(std::move(p));
        }
    }

    // 5. Acquisition scores for every candidate.
    std::vector<AcqCandidate> acq_cands(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        acq_cands[i].x = features_of(candidates[i].first);
        acq_cands[i].m = candidates[i].second;
    }
    const std::vector<double> acq =
        score_batch(*model_, acq_cands, *max_samples_, task_.oracles.costs);
    {
        std::vector<double> sorted = acq;
        std::sort(sorted.begin(), sorted.end());
        last_score_quantiles_ = {quantile_sorted(sorted, 0.0),
                                 quantile_sorted(sorted, 0.25),
                                 quantile_sorted(sorted, 0.5),
                                 quantile_sorted(sorted, 0.75),
                                 quantile_sorted(sorted, 1.0)};
    }

    // 6. Round metrics over unique objects (out-of-band f_M scoring).
    std::vector<ScoredItem> items;
    {
        std::map<std::vector<int>, std::size_t> best;
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            const auto& payload = candidates[i].first;
            auto it = best.find(payload);
            if (it == best.end()) {
                best.emplace(payload, items.size());
                items.push_back({payload,
                                 normalizer_(task_.oracles.eval(M, payload)),
                                 acq[i]});
            } else if (acq[i] > items[it->second].acq) {
                items[it->second].acq = acq[i];
            }
        }
    }
    RoundReport report;
    report.round = j;
    report.mean_topk = mean_topk(items, config_.top_k, SelectBy::Acquisition);
    report.mean_topk_by_score = mean_topk(items, config_.top_k, SelectBy::Score);
    {
        std::vector<std::size_t> order(items.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return items[a].acq > items[b].acq;
        });
        const int kk = std::min<int>(config_.top_k, static_cast<int>(items.size()));
        std::vector<std::vector<int>> top_objects(kk);
        for (int i = 0; i < kk; ++i) top_objects[i] = items[order[i]].x;
        report.diversity =
            kk >= 2 ? pairwise_diversity(top_objects, task_.similarity) : 0.0;
    }
    {
        const auto selected = diverse_topk(items, config_.top_k,
                                           config_.diverse_threshold, task_.similarity);
        double sum = 0.0;
        for (const auto& s : selected) sum += s.score;
        report.diverse_topk = selected.empty() ? 0.0 : sum / selected.size();
    }

    // 7. Select the top-B unseen pairs and query the oracles.
    std::vector<std::size_t> rank(candidates.size());
    std::iota(rank.begin(), rank.end(), std::size_t{0});
    std::stable_sort(rank.begin(), rank.end(),
                     [&](std::size_t a, std::size_t b) { return acq[a] > acq[b]; });
    std::vector<std::pair<std::vector<int>, int>> selected;
    selected.reserve(config_.batch_size);
    for (std::size_t r : rank) {
        if (static_cast<int>(selected.size()) >= config_.batch_size) break;
        if (config_.sampler == SamplerKind::SfGfn && candidates[r].second != M)
            throw Error("sf_gfn proposed a low-fidelity query");  // unreachable
        if (dataset_.contains(candidates[r].first, candidates[r].second)) continue;
        selected.push_back(candidates[r]);
    }
    auto [annotations, batch_cost] = evaluate_batch(task_.oracles, selected);
    for (auto& a : annotations) {
        a.round = j;
        dataset_.add(std::move(a));
    }
    ledger_.charge(batch_cost, j);
    report.queries_issued = static_cast<int>(selected.size());
    report.spent = ledger_.spent();

    reports_.push_back(report);
    write_round_files(report);
    return report;
}

void Experiment::write_round_files(const RoundReport& report) {
    if (out_dir_.empty()) return;
    append_line(out_dir_ / "rounds.csv",
                std::to_string(report.round) + "," + report.spent.str() + "," +
                    fmt10(report.mean_topk) + "," + fmt10(report.diversity) + "," +
                    fmt10(report.diverse_topk));
    {
        std::string samples;
        for (std::size_t i = 0; i < max_samples_->values.size(); ++i) {
            if (i) samples += ";";
            samples += fmt10(max_samples_->values[i]);
        }
        // score histogram summary over the last candidate scoring
        append_line(out_dir_ / "acquisition.csv",
                    std::to_string(report.round) + "," + samples + "," +
                        fmt10(last_score_quantiles_[0]) + "," +
                        fmt10(last_score_quantiles_[1]) + "," +
                        fmt10(last_score_quantiles_[2]) + "," +
                        fmt10(last_score_quantiles_[3]) + "," +
                        fmt10(last_score_quantiles_[4]));
    }
    if (config_.save_round_snapshots) {
        char name[32];
        std::snprintf(name, sizeof(name), "round_%04d", report.round);
        const auto dir = out_dir_ / "rounds" / name;
        std::filesystem::create_directories(dir);
        write_text(dir / "dataset.json", dataset_.to_json());
        if (net_) {
            nlohmann::json j;
            j["env"] = env_spec_json(env_policy_.spec());
            j["net"] = nlohmann::json::parse(net_->to_json());
            write_text(dir / "policy.json", j.dump());
        }
    }
}

std::vector<RoundReport> Experiment::run() {
    try {
        while (!ledger_.exhausted() && round_ <= config_.max_rounds) run_round();
    } catch (const NumericalError&) {
        write_summary();
        throw;
    }
    write_summary();
    return reports_;
}

double Experiment::dataset_topk(int k) const {
    const int M = task_.oracles.fidelity_count();
    std::vector<ScoredItem> items;
    std::map<std::vector<int>, bool> seen;
    for (const auto& a : dataset_.annotations()) {
        if (!seen.emplace(a.x, true).second) continue;
        items.push_back({a.x, normalizer_(task_.oracles.eval(M, a.x)), 0.0});
    }
    if (items.empty()) return 0.0;
    return mean_topk(items, k, SelectBy::Score);
}

void Experiment::persist_config_json(const std::string& resolved_json) const {
    if (out_dir_.empty()) return;
    std::filesystem::create_directories(out_dir_);
    write_text(out_dir_ / "config.json", resolved_json);
}

void Experiment::write_summary() const {
    if (out_dir_.empty()) return;
    nlohmann::json j;
    j["task"] = task_.name;
    j["sampler"] = to_string(config_.sampler);
    j["seed"] = config_.seed;
    j["rounds"] = reports_.size();
    j["budget"] = {{"cap", ledger_.cap().value()},
                   {"cap_micros", ledger_.cap().micros()},
                   {"spent", ledger_.spent().value()},
                   {"spent_micros", ledger_.spent().micros()},
                   {"initial_cost", initial_cost_.value()},
                   {"initial_cost_micros", initial_cost_.micros()},
                   {"count_init_budget", config_.count_init_budget}};
    j["normalizer"] = {{"a", normalizer_.a}, {"b", normalizer_.b},
                       {"sign", normalizer_.sign}};
    j["dataset"] = {{"size", dataset_.size()},
                    {"topk", dataset_topk(config_.top_k)},
                    {"total_cost_micros", dataset_.total_cost().micros()}};
    if (!reports_.empty()) {
        const RoundReport& last = reports_.back();
        j["final_round"] = {{"round", last.round},
                            {"mean_topk", last.mean_topk},
                            {"mean_topk_by_score", last.mean_topk_by_score},
                            {"diversity", last.diversity},
                            {"diverse_topk", last.diverse_topk}};
    }
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : reports_) {
        rows.push_back({{"round", r.round},
                        {"spent", r.spent.value()},
                        {"spent_micros", r.spent.micros()},
                        {"mean_topk", r.mean_topk},
                        {"mean_topk_by_score", r.mean_topk_by_score},
                        {"diversity", r.diversity},
                        {"diverse_topk", r.diverse_topk},
                        {"queries", r.queries_issued}});
    }
    j["reports"] = rows;
    write_text(out_dir_ / "summary.json", j.dump(2));
    write_text(out_dir_ / "dataset.json", dataset_.to_json());
    if (net_) {
        nlohmann::json p;
        p["env"] = env_spec_json(env_policy_.spec());
        p["net"] = nlohmann::json::parse(net_->to_json());
        write_text(out_dir_ / "policy.json", p.dump());
    }
}

}  // namespace mfgfn

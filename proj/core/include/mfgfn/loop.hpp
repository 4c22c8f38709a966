#pragma once

#include <Eigen/Core>
#include <array>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mfgfn/acquisition.hpp"
#include "mfgfn/cost.hpp"
#include "mfgfn/dataset.hpp"
#include "mfgfn/env.hpp"
#include "mfgfn/metrics.hpp"
#include "mfgfn/oracles.hpp"
#include "mfgfn/policy.hpp"
#include "mfgfn/surrogate.hpp"

namespace mfgfn {

enum class SamplerKind { MfGfn, SfGfn, RandomFidGfn, Random };

std::string to_string(SamplerKind kind);
SamplerKind sampler_from_string(const std::string& name);

/// Everything that defines one benchmark problem: the environment shape, the
/// oracle family, the surrogate featurisation and the similarity metric.
struct Task {
    std::string name;
    EnvSpec env_spec;  // multi-fidelity variant; samplers derive their own
    OracleSet oracles;
    std::function<Eigen::VectorXd(const std::vector<int>&)> gp_features;
    int feature_dim = 0;
    SimilarityMetric similarity;
};

/// Affine score scale fixed from the initial dataset: u = (sign*y - a)/(b - a).
/// All surrogate fitting, rewards and reported metrics use u units.
struct ScoreNormalizer {
    double a = 0.0;
    double b = 1.0;
    int sign = +1;

    double operator()(double y_raw) const {
        return (sign * y_raw - a) / (b - a);
    }

    static ScoreNormalizer from_dataset(const AnnotatedDataset& dataset, int sign);
};

struct RoundReport {
    int round = 0;
    Cost spent;               // cumulative ledger spend after this round
    double mean_topk = 0.0;   // top-K candidates by acquisition, scored by f_M
    double diversity = 0.0;   // pairwise diversity of that top-K set
    double diverse_topk = 0.0;  // diversity-constrained top-K mean score
    // extra diagnostics carried into summary.json
    double mean_topk_by_score = 0.0;
    int queries_issued = 0;
};

struct LoopConfig {
    SamplerKind sampler = SamplerKind::MfGfn;
    int batch_size = 30;                  // B oracle queries per round
    int pool_size = 0;                    // N sampled candidates; 0 -> 10*B
    int top_k = 50;                       // K
    double gamma = 300.0;                 // budget = gamma * lambda_M
    std::vector<int> init_counts;         // per-fidelity initial annotations
    std::uint64_t seed = 0;
    int max_rounds = 100000;
    bool count_init_budget = false;
    bool save_round_snapshots = true;
    double diverse_threshold = 0.6;

    int policy_hidden = 128;
    TrainConfig train;
    double reward_beta = 1.0;
    double reward_rho = 1.0;
    double reward_exponent = 1.0;

    SurrogateConfig surrogate;
    int fit_warm_iters = 80;  // later rounds warm-start from prior params
    AcqConfig acq;
};

/// The active-learning orchestrator: fit surrogate, train the sampler,
/// propose N, select top-B, query oracles, extend the dataset and ledger.
/// Writes rounds.csv / acquisition.csv / snapshots under out_dir (pass an
/// empty path to keep everything in memory).
class Experiment {
public:
    Experiment(Task task, LoopConfig config, std::filesystem::path out_dir = {});

    /// Uniform-random objects annotated by the specified oracles;
    /// counts[i] draws for fidelity i+1.
    static AnnotatedDataset init_dataset(const Task& task,
                                         const std::vector<int>& counts,
                                         std::uint64_t seed);

    /// One Algorithm-1 iteration. Pre: budget not exhausted.
    RoundReport run_round();

    /// Loop until the budget cap or max_rounds; writes the summary. Partial
    /// logs survive numerical aborts (rows are flushed per round).
    std::vector<RoundReport> run();

    /// Persist a resolved-config JSON string as config.json in the run dir.
    void persist_config_json(const std::string& resolved_json) const;

    const AnnotatedDataset& dataset() const { return dataset_; }
    const BudgetLedger& ledger() const { return ledger_; }
    const ScoreNormalizer& normalizer() const { return normalizer_; }
    const Task& task() const { return task_; }
    const LoopConfig& config() const { return config_; }
    Cost initial_cost() const { return initial_cost_; }
    Cost budget_cap() const { return ledger_.cap(); }
    int rounds_completed() const { return round_ - 1; }
    const MfGpModel* model() const { return model_ ? model_.get() : nullptr; }
    const PolicyNet* policy() const { return net_ ? net_.get() : nullptr; }
    const std::vector<RoundReport>& reports() const { return reports_; }

    /// Dataset-level mean top-K under f_M (out-of-band scoring), normalized.
    double dataset_topk(int k) const;

private:
    Eigen::VectorXd features_of(const std::vector<int>& payload) const;
    void fit_surrogate(int round);
    double candidate_reward_alpha(const Eigen::VectorXd& x, int m) const;
    void write_round_files(const RoundReport& report);
    void write_summary() const;

    Task task_;
    LoopConfig config_;
    std::filesystem::path out_dir_;
    Env env_pool_;     // payload space only (for pools / random sampler)
    Env env_policy_;   // sampler-specific fidelity mode
    AnnotatedDataset dataset_;
    BudgetLedger ledger_;
    ScoreNormalizer normalizer_;
    Cost initial_cost_;
    Rng rng_root_;
    std::unique_ptr<MfGpModel> model_;
    std::unique_ptr<PolicyNet> net_;
    std::unique_ptr<MaxValueSamples> max_samples_;
    std::array<double, 5> last_score_quantiles_{};
    int round_ = 1;
    std::vector<RoundReport> reports_;
};

}  // namespace mfgfn

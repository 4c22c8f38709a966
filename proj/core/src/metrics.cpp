#include "mfgfn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mfgfn/errors.hpp"

namespace mfgfn {

double SimilarityMetric::identity(const std::vector<int>& a,
                                  const std::vector<int>& b) const {
    if (a.size() != b.size())
        throw Error("similarity: objects must have equal length");
    if (kind == PayloadKind::Sequence) {
        if (a.empty()) return 1.0;
        int same = 0;
        for (std::size_t i = 0; i < a.size(); ++i) same += a[i] == b[i];
        return static_cast<double>(same) / static_cast<double>(a.size());
    }
    double sq = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = static_cast<double>(a[i] - b[i]);
        sq += d * d;
    }
    const double diagonal =
        std::sqrt(static_cast<double>(grid_dims)) * static_cast<double>(grid_side - 1);
    if (diagonal <= 0.0) return 1.0;
    return 1.0 - std::sqrt(sq) / diagonal;
}

namespace {

std::vector<std::size_t> ranked_order(std::span<const ScoredItem> items, SelectBy by) {
    std::vector<std::size_t> order(items.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        const double ki = by == SelectBy::Score ? items[i].score : items[i].acq;
        const double kj = by == SelectBy::Score ? items[j].score : items[j].acq;
        return ki > kj;
    });
    return order;
}

}  // namespace

double mean_topk(std::span<const ScoredItem> items, int k, SelectBy by) {
    if (items.empty()) throw EmptySetError("mean_topk: no items");
    const int kk = std::min<int>(k, static_cast<int>(items.size()));
    if (kk < 1) throw EmptySetError("mean_topk: K must be >= 1");
    const auto order = ranked_order(items, by);
    double sum = 0.0;
    for (int i = 0; i < kk; ++i) sum += items[order[i]].score;
    return sum / static_cast<double>(kk);
}

double pairwise_diversity(std::span<const std::vector<int>> objects,
                          const SimilarityMetric& metric) {
    const std::size_t n = objects.size();
    if (n < 2) throw TooFewError("pairwise_diversity: need at least two objects");
    double total = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            total += 1.0 - metric.identity(objects[i], objects[j]);
            ++pairs;
        }
    }
    return total / static_cast<double>(pairs);
}

std::vector<ScoredItem> diverse_topk(std::span<const ScoredItem> items, int k,
                                     double threshold,
                                     const SimilarityMetric& metric) {
    std::vector<ScoredItem> selected;
    if (items.empty() || k < 1) return selected;
    const auto order = ranked_order(items, SelectBy::Score);
    for (std::size_t idx : order) {
        if (static_cast<int>(selected.size()) >= k) break;
        const auto& cand = items[idx];
        bool ok = true;
        for (const auto& s : selected) {
            if (metric.identity(cand.x, s.x) > threshold) {
                ok = false;
                break;
            }
        }
        if (ok) selected.push_back(cand);
    }
    return selected;
}

}  // namespace mfgfn

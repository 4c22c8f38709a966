#include "mfgfn/dataset.hpp"

#include <nlohmann/json.hpp>

namespace mfgfn {

bool AnnotatedDataset::contains(const std::vector<int>& x, int m) const {
    return index_.count({x, m}) > 0;
}

bool AnnotatedDataset::add(Annotation annotation) {
    auto key = std::make_pair(annotation.x, annotation.m);
    if (index_.count(key)) return false;
    index_.emplace(std::move(key), annotations_.size());
    annotations_.push_back(std::move(annotation));
    return true;
}

Cost AnnotatedDataset::total_cost() const {
    Cost total;
    for (const auto& a : annotations_) total += a.cost;
    return total;
}

std::string AnnotatedDataset::to_json() const {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& a : annotations_) {
        j.push_back({{"x", a.x},
                     {"y", a.y},
                     {"m", a.m},
                     {"cost_micros", a.cost.micros()},
                     {"round", a.round}});
    }
    return nlohmann::json{{"annotations", j}}.dump();
}

AnnotatedDataset AnnotatedDataset::from_json(const std::string& text) {
    AnnotatedDataset ds;
    const nlohmann::json j = nlohmann::json::parse(text);
    for (const auto& item : j.at("annotations")) {
        Annotation a;
        a.x = item.at("x").get<std::vector<int>>();
        a.y = item.at("y").get<double>();
        a.m = item.at("m").get<int>();
        a.cost = Cost::from_micros(item.at("cost_micros").get<std::int64_t>());
        a.round = item.at("round").get<int>();
        ds.add(std::move(a));
    }
    return ds;
}

void BudgetLedger::charge(Cost amount, int round) {
    spent_ += amount;
    history_.emplace_back(round, amount);
}

}  // namespace mfgfn

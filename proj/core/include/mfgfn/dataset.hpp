#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mfgfn/cost.hpp"
#include "mfgfn/oracles.hpp"

namespace mfgfn {

/// Annotated triples (x, y, m) with a duplicate index on (x, m).
class AnnotatedDataset {
public:
    bool contains(const std::vector<int>& x, int m) const;

    /// Adds an annotation; returns false (and ignores it) for duplicates.
    bool add(Annotation annotation);

    const std::vector<Annotation>& annotations() const { return annotations_; }
    std::size_t size() const { return annotations_.size(); }
    bool empty() const { return annotations_.empty(); }

    /// Exact sum of the stored annotations' costs.
    Cost total_cost() const;

    std::string to_json() const;
    static AnnotatedDataset from_json(const std::string& text);

private:
    std::vector<Annotation> annotations_;
    std::map<std::pair<std::vector<int>, int>, std::size_t> index_;
};

/// Exact budget accounting for the active-learning loop. Only costs charged
/// through the ledger count toward the cap.
class BudgetLedger {
public:
    explicit BudgetLedger(Cost cap) : cap_(cap) {}

    void charge(Cost amount, int round);

    Cost spent() const { return spent_; }
    Cost cap() const { return cap_; }
    bool exhausted() const { return spent_ >= cap_; }
    const std::vector<std::pair<int, Cost>>& history() const { return history_; }

private:
    Cost spent_;
    Cost cap_;
    std::vector<std::pair<int, Cost>> history_;
};

}  // namespace mfgfn

#pragma once
#include <vector>

#include "cellfit/csv.hpp"

namespace cellfit {

// scores[r][d] = predicted success probability of recipient r with donor d.
// Both sides rank the other strictly by score (descending, then lower index)
// so a shared score matrix induces aligned preferences.
struct MatchResult {
    std::vector<int> donor_of;             // per recipient; -1 = unmatched
    std::vector<std::vector<int>> matched; // per donor, recipients held
    double total_score = 0.0;              // sum over matched pairs
};

// Deferred acceptance with recipients proposing and donors holding up to
// capacity[d] recipients. Terminates with a matching stable w.r.t. the
// induced preferences. Capacities must be >= 1; scores rectangular. An
// empty score matrix yields an empty assignment.
MatchResult stable_match(const std::vector<std::vector<double>>& scores,
                         const std::vector<int>& capacity);

// True iff no recipient/donor pair prefers each other over their current
// assignment (a donor with spare capacity prefers any recipient).
bool is_stable(const std::vector<std::vector<double>>& scores, const std::vector<int>& capacity,
               const MatchResult& result);

// CSV bridge for the CLI: header row names donors, body rows are
// "recipient,score,score,..." — returns the score matrix.
std::vector<std::vector<double>> scores_from_table(const RawTable& table);

} // namespace cellfit

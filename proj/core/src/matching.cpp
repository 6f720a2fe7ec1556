#include "cellfit/matching.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

#include "num_format.hpp"

namespace cellfit {
namespace {

void check_inputs(const std::vector<std::vector<double>>& scores,
                  const std::vector<int>& capacity) {
    const size_t donors = scores.empty() ? capacity.size() : scores.front().size();
    for (const auto& row : scores)
        if (row.size() != donors) throw std::invalid_argument("score matrix is ragged");
    if (capacity.size() != donors)
        throw std::invalid_argument("capacity vector length disagrees with donor count");
    for (int c : capacity)
        if (c < 1) throw std::invalid_argument("donor capacity must be >= 1");
}

// strict preference: higher score first, lower index breaks ties
bool prefers(double score_a, size_t idx_a, double score_b, size_t idx_b) {
    if (score_a != score_b) return score_a > score_b;
    return idx_a < idx_b;
}

} // namespace

MatchResult stable_match(const std::vector<std::vector<double>>& scores,
                         const std::vector<int>& capacity) {
    check_inputs(scores, capacity);
    MatchResult result;
    result.matched.assign(capacity.size(), {});
    if (scores.empty()) return result; // nobody to place
    const size_t n_recipients = scores.size();
    const size_t n_donors = scores.front().size();

    // each recipient's proposal order: donors by descending score
    std::vector<std::vector<size_t>> pref(n_recipients);
    for (size_t r = 0; r < n_recipients; ++r) {
        auto& order = pref[r];
        order.resize(n_donors);
        for (size_t d = 0; d < n_donors; ++d) order[d] = d;
        std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
            return prefers(scores[r][a], a, scores[r][b], b);
        });
    }

    result.donor_of.assign(n_recipients, -1);
    std::vector<size_t> next_proposal(n_recipients, 0);

    std::deque<size_t> free;
    for (size_t r = 0; r < n_recipients; ++r) free.push_back(r);

    while (!free.empty()) {
        const size_t r = free.front();
        free.pop_front();
        if (next_proposal[r] >= n_donors) continue; // exhausted every donor

        const size_t d = pref[r][next_proposal[r]++];
        auto& held = result.matched[d];
        if (static_cast<int>(held.size()) < capacity[d]) {
            held.push_back(static_cast<int>(r));
            result.donor_of[r] = static_cast<int>(d);
            continue;
        }
        // full donor keeps its favourites; evict the worst held recipient
        // if the proposer beats them
        size_t worst_pos = 0;
        for (size_t i = 1; i < held.size(); ++i) {
            const auto a = static_cast<size_t>(held[i]);
            const auto w = static_cast<size_t>(held[worst_pos]);
            if (prefers(scores[w][d], w, scores[a][d], a)) worst_pos = i;
        }
        const auto worst = static_cast<size_t>(held[worst_pos]);
        if (prefers(scores[r][d], r, scores[worst][d], worst)) {
            held[worst_pos] = static_cast<int>(r);
            result.donor_of[r] = static_cast<int>(d);
            result.donor_of[worst] = -1;
            free.push_back(worst);
        } else {
            free.push_back(r);
        }
    }

    for (auto& held : result.matched) std::sort(held.begin(), held.end());
    result.total_score = 0.0;
    for (size_t r = 0; r < n_recipients; ++r)
        if (result.donor_of[r] >= 0)
            result.total_score += scores[r][static_cast<size_t>(result.donor_of[r])];
    return result;
}

bool is_stable(const std::vector<std::vector<double>>& scores, const std::vector<int>& capacity,
               const MatchResult& result) {
    check_inputs(scores, capacity);
    if (scores.empty()) return true;
    const size_t n_recipients = scores.size();
    const size_t n_donors = scores.front().size();
    for (size_t r = 0; r < n_recipients; ++r) {
        const int current = result.donor_of[r];
        for (size_t d = 0; d < n_donors; ++d) {
            if (current >= 0 && static_cast<size_t>(current) == d) continue;
            // would r rather have d than their current assignment?
            const bool r_wants =
                current < 0 ||
                prefers(scores[r][d], d, scores[r][static_cast<size_t>(current)],
                        static_cast<size_t>(current));
            if (!r_wants) continue;
            // would d take r? yes with spare capacity, or over its worst match
            const auto& held = result.matched[d];
            if (static_cast<int>(held.size()) < capacity[d]) return false;
            for (int h : held) {
                const auto a = static_cast<size_t>(h);
                if (prefers(scores[r][d], r, scores[a][d], a)) return false;
            }
        }
    }
    return true;
}

std::vector<std::vector<double>> scores_from_table(const RawTable& table) {
    if (table.columns.size() < 2)
        throw IoError("score table needs a recipient column plus donor columns");
    std::vector<std::vector<double>> scores;
    scores.reserve(table.rows.size());
    for (size_t i = 0; i < table.rows.size(); ++i) {
        std::vector<double> row;
        row.reserve(table.columns.size() - 1);
        for (size_t j = 1; j < table.columns.size(); ++j)
            row.push_back(detail::stod_exact(table.rows[i][j]));
        scores.push_back(std::move(row));
    }
    if (scores.empty()) throw IoError("score table has no rows");
    return scores;
}

} // namespace cellfit

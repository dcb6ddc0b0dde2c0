#include "thermovis/evaluation/metrics.hpp"

#include "thermovis/core/error.hpp"

namespace thermovis {
namespace {

std::size_t check(const std::vector<std::vector<Match>>& rankings, const std::vector<std::string>& truth) {
    if (rankings.empty()) throw Error(ErrorCode::invalid_argument, "no probe rankings");
    if (rankings.size() != truth.size()) {
        throw Error(ErrorCode::invalid_argument, "rankings and ground truth differ in length");
    }
    const std::size_t subjects = rankings.front().size();
    for (const auto& r : rankings) {
        if (r.size() != subjects || r.empty()) {
            throw Error(ErrorCode::invalid_argument, "every ranking must cover the same non-empty subject set");
        }
    }
    return subjects;
}

// 0-based position of the true subject, or subjects when absent.
std::vector<std::size_t> true_ranks(const std::vector<std::vector<Match>>& rankings,
                                    const std::vector<std::string>& truth) {
    std::vector<std::size_t> pos(rankings.size());
    for (std::size_t p = 0; p < rankings.size(); ++p) {
        pos[p] = rankings[p].size();
        for (std::size_t r = 0; r < rankings[p].size(); ++r) {
            if (rankings[p][r].subject_id == truth[p]) {
                pos[p] = r;
                break;
            }
        }
    }
    return pos;
}

}  // namespace

double rank_k_accuracy(const std::vector<std::vector<Match>>& rankings, const std::vector<std::string>& truth,
                       int k) {
    const std::size_t subjects = check(rankings, truth);
    if (k < 1 || static_cast<std::size_t>(k) > subjects) {
        throw Error(ErrorCode::invalid_argument, "rank k=" + std::to_string(k) + " outside 1.." +
                                                     std::to_string(subjects));
    }
    std::size_t hits = 0;
    for (std::size_t r : true_ranks(rankings, truth)) hits += r < static_cast<std::size_t>(k);
    return static_cast<double>(hits) / static_cast<double>(rankings.size());
}

std::vector<double> cmc_curve(const std::vector<std::vector<Match>>& rankings,
                              const std::vector<std::string>& truth) {
    const std::size_t subjects = check(rankings, truth);
    std::vector<std::size_t> counts(subjects + 1, 0);
    for (std::size_t r : true_ranks(rankings, truth)) ++counts[r];
    std::vector<double> curve(subjects);
    std::size_t hits = 0;
    for (std::size_t k = 0; k < subjects; ++k) {
        hits += counts[k];
        curve[k] = static_cast<double>(hits) / static_cast<double>(rankings.size());
    }
    return curve;
}

}  // namespace thermovis

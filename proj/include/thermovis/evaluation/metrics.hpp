#pragma once

#include <string>
#include <vector>

#include "thermovis/evaluation/matching.hpp"

namespace thermovis {

/// Fraction of probes whose true subject is among the first k ranked
/// subjects. Throws for k < 1, k above the number of ranked subjects, empty
/// or misaligned inputs.
double rank_k_accuracy(const std::vector<std::vector<Match>>& rankings,
                       const std::vector<std::string>& truth, int k);

/// rank_k_accuracy for k = 1 .. number of ranked subjects.
std::vector<double> cmc_curve(const std::vector<std::vector<Match>>& rankings,
                              const std::vector<std::string>& truth);

}  // namespace thermovis

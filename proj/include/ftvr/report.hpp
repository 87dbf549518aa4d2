#pragma once

#include "ftvr/protocol.hpp"
#include "ftvr/tasks.hpp"

#include <vector>

namespace ftvr {

/// Analysis of a TrialRecord set, one section per task: per-technique
/// aggregates, omnibus tests over participant means (RM-ANOVA and Friedman
/// for three or more techniques) and pairwise paired t / Wilcoxon tests with
/// Holm-adjusted p-values. Tests that cannot be computed carry an "error".
json stats_report(const std::vector<TrialRecord>& records);

}  // namespace ftvr

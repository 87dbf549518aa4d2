#pragma once

#include "ftvr/tasks.hpp"

#include <algorithm>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ftvr {

class MetricsError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Words per minute, ((len - 1) / seconds) * 60 / 5.
double wpm(std::size_t transcribed_len, double duration_s);

/// Unit-cost Levenshtein distance.
std::size_t msd(std::string_view a, std::string_view b);

inline constexpr char alignment_gap = '\0';

/// One optimal alignment: both strings padded with alignment_gap to equal length.
struct Alignment {
    std::string top;
    std::string bottom;

    std::size_t size() const { return top.size(); }
    friend bool operator==(const Alignment&, const Alignment&) = default;
};

/// Number of optimal alignments and their total length, by DP over the
/// backtrace graph. Counts are doubles; they overflow only for very long
/// strings.
struct AlignmentStats {
    double count = 0.0;
    double total_length = 0.0;
    double mean_length() const { return count > 0.0 ? total_length / count : 0.0; }
};

AlignmentStats optimal_alignment_stats(std::string_view a, std::string_view b);

/// Explicit list of every optimal alignment. Exponential; intended for
/// short strings.
std::vector<Alignment> optimal_alignments(std::string_view a, std::string_view b);

/// MSD divided by the mean optimal-alignment size, in percent.
double msd_error_rate(std::string_view presented, std::string_view transcribed);

struct SelectionAggregate {
    TechniqueKind technique = TechniqueKind::SideGaze;
    std::size_t trials = 0;
    std::size_t correct = 0;
    std::size_t participants = 0;
    double accuracy_pct = 0.0;
    double mean_time_s = 0.0;  // mean of per-participant means
    /// Summed trial time of one session (a 14-trial menu block, or the whole
    /// binary series), averaged per participant and then over participants.
    double mean_session_total_s = 0.0;
    double mean_error_commits = 0.0;
};

/// Per-technique accuracy and two-level mean time. Abandoned records are
/// skipped; all records must share one task kind.
std::vector<SelectionAggregate> selection_aggregates(const std::vector<TrialRecord>& records);

struct TextEntryAggregate {
    TechniqueKind technique = TechniqueKind::SideGaze;
    std::size_t phrases = 0;
    std::size_t participants = 0;
    double mean_wpm = 0.0;         // two-level
    double mean_error_rate = 0.0;  // two-level, percent
};

/// WPM of one keyboard record, from its transcription length and duration.
double record_wpm(const TrialRecord& record);
double record_error_rate(const TrialRecord& record);

std::vector<TextEntryAggregate> text_entry_aggregates(const std::vector<TrialRecord>& records);

/// Per-participant mean of `value` for each technique: rows are the
/// participants that have data for every listed technique, columns follow
/// `techniques`.
template <typename F>
std::vector<std::vector<double>> participant_matrix(const std::vector<TrialRecord>& records,
                                                    const std::vector<TechniqueKind>& techniques, F value) {
    std::map<int, std::map<std::size_t, std::pair<double, int>>> sums;
    for (const auto& r : records) {
        if (r.abandoned) continue;
        const auto it = std::find(techniques.begin(), techniques.end(), r.technique);
        if (it == techniques.end()) continue;
        auto& cell = sums[r.participant][static_cast<std::size_t>(it - techniques.begin())];
        cell.first += value(r);
        cell.second += 1;
    }
    std::vector<std::vector<double>> rows;
    for (const auto& [participant, cells] : sums) {
        if (cells.size() != techniques.size()) continue;
        std::vector<double> row;
        for (const auto& [col, cell] : cells) row.push_back(cell.first / cell.second);
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace ftvr

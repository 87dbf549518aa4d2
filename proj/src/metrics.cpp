#include "ftvr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>

namespace ftvr {

double wpm(std::size_t transcribed_len, double duration_s) {
    if (!(duration_s > 0.0)) throw MetricsError("wpm: duration must be positive");
    if (transcribed_len == 0) throw MetricsError("wpm: transcription must be non-empty");
    return static_cast<double>(transcribed_len - 1) / duration_s * 12.0;
}

namespace {

using Table = std::vector<std::vector<std::size_t>>;

Table distance_table(std::string_view a, std::string_view b) {
    Table d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
    for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
    for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t sub = d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, sub});
        }
    }
    return d;
}

bool diag_step(const Table& d, std::string_view a, std::string_view b, std::size_t i, std::size_t j) {
    return i > 0 && j > 0 && d[i][j] == d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
}
bool up_step(const Table& d, std::size_t i, std::size_t j) { return i > 0 && d[i][j] == d[i - 1][j] + 1; }
bool left_step(const Table& d, std::size_t i, std::size_t j) { return j > 0 && d[i][j] == d[i][j - 1] + 1; }

}  // namespace

std::size_t msd(std::string_view a, std::string_view b) { return distance_table(a, b)[a.size()][b.size()]; }

AlignmentStats optimal_alignment_stats(std::string_view a, std::string_view b) {
    const Table d = distance_table(a, b);
    std::vector<std::vector<AlignmentStats>> s(a.size() + 1, std::vector<AlignmentStats>(b.size() + 1));
    s[0][0].count = 1.0;
    auto add = [](AlignmentStats& into, const AlignmentStats& from) {
        into.count += from.count;
        into.total_length += from.total_length + from.count;
    };
    for (std::size_t i = 0; i <= a.size(); ++i) {
        for (std::size_t j = 0; j <= b.size(); ++j) {
            if (i == 0 && j == 0) continue;
            if (diag_step(d, a, b, i, j)) add(s[i][j], s[i - 1][j - 1]);
            if (up_step(d, i, j)) add(s[i][j], s[i - 1][j]);
            if (left_step(d, i, j)) add(s[i][j], s[i][j - 1]);
        }
    }
    return s[a.size()][b.size()];
}

std::vector<Alignment> optimal_alignments(std::string_view a, std::string_view b) {
    const Table d = distance_table(a, b);
    std::vector<Alignment> out;
    std::string top, bottom;
    std::function<void(std::size_t, std::size_t)> walk = [&](std::size_t i, std::size_t j) {
        if (i == 0 && j == 0) {
            out.push_back({std::string(top.rbegin(), top.rend()), std::string(bottom.rbegin(), bottom.rend())});
            return;
        }
        auto visit = [&](char t, char u, std::size_t ni, std::size_t nj) {
            top.push_back(t);
            bottom.push_back(u);
            walk(ni, nj);
            top.pop_back();
            bottom.pop_back();
        };
        if (diag_step(d, a, b, i, j)) visit(a[i - 1], b[j - 1], i - 1, j - 1);
        if (up_step(d, i, j)) visit(a[i - 1], alignment_gap, i - 1, j);
        if (left_step(d, i, j)) visit(alignment_gap, b[j - 1], i, j - 1);
    };
    walk(a.size(), b.size());
    return out;
}

double msd_error_rate(std::string_view presented, std::string_view transcribed) {
    const double mean = optimal_alignment_stats(presented, transcribed).mean_length();
    if (mean == 0.0) return 0.0;
    return static_cast<double>(msd(presented, transcribed)) / mean * 100.0;
}

namespace {

void require_single_task(const std::vector<TrialRecord>& records) {
    if (records.empty()) throw MetricsError("aggregates: no records");
    for (const auto& r : records) {
        if (r.task != records.front().task) throw MetricsError("aggregates: records mix task kinds");
    }
}

// Mean over participants of each participant's mean of value(record).
template <typename F>
double two_level_mean(const std::vector<const TrialRecord*>& records, F value) {
    std::map<int, std::pair<double, int>> per;
    for (const auto* r : records) {
        auto& cell = per[r->participant];
        cell.first += value(*r);
        cell.second += 1;
    }
    double sum = 0.0;
    for (const auto& [p, cell] : per) sum += cell.first / cell.second;
    return per.empty() ? 0.0 : sum / static_cast<double>(per.size());
}

std::map<TechniqueKind, std::vector<const TrialRecord*>> by_technique(const std::vector<TrialRecord>& records) {
    std::map<TechniqueKind, std::vector<const TrialRecord*>> groups;
    for (const auto& r : records) {
        if (!r.abandoned) groups[r.technique].push_back(&r);
    }
    return groups;
}

double mean_session_total(const std::vector<const TrialRecord*>& records) {
    const int block = TaskSpec{}.menu_trials_per_session;
    std::map<int, std::map<int, double>> totals;
    for (const auto* r : records) {
        const int session = r->task == TaskKind::Menu15 ? r->trial_index / block : 0;
        totals[r->participant][session] += r->elapsed_s();
    }
    double sum = 0.0;
    for (const auto& [p, sessions] : totals) {
        double s = 0.0;
        for (const auto& [k, total] : sessions) s += total;
        sum += s / static_cast<double>(sessions.size());
    }
    return totals.empty() ? 0.0 : sum / static_cast<double>(totals.size());
}

std::size_t participant_count(const std::vector<const TrialRecord*>& records) {
    std::set<int> ids;
    for (const auto* r : records) ids.insert(r->participant);
    return ids.size();
}

}  // namespace

std::vector<SelectionAggregate> selection_aggregates(const std::vector<TrialRecord>& records) {
    require_single_task(records);
    std::vector<SelectionAggregate> out;
    for (const auto& [technique, group] : by_technique(records)) {
        SelectionAggregate agg;
        agg.technique = technique;
        agg.trials = group.size();
        agg.correct = static_cast<std::size_t>(
            std::count_if(group.begin(), group.end(), [](const TrialRecord* r) { return r->correct; }));
        agg.participants = participant_count(group);
        agg.accuracy_pct = 100.0 * static_cast<double>(agg.correct) / static_cast<double>(agg.trials);
        agg.mean_time_s = two_level_mean(group, [](const TrialRecord& r) { return r.elapsed_s(); });
        agg.mean_session_total_s = mean_session_total(group);
        agg.mean_error_commits =
            two_level_mean(group, [](const TrialRecord& r) { return static_cast<double>(r.error_commits); });
        out.push_back(agg);
    }
    if (out.empty()) throw MetricsError("aggregates: every record is abandoned");
    return out;
}

double record_wpm(const TrialRecord& record) {
    if (!record.transcription) throw MetricsError("record_wpm: record has no transcription");
    if (record.transcription->size() <= 1) return 0.0;
    return wpm(record.transcription->size(), record.elapsed_s());
}

double record_error_rate(const TrialRecord& record) {
    if (!record.presented || !record.transcription) throw MetricsError("record_error_rate: not a keyboard record");
    return msd_error_rate(*record.presented, *record.transcription);
}

std::vector<TextEntryAggregate> text_entry_aggregates(const std::vector<TrialRecord>& records) {
    require_single_task(records);
    if (records.front().task != TaskKind::Keyboard) throw MetricsError("text_entry_aggregates: not keyboard records");
    std::vector<TextEntryAggregate> out;
    for (const auto& [technique, group] : by_technique(records)) {
        TextEntryAggregate agg;
        agg.technique = technique;
        agg.phrases = group.size();
        agg.participants = participant_count(group);
        agg.mean_wpm = two_level_mean(group, record_wpm);
        agg.mean_error_rate = two_level_mean(group, record_error_rate);
        out.push_back(agg);
    }
    if (out.empty()) throw MetricsError("aggregates: every record is abandoned");
    return out;
}

}  // namespace ftvr

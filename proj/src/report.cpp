#include "ftvr/report.hpp"

#include "ftvr/metrics.hpp"
#include "ftvr/stats.hpp"

#include <functional>
#include <map>
#include <set>

namespace ftvr {

namespace {

using Measure = std::function<double(const TrialRecord&)>;

json test_json(const stats::TestResult& r) {
    json j = {{"statistic", r.statistic}, {"p", r.p}};
    if (r.df1) j["df1"] = *r.df1;
    if (r.df2) j["df2"] = *r.df2;
    return j;
}

template <typename F>
json guarded(F test) {
    try {
        return test_json(test());
    } catch (const stats::StatsError& e) {
        return {{"error", e.what()}};
    }
}

json analyse_measure(const std::vector<TrialRecord>& records, const std::vector<TechniqueKind>& techniques,
                     const Measure& measure) {
    const auto matrix = participant_matrix(records, techniques, measure);
    json out = {{"participants", matrix.size()}};
    if (techniques.size() >= 3) {
        out["rm_anova"] = guarded([&] { return stats::rm_anova_1way(matrix); });
        out["friedman"] = guarded([&] { return stats::friedman(matrix); });
    }
    json pairs = json::array();
    std::vector<double> t_p, w_p;
    for (std::size_t a = 0; a < techniques.size(); ++a) {
        for (std::size_t b = a + 1; b < techniques.size(); ++b) {
            std::vector<double> xa, xb;
            for (const auto& row : matrix) {
                xa.push_back(row[a]);
                xb.push_back(row[b]);
            }
            json pair = {{"a", to_string(techniques[a])}, {"b", to_string(techniques[b])}};
            pair["paired_t"] = guarded([&] { return stats::paired_t(xa, xb); });
            pair["wilcoxon"] = guarded([&] { return stats::wilcoxon_signed_rank(xa, xb); });
            pairs.push_back(pair);
        }
    }
    // Holm adjustment within each test family, over the pairs that produced a p-value.
    for (const char* family : {"paired_t", "wilcoxon"}) {
        std::vector<double> ps;
        std::vector<std::size_t> where;
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            if (pairs[i][family].contains("p")) {
                ps.push_back(pairs[i][family]["p"].get<double>());
                where.push_back(i);
            }
        }
        const auto adjusted = stats::holm_adjust(ps);
        for (std::size_t k = 0; k < where.size(); ++k) pairs[where[k]][family]["p_holm"] = adjusted[k];
    }
    out["pairwise"] = std::move(pairs);
    return out;
}

json task_section(const std::vector<TrialRecord>& records) {
    std::set<TechniqueKind> present;
    for (const auto& r : records) {
        if (!r.abandoned) present.insert(r.technique);
    }
    const std::vector<TechniqueKind> techniques(present.begin(), present.end());
    json section;
    json aggregates = json::array();
    for (const auto& a : selection_aggregates(records)) {
        aggregates.push_back({{"technique", to_string(a.technique)},
                              {"trials", a.trials},
                              {"participants", a.participants},
                              {"accuracy_pct", a.accuracy_pct},
                              {"mean_time_s", a.mean_time_s},
                              {"mean_session_total_s", a.mean_session_total_s},
                              {"mean_error_commits", a.mean_error_commits}});
    }
    std::map<std::string, Measure> measures = {
        {"time_s", [](const TrialRecord& r) { return r.elapsed_s(); }},
        {"accuracy_pct", [](const TrialRecord& r) { return r.correct ? 100.0 : 0.0; }}};
    if (records.front().task == TaskKind::Keyboard) {
        const auto text = text_entry_aggregates(records);
        for (std::size_t i = 0; i < text.size(); ++i) {
            aggregates[i]["wpm"] = text[i].mean_wpm;
            aggregates[i]["error_rate_pct"] = text[i].mean_error_rate;
        }
        measures["wpm"] = record_wpm;
        measures["error_rate_pct"] = record_error_rate;
    }
    section["aggregates"] = std::move(aggregates);
    json tests;
    for (const auto& [name, measure] : measures) tests[name] = analyse_measure(records, techniques, measure);
    section["tests"] = std::move(tests);
    return section;
}

}  // namespace

json stats_report(const std::vector<TrialRecord>& records) {
    if (records.empty()) throw MetricsError("stats_report: no records");
    std::map<TaskKind, std::vector<TrialRecord>> by_task;
    for (const auto& r : records) by_task[r.task].push_back(r);
    json report = {{"records", records.size()}, {"tasks", json::object()}};
    for (const auto& [task, group] : by_task) report["tasks"][to_string(task)] = task_section(group);
    return report;
}

}  // namespace ftvr

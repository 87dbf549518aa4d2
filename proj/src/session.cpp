#include "ftvr/session.hpp"

#include "ftvr/metrics.hpp"

#include <cstdlib>

#ifndef FTVR_DATA_DIR
#define FTVR_DATA_DIR "data"
#endif

namespace ftvr {

MonotonicityError::MonotonicityError(const std::string& source, std::int64_t t_ms, std::int64_t last_ms)
    : std::runtime_error(source + " event at t_ms=" + std::to_string(t_ms) + " precedes the previous one at " +
                         std::to_string(last_ms)),
      source_(source) {}

std::string data_dir() {
    if (const char* env = std::getenv("FTVR_DATA_DIR"); env && *env) return env;
    return FTVR_DATA_DIR;
}

const PhraseSet& default_phrase_set() {
    static const PhraseSet set = load_phrase_set(data_dir() + "/phrases.txt");
    return set;
}

void SessionConfig::validate() const {
    if (is_gaze(technique) && mapping_mode) {
        throw std::invalid_argument(to_string(technique) + " does not take a mapping mode");
    }
    if (correction_fraction < 0.0 || correction_fraction > 1.0) {
        throw std::invalid_argument("correction_fraction must lie in [0, 1]");
    }
    if (mapping.ax == 0.0 || mapping.ay == 0.0) throw std::invalid_argument("mapping slopes must be non-zero");
    if (binary_trials < 0 || menu_sessions < 0 || menu_trials_per_session < 0 || menu_trials_per_session > 14 ||
        keyboard_phrases < 0) {
        throw std::invalid_argument("trial counts out of range");
    }
    if (task == TaskKind::Menu15 && (menu.rows != 3 || menu.cols != 5)) {
        throw std::invalid_argument("the menu task needs a 3x5 button grid");
    }
}

MappingMode SessionConfig::effective_mapping_mode() const {
    return mapping_mode.value_or(default_mapping_mode(technique));
}

TaskSpec SessionConfig::task_spec() const {
    TaskSpec spec;
    spec.kind = task;
    spec.technique = technique;
    spec.seed = seed;
    spec.binary_trials = binary_trials;
    spec.menu_sessions = menu_sessions;
    spec.menu_trials_per_session = menu_trials_per_session;
    spec.keyboard_phrases = keyboard_phrases;
    return spec;
}

Attachment SessionConfig::attachment() const {
    return technique == TechniqueKind::FrontView ? Attachment::ViewFixed : Attachment::WorldFixed;
}

Scene build_scene(const SessionConfig& config) {
    switch (config.task) {
        case TaskKind::Binary: {
            BinaryParams p = config.binary;
            p.attachment = config.attachment();
            return build_binary_scene(p);
        }
        case TaskKind::Menu15: {
            MenuParams p = config.menu;
            p.attachment = config.attachment();
            return build_menu_scene(p);
        }
        case TaskKind::Keyboard: {
            KeyboardParams p = config.keyboard;
            p.attachment = config.attachment();
            return build_keyboard_scene(qwerty_layout(), p);
        }
    }
    return build_menu_scene();
}

namespace {

std::vector<std::string> session_phrases(const SessionConfig& config) {
    if (config.task != TaskKind::Keyboard) return {};
    if (!config.phrases.empty()) return config.phrases;
    return sample_phrases(default_phrase_set(), config.keyboard_phrases, config.seed);
}

const SessionConfig& validated(const SessionConfig& config) {
    config.validate();
    return config;
}

}  // namespace

Session::Session(SessionConfig config)
    : config_(validated(config)),
      scene_(build_scene(config_)),
      task_(config_.task_spec(), config_.session_id, config_.participant, session_phrases(config_)),
      mapping_(config_.mapping),
      technique_(config_.technique) {
    mapping_.mode = config_.effective_mapping_mode();
    mapping_.correction_fraction = config_.correction_fraction;
    set_cursor(mapping_, cursor_);
}

std::optional<NodeId> Session::pick_at(const CursorAngles& cursor) const {
    const auto hit = pick(scene_, make_ray(scene_.camera(), cursor));
    if (!hit) return std::nullopt;
    return hit->node_id;
}

std::vector<json> Session::start() {
    std::vector<json> out;
    if (started_) return out;
    started_ = true;
    task_.start(scene_);
    hovered_ = pick_at(cursor_);
    out.push_back(scene_message(scene_));
    out.push_back(cursor_message(cursor_));
    if (hovered_) out.push_back(ui_event_message({UiEventKind::HoverEnter, hovered_}, 0));
    out.push_back(metrics_message());
    return out;
}

void Session::check_time(const InputEvent& event) const {
    auto check = [](const char* name, std::int64_t t, const std::optional<std::int64_t>& last) {
        if (last && t < *last) throw MonotonicityError(name, t, *last);
    };
    if (const auto* t = std::get_if<TouchEvent>(&event)) {
        if (t->source == TouchSource::FrontPad) {
            check("front", t->t_ms, last_front_);
        } else {
            check("side", t->t_ms, last_side_);
        }
    } else {
        check("head", event_time(event), last_head_);
    }
}

std::vector<json> Session::handle(const InputEvent& event) {
    check_time(event);
    std::vector<json> out;
    if (!started_) out = start();
    if (const auto* touch = std::get_if<TouchEvent>(&event)) {
        (touch->source == TouchSource::FrontPad ? last_front_ : last_side_) = touch->t_ms;
        for (const auto& action : step(technique_, mapping_, *touch, config_.technique_config)) apply(action, out);
    } else {
        const auto& head = std::get<HeadPoseEvent>(event);
        last_head_ = head.t_ms;
        update_world_transforms(scene_, Camera{head.yaw_deg, head.pitch_deg});
        repick(head.t_ms, out);
    }
    if (task_.done() && !summary_sent_) {
        summary_sent_ = true;
        finished_ = true;
        out.push_back(summary_message(records_));
    }
    return out;
}

void Session::repick(std::int64_t t_ms, std::vector<json>& out) {
    const auto now = pick_at(cursor_);
    for (const auto& e : emit_ui_event(scene_, hovered_, now, false)) out.push_back(ui_event_message(e, t_ms));
    hovered_ = now;
}

void Session::apply(const TechniqueAction& action, std::vector<json>& out) {
    switch (action.kind) {
        case ActionKind::CursorMoved:
            if (action.cursor == cursor_) return;
            cursor_ = action.cursor;
            out.push_back(cursor_message(cursor_));
            repick(action.t_ms, out);
            return;
        case ActionKind::OffScreenCancel:
            ++offscreen_;
            return;
        case ActionKind::Commit: {
            const auto target = pick_at(action.cursor);
            const auto events = emit_ui_event(scene_, target, target, true);
            for (const auto& e : events) out.push_back(ui_event_message(e, action.t_ms));
            const auto feedback = task_.on_commit(scene_, events.back(), action.t_ms);
            if (feedback.key_click) out.push_back(key_click_message(action.t_ms));
            for (const auto& record : feedback.finished) {
                records_.push_back(record);
                out.push_back(trial_message(record));
            }
            if (feedback.scene_changed) out.push_back(scene_message(scene_));
            if (!feedback.finished.empty() || feedback.key_click) out.push_back(metrics_message());
            return;
        }
    }
}

std::vector<json> Session::finish() {
    std::vector<json> out;
    if (summary_sent_) return out;
    if (auto abandoned = task_.abandon()) records_.push_back(*abandoned);
    summary_sent_ = true;
    finished_ = true;
    out.push_back(summary_message(records_));
    return out;
}

json Session::metrics_message() const {
    json j = {{"type", "metrics"},
              {"trials_completed", task_.trials_completed()},
              {"total_trials", task_.total_trials()},
              {"offscreen_count", offscreen_}};
    std::vector<TrialRecord> done;
    for (const auto& r : records_) {
        if (!r.abandoned) done.push_back(r);
    }
    if (!done.empty()) {
        const auto agg = selection_aggregates(done).front();
        j["accuracy_pct"] = agg.accuracy_pct;
        j["mean_time_s"] = agg.mean_time_s;
        j["mean_error_commits"] = agg.mean_error_commits;
        if (config_.task == TaskKind::Keyboard) {
            const auto text = text_entry_aggregates(done).front();
            j["wpm"] = text.mean_wpm;
            j["error_rate_pct"] = text.mean_error_rate;
        }
    }
    if (config_.task == TaskKind::Keyboard) {
        j["presented"] = task_.presented() ? json(*task_.presented()) : json(nullptr);
        j["transcription"] = task_.transcription();
    }
    return j;
}

}  // namespace ftvr

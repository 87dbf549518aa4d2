#include "ftvr/techniques.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ftvr {

bool is_gaze(TechniqueKind kind) {
    return kind == TechniqueKind::SideGaze || kind == TechniqueKind::FrontGaze;
}

MappingMode default_mapping_mode(TechniqueKind kind) {
    return kind == TechniqueKind::DragNTap ? MappingMode::Relative : MappingMode::Absolute;
}

TouchSource designated_pad(TechniqueKind kind) {
    return kind == TechniqueKind::SideGaze ? TouchSource::SidePad : TouchSource::FrontPad;
}

std::string to_string(TechniqueKind kind) {
    switch (kind) {
        case TechniqueKind::SideGaze: return "side-gaze";
        case TechniqueKind::FrontGaze: return "front-gaze";
        case TechniqueKind::FrontWorld: return "front-world";
        case TechniqueKind::FrontView: return "front-view";
        case TechniqueKind::TwoFingers: return "two-fingers";
        case TechniqueKind::DragNTap: return "drag-n-tap";
    }
    return "side-gaze";
}

TechniqueKind parse_technique(const std::string& s) {
    for (TechniqueKind kind : all_techniques) {
        if (to_string(kind) == s) return kind;
    }
    throw std::invalid_argument("unknown technique: " + s);
}

std::string to_string(ActionKind kind) {
    switch (kind) {
        case ActionKind::CursorMoved: return "cursor_moved";
        case ActionKind::Commit: return "commit";
        case ActionKind::OffScreenCancel: return "off_screen_cancel";
    }
    return "commit";
}

namespace {

double distance(const TouchPoint& a, const TouchPoint& b) {
    return std::hypot(static_cast<double>(a.x - b.x), static_cast<double>(a.y - b.y));
}

class Stepper {
public:
    Stepper(TechniqueState& s, MappingModel& m, const TouchEvent& e, const TechniqueConfig& c)
        : state(s), model(m), ev(e), cfg(c), on_panel(e.source == TouchSource::SidePad || in_panel(e.point)) {}

    std::vector<TechniqueAction> run() {
        if (ev.source != designated_pad(state.technique)) return {};
        switch (state.technique) {
            case TechniqueKind::SideGaze:
            case TechniqueKind::FrontGaze: gaze(); break;
            case TechniqueKind::FrontWorld:
            case TechniqueKind::FrontView: single_finger(); break;
            case TechniqueKind::TwoFingers: two_fingers(); break;
            case TechniqueKind::DragNTap: drag_n_tap(); break;
        }
        return std::move(actions);
    }

private:
    TechniqueState& state;
    MappingModel& model;
    const TouchEvent& ev;
    const TechniqueConfig& cfg;
    const bool on_panel;
    std::vector<TechniqueAction> actions;

    bool is(TouchAction a) const { return ev.action == a; }

    void off_screen() { actions.push_back({ActionKind::OffScreenCancel, state.cursor, ev.t_ms}); }

    void move_cursor() {
        if (const auto mapped = map_touch(model, ev)) {
            state.cursor = *mapped;
            actions.push_back({ActionKind::CursorMoved, state.cursor, ev.t_ms});
        }
    }

    void commit(const CursorAngles& at) {
        if (cfg.debounce_enabled && state.last_commit && ev.t_ms - *state.last_commit < cfg.debounce_ms) {
            return;
        }
        state.last_commit = ev.t_ms;
        actions.push_back({ActionKind::Commit, at, ev.t_ms});
    }

    bool tap_qualifies(const PendingTap& tap) const {
        return tap.valid && ev.t_ms - tap.t_down <= cfg.tap_max_ms &&
               distance(ev.point, tap.anchor) <= cfg.tap_slop_px;
    }

    void track_down() { state.fingers_down[ev.finger] = ev.point; }
    void track_up() { state.fingers_down.erase(ev.finger); }
    bool tracked() const { return state.fingers_down.contains(ev.finger); }

    void gaze() {
        state.cursor = {};
        auto it = state.gaze_taps.find(ev.finger);
        if (is(TouchAction::Down)) {
            if (it != state.gaze_taps.end()) return;
            if (!on_panel) return off_screen();
            state.gaze_taps[ev.finger] = PendingTap{ev.finger, ev.t_ms, ev.point, {}, true};
            track_down();
            return;
        }
        if (it == state.gaze_taps.end()) return;
        PendingTap& tap = it->second;
        if (!on_panel) {
            if (tap.valid) off_screen();
            tap.valid = false;
        }
        if (is(TouchAction::Move)) {
            if (on_panel && distance(ev.point, tap.anchor) > cfg.tap_slop_px) tap.valid = false;
            state.fingers_down[ev.finger] = ev.point;
            return;
        }
        const bool fire = on_panel && tap_qualifies(tap);
        state.gaze_taps.erase(it);
        track_up();
        if (fire) commit(CursorAngles{});
    }

    void single_finger() {
        switch (state.phase) {
            case Phase::Idle:
                if (!is(TouchAction::Down) || tracked()) return;
                if (!on_panel) return off_screen();
                state.phase = Phase::Active;
                state.dragger = ev.finger;
                state.pending = PendingTap{ev.finger, ev.t_ms, ev.point, {}, true};
                track_down();
                move_cursor();
                return;
            case Phase::Active: {
                if (ev.finger != state.dragger) return;
                PendingTap& tap = *state.pending;
                if (!on_panel) {
                    if (tap.valid) off_screen();
                    tap.valid = false;
                }
                if (is(TouchAction::Move)) {
                    if (!on_panel) return;
                    if (distance(ev.point, tap.anchor) > cfg.tap_slop_px) tap.valid = false;
                    state.fingers_down[ev.finger] = ev.point;
                    move_cursor();
                    return;
                }
                if (is(TouchAction::Up)) {
                    const bool fire = on_panel && tap_qualifies(tap);
                    if (on_panel) map_touch(model, ev);
                    state.phase = Phase::Idle;
                    state.dragger.reset();
                    state.pending.reset();
                    track_up();
                    if (fire) commit(state.cursor);
                }
                return;
            }
            default: return;
        }
    }

    void two_fingers() {
        switch (state.phase) {
            case Phase::Idle:
                if (!is(TouchAction::Down)) return;
                if (!on_panel) return off_screen();
                state.phase = Phase::Drag;
                state.dragger = ev.finger;
                track_down();
                move_cursor();
                return;
            case Phase::Drag:
                if (ev.finger == state.dragger) {
                    drag_finger();
                    return;
                }
                if (!is(TouchAction::Down)) return;
                if (!on_panel) return off_screen();
                state.phase = Phase::DragTap;
                state.pending = PendingTap{ev.finger, ev.t_ms, ev.point, state.cursor, true};
                track_down();
                return;
            case Phase::DragTap: {
                if (ev.finger == state.dragger) {
                    if (is(TouchAction::Up)) {
                        // Dragger lifted before the tap finished: no commit.
                        if (on_panel) map_touch(model, ev);
                        state.fingers_down.erase(*state.dragger);
                        state.dragger.reset();
                        state.phase = Phase::Drain;
                        return;
                    }
                    drag_finger();
                    return;
                }
                PendingTap& tap = *state.pending;
                if (ev.finger != tap.finger) return;
                if (!on_panel) {
                    off_screen();
                    state.fingers_down.erase(tap.finger);
                    state.pending.reset();
                    state.phase = Phase::Drag;
                    return;
                }
                if (is(TouchAction::Move)) {
                    if (distance(ev.point, tap.anchor) > cfg.tap_slop_px) tap.valid = false;
                    state.fingers_down[ev.finger] = ev.point;
                    return;
                }
                if (is(TouchAction::Up)) {
                    const bool fire = tap_qualifies(tap);
                    const CursorAngles at = tap.commit_cursor;
                    track_up();
                    state.pending.reset();
                    state.phase = Phase::Drag;
                    if (fire) commit(at);
                }
                return;
            }
            case Phase::Drain:
                if (is(TouchAction::Up) && tracked()) {
                    track_up();
                    state.pending.reset();
                    if (state.fingers_down.empty()) state.phase = Phase::Idle;
                }
                return;
            default: return;
        }
    }

    // Down/Move/Up of the dragging finger while in Drag (two-fingers and drag-n-tap).
    void drag_finger() {
        if (is(TouchAction::Down)) return;
        if (is(TouchAction::Move)) {
            if (!on_panel) return off_screen();
            state.fingers_down[ev.finger] = ev.point;
            move_cursor();
            return;
        }
        if (on_panel) map_touch(model, ev);
        const TouchPoint lift = on_panel ? ev.point : state.fingers_down[ev.finger];
        track_up();
        state.dragger.reset();
        if (state.technique == TechniqueKind::DragNTap) {
            state.phase = Phase::Armed;
            state.armed_deadline = ev.t_ms + cfg.retap_window_ms;
            state.lift_point = lift;
        } else {
            state.phase = Phase::Idle;
        }
    }

    void start_drag() {
        state.phase = Phase::Drag;
        state.dragger = ev.finger;
        state.pending.reset();
        track_down();
        move_cursor();
    }

    void drag_n_tap() {
        switch (state.phase) {
            case Phase::Idle:
                if (!is(TouchAction::Down)) return;
                if (!on_panel) return off_screen();
                start_drag();
                return;
            case Phase::Drag:
                if (ev.finger == state.dragger) drag_finger();
                return;
            case Phase::Armed:
                if (!is(TouchAction::Down)) return;
                if (!on_panel) {
                    state.phase = Phase::Idle;
                    return off_screen();
                }
                if (ev.t_ms <= state.armed_deadline &&
                    distance(ev.point, state.lift_point) <= cfg.retap_radius_px) {
                    state.phase = Phase::Tap;
                    state.pending = PendingTap{ev.finger, ev.t_ms, ev.point, state.cursor, true};
                    track_down();
                    return;
                }
                start_drag();
                return;
            case Phase::Tap: {
                PendingTap& tap = *state.pending;
                if (ev.finger != tap.finger) return;
                if (!on_panel) {
                    // The finger left the pad: the re-tap is lost and the finger is untracked.
                    off_screen();
                    track_up();
                    state.pending.reset();
                    state.phase = Phase::Idle;
                    return;
                }
                if (is(TouchAction::Move)) {
                    state.fingers_down[ev.finger] = ev.point;
                    if (distance(ev.point, tap.anchor) > cfg.tap_slop_px) {
                        // Turned into a drag: anchor at the re-tap point, then apply the move.
                        TouchEvent down = ev;
                        down.action = TouchAction::Down;
                        down.point = tap.anchor;
                        map_touch(model, down);
                        state.phase = Phase::Drag;
                        state.dragger = ev.finger;
                        state.pending.reset();
                        move_cursor();
                    }
                    return;
                }
                if (is(TouchAction::Up)) {
                    track_up();
                    state.pending.reset();
                    if (ev.t_ms - tap.t_down <= cfg.tap_max_ms) {
                        state.phase = Phase::Idle;
                        commit(state.cursor);
                    } else {
                        // A long still press counts as a drag that ended here.
                        state.phase = Phase::Armed;
                        state.armed_deadline = ev.t_ms + cfg.retap_window_ms;
                        state.lift_point = ev.point;
                    }
                }
                return;
            }
            default: return;
        }
    }
};

std::string finger_name(int finger) {
    if (finger == 0) return "A";
    if (finger == 1) return "B";
    return "#" + std::to_string(finger);
}

}  // namespace

std::vector<TechniqueAction> step(TechniqueState& state, MappingModel& model, const TouchEvent& event,
                                  const TechniqueConfig& config) {
    return Stepper(state, model, event, config).run();
}

std::vector<TechniqueAction> step(TechniqueState&, MappingModel&, const HeadPoseEvent&,
                                  const TechniqueConfig&) {
    return {};
}

std::string abstract_state(const TechniqueState& state) {
    if (is_gaze(state.technique)) {
        if (state.gaze_taps.empty()) return "none";
        std::string s;
        for (const auto& [finger, tap] : state.gaze_taps) s += finger_name(finger);
        return s;
    }
    const std::string d = state.dragger ? finger_name(*state.dragger) : "";
    switch (state.phase) {
        case Phase::Idle: return "idle";
        case Phase::Active: return "active(" + d + ")";
        case Phase::Drag: return "drag(" + d + ")";
        case Phase::DragTap: return "drag_tap(" + d + "," + finger_name(state.pending->finger) + ")";
        case Phase::Drain: {
            std::string s = "drain(";
            bool first = true;
            for (const auto& [finger, point] : state.fingers_down) {
                if (!first) s += ",";
                s += finger_name(finger);
                first = false;
            }
            return s + ")";
        }
        case Phase::Armed: return "armed";
        case Phase::Tap: return "tap(" + finger_name(state.pending->finger) + ")";
    }
    return "idle";
}

const Transition* TransitionTable::find(const std::string& from, TouchAction action, char finger) const {
    for (const auto& row : rows) {
        if (row.from == from && row.action == action && row.finger == finger) return &row;
    }
    return nullptr;
}

namespace {

constexpr auto Down = TouchAction::Down;
constexpr auto Move = TouchAction::Move;
constexpr auto Up = TouchAction::Up;
constexpr auto Moved = ActionKind::CursorMoved;
constexpr auto Commit = ActionKind::Commit;

char other(char f) { return f == 'A' ? 'B' : 'A'; }
std::string with(const char* fmt, char f) {
    std::string s = fmt;
    std::replace(s.begin(), s.end(), 'X', f);
    std::replace(s.begin(), s.end(), 'Y', other(f));
    return s;
}

// Fills every (state, event) pair without an explicit row with an ignoring self-loop.
TransitionTable complete(TransitionTable table) {
    const auto explicit_rows = table.rows;
    for (const auto& state : table.states) {
        for (TouchAction action : {Down, Move, Up}) {
            for (char finger : {'A', 'B'}) {
                bool found = false;
                for (const auto& row : explicit_rows) {
                    found = found || (row.from == state && row.action == action && row.finger == finger);
                }
                if (!found) table.rows.push_back({state, action, finger, state, {}});
            }
        }
    }
    return table;
}

TransitionTable gaze_table(TechniqueKind kind) {
    TransitionTable t{kind, "none", {"none", "A", "B", "AB"}, {}};
    t.rows = {
        {"none", Down, 'A', "A", {}},
        {"none", Down, 'B', "B", {}},
        {"A", Up, 'A', "none", {Commit}},
        {"A", Down, 'B', "AB", {}},
        {"B", Up, 'B', "none", {Commit}},
        {"B", Down, 'A', "AB", {}},
        {"AB", Up, 'A', "B", {Commit}},
        {"AB", Up, 'B', "A", {Commit}},
    };
    return t;
}

TransitionTable single_finger_table(TechniqueKind kind) {
    TransitionTable t{kind, "idle", {"idle", "active(A)", "active(B)"}, {}};
    for (char f : {'A', 'B'}) {
        t.rows.push_back({"idle", Down, f, with("active(X)", f), {Moved}});
        t.rows.push_back({with("active(X)", f), Move, f, with("active(X)", f), {Moved}});
        t.rows.push_back({with("active(X)", f), Up, f, "idle", {Commit}});
    }
    return t;
}

TransitionTable two_fingers_table() {
    TransitionTable t{TechniqueKind::TwoFingers,
                      "idle",
                      {"idle", "drag(A)", "drag(B)", "drag_tap(A,B)", "drag_tap(B,A)", "drain(A)", "drain(B)"},
                      {}};
    for (char f : {'A', 'B'}) {
        t.rows.push_back({"idle", Down, f, with("drag(X)", f), {Moved}});
        t.rows.push_back({with("drag(X)", f), Move, f, with("drag(X)", f), {Moved}});
        t.rows.push_back({with("drag(X)", f), Up, f, "idle", {}});
        t.rows.push_back({with("drag(X)", f), Down, other(f), with("drag_tap(X,Y)", f), {}});
        t.rows.push_back({with("drag_tap(X,Y)", f), Move, f, with("drag_tap(X,Y)", f), {Moved}});
        t.rows.push_back({with("drag_tap(X,Y)", f), Up, other(f), with("drag(X)", f), {Commit}});
        t.rows.push_back({with("drag_tap(X,Y)", f), Up, f, with("drain(Y)", f), {}});
        t.rows.push_back({with("drain(X)", f), Up, f, "idle", {}});
    }
    return t;
}

TransitionTable drag_n_tap_table() {
    TransitionTable t{TechniqueKind::DragNTap,
                      "idle",
                      {"idle", "drag(A)", "drag(B)", "armed", "tap(A)", "tap(B)"},
                      {}};
    for (char f : {'A', 'B'}) {
        t.rows.push_back({"idle", Down, f, with("drag(X)", f), {Moved}});
        t.rows.push_back({with("drag(X)", f), Move, f, with("drag(X)", f), {Moved}});
        t.rows.push_back({with("drag(X)", f), Up, f, "armed", {}});
        t.rows.push_back({"armed", Down, f, with("tap(X)", f), {}});
        t.rows.push_back({with("tap(X)", f), Up, f, "idle", {Commit}});
    }
    return t;
}

}  // namespace

TransitionTable legal_transitions(TechniqueKind kind) {
    switch (kind) {
        case TechniqueKind::SideGaze:
        case TechniqueKind::FrontGaze: return complete(gaze_table(kind));
        case TechniqueKind::FrontWorld:
        case TechniqueKind::FrontView: return complete(single_finger_table(kind));
        case TechniqueKind::TwoFingers: return complete(two_fingers_table());
        case TechniqueKind::DragNTap: return complete(drag_n_tap_table());
    }
    return {};
}

}  // namespace ftvr

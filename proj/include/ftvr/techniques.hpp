#pragma once

#include "ftvr/input.hpp"
#include "ftvr/mapping.hpp"
#include "ftvr/picking.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ftvr {

enum class TechniqueKind { SideGaze, FrontGaze, FrontWorld, FrontView, TwoFingers, DragNTap };

inline constexpr TechniqueKind all_techniques[] = {
    TechniqueKind::SideGaze,   TechniqueKind::FrontGaze,  TechniqueKind::FrontWorld,
    TechniqueKind::FrontView,  TechniqueKind::TwoFingers, TechniqueKind::DragNTap};

bool is_gaze(TechniqueKind kind);

/// Mapping mode a technique uses unless the session overrides it.
MappingMode default_mapping_mode(TechniqueKind kind);

/// Pad whose taps the technique listens to.
TouchSource designated_pad(TechniqueKind kind);

std::string to_string(TechniqueKind kind);
TechniqueKind parse_technique(const std::string& s);

struct TechniqueConfig {
    std::int64_t tap_max_ms = 200;
    double tap_slop_px = 20.0;
    std::int64_t retap_window_ms = 400;
    double retap_radius_px = 60.0;
    std::int64_t debounce_ms = 150;
    bool debounce_enabled = true;
};

enum class Phase {
    Idle,
    Active,   // single-finger front techniques: finger down
    Drag,     // a dragging finger is down
    DragTap,  // two-fingers: dragger down, tapping finger down
    Drain,    // two-fingers: dragger lifted first, waiting for all fingers up
    Armed,    // drag-n-tap: drag finished, waiting for the re-tap
    Tap,      // drag-n-tap: re-tap finger down
};

struct PendingTap {
    int finger = 0;
    std::int64_t t_down = 0;
    TouchPoint anchor;
    CursorAngles commit_cursor;
    bool valid = true;
};

struct TechniqueState {
    TechniqueKind technique = TechniqueKind::SideGaze;
    Phase phase = Phase::Idle;
    CursorAngles cursor;
    std::map<int, TouchPoint> fingers_down;  // fingers the machine is tracking
    std::optional<int> dragger;
    std::optional<PendingTap> pending;
    std::map<int, PendingTap> gaze_taps;
    std::int64_t armed_deadline = 0;
    TouchPoint lift_point;
    std::optional<std::int64_t> last_commit;

    explicit TechniqueState(TechniqueKind kind = TechniqueKind::SideGaze) : technique(kind) {}
};

enum class ActionKind { CursorMoved, Commit, OffScreenCancel };

struct TechniqueAction {
    ActionKind kind = ActionKind::CursorMoved;
    CursorAngles cursor;
    std::int64_t t_ms = 0;

    friend bool operator==(const TechniqueAction&, const TechniqueAction&) = default;
};

/// Consumes one touch event. Events must arrive in timestamp order.
std::vector<TechniqueAction> step(TechniqueState& state, MappingModel& model, const TouchEvent& event,
                                  const TechniqueConfig& config = {});

/// Head updates move the view only; no technique reacts to them directly.
std::vector<TechniqueAction> step(TechniqueState& state, MappingModel& model,
                                  const HeadPoseEvent& event, const TechniqueConfig& config = {});

/// Symbolic name of the machine state with finger 0 written as A and
/// finger 1 as B, e.g. "drag_tap(A,B)". Used to compare against the tables.
std::string abstract_state(const TechniqueState& state);

/// One row of a technique transition table over symbolic fingers A and B,
/// assuming every touch is on the pad, taps are short and still, re-taps are
/// inside the window and the double-tap guard is off.
struct Transition {
    std::string from;
    TouchAction action = TouchAction::Down;
    char finger = 'A';
    std::string to;
    std::vector<ActionKind> actions;
};

struct TransitionTable {
    TechniqueKind technique = TechniqueKind::SideGaze;
    std::string initial;
    std::vector<std::string> states;
    std::vector<Transition> rows;

    /// Row for (state, event); every table is total over its states.
    const Transition* find(const std::string& from, TouchAction action, char finger) const;
};

TransitionTable legal_transitions(TechniqueKind kind);

std::string to_string(ActionKind kind);

}  // namespace ftvr

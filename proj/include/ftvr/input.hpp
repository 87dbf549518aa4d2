#pragma once

#include <cstdint>
#include <string>
#include <variant>

namespace ftvr {

inline constexpr int panel_width_px = 2560;
inline constexpr int panel_height_px = 1440;

/// A raw point on the front panel. Points outside [0,2559] x [0,1439] are
/// representable; they model touches that miss the pad.
struct TouchPoint {
    int x = 0;
    int y = 0;

    friend bool operator==(const TouchPoint&, const TouchPoint&) = default;
};

inline bool in_panel(const TouchPoint& p) {
    return p.x >= 0 && p.x < panel_width_px && p.y >= 0 && p.y < panel_height_px;
}

enum class TouchAction { Down, Move, Up };
enum class TouchSource { FrontPad, SidePad };

struct TouchEvent {
    std::int64_t t_ms = 0;
    TouchAction action = TouchAction::Down;
    int finger = 0;
    TouchPoint point;
    TouchSource source = TouchSource::FrontPad;

    friend bool operator==(const TouchEvent&, const TouchEvent&) = default;
};

struct HeadPoseEvent {
    std::int64_t t_ms = 0;
    double yaw_deg = 0.0;
    double pitch_deg = 0.0;

    friend bool operator==(const HeadPoseEvent&, const HeadPoseEvent&) = default;
};

using InputEvent = std::variant<TouchEvent, HeadPoseEvent>;

inline std::int64_t event_time(const InputEvent& ev) {
    return std::visit([](const auto& e) { return e.t_ms; }, ev);
}

std::string to_string(TouchAction action);
std::string to_string(TouchSource source);
TouchAction parse_touch_action(const std::string& s);
TouchSource parse_touch_source(const std::string& s);

}  // namespace ftvr

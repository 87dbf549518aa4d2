#include "ftvr/input.hpp"

#include <stdexcept>

namespace ftvr {

std::string to_string(TouchAction action) {
    switch (action) {
        case TouchAction::Down: return "down";
        case TouchAction::Move: return "move";
        case TouchAction::Up: return "up";
    }
    return "down";
}

std::string to_string(TouchSource source) {
    return source == TouchSource::FrontPad ? "front" : "side";
}

TouchAction parse_touch_action(const std::string& s) {
    if (s == "down") return TouchAction::Down;
    if (s == "move") return TouchAction::Move;
    if (s == "up") return TouchAction::Up;
    throw std::invalid_argument("unknown touch action: " + s);
}

TouchSource parse_touch_source(const std::string& s) {
    if (s == "front") return TouchSource::FrontPad;
    if (s == "side") return TouchSource::SidePad;
    throw std::invalid_argument("unknown touch source: " + s);
}

}  // namespace ftvr

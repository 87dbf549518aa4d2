#pragma once

#include "ftvr/input.hpp"
#include "ftvr/mapping.hpp"
#include "ftvr/scene.hpp"
#include "ftvr/tasks.hpp"

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace ftvr {

using json = nlohmann::json;

/// A message that violates the wire or file schema.
class ProtocolError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

json to_json(const TrialRecord& record);
TrialRecord record_from_json(const json& j);

json to_json(const TouchEvent& event);
json to_json(const HeadPoseEvent& event);
json to_json(const InputEvent& event);
/// Parses a "touch" or "head" object.
InputEvent event_from_json(const json& j);

/// Calibration JSON (fitted MappingModel without anchor state).
json to_json(const MappingModel& model);
MappingModel mapping_from_json(const json& j);
MappingModel load_mapping(const std::string& path);

/// Full scene snapshot. Quad corners are given in the node's own frame of
/// reference: world space for world-fixed nodes and head space for
/// view-fixed ones, so the client can re-project on every head update.
json scene_message(const Scene& scene);
json cursor_message(const CursorAngles& cursor);
json ui_event_message(const UiEvent& event, std::int64_t t_ms);
json key_click_message(std::int64_t t_ms);
json trial_message(const TrialRecord& record);
json summary_message(const std::vector<TrialRecord>& records);
json error_message(const std::string& code, const std::string& detail);

struct StartSession {
    TaskKind task = TaskKind::Menu15;
    TechniqueKind technique = TechniqueKind::SideGaze;
    std::optional<MappingMode> mapping_mode;
    std::uint64_t seed = 1;
    std::optional<int> participant;
};

struct EndSession {};

using ClientMessage = std::variant<StartSession, TouchEvent, HeadPoseEvent, EndSession>;

json to_json(const StartSession& start);
ClientMessage parse_client_message(const json& j);
ClientMessage parse_client_message(const std::string& text);
inline ClientMessage parse_client_message(const char* text) { return parse_client_message(std::string(text)); }

/// TrialRecord CSV; abandoned records are not written.
inline constexpr const char* records_csv_header =
    "session_id,participant,technique,task,trial,target,start_ms,commit_ms,correct,errors,presented,transcribed";

void write_records_csv(std::ostream& out, const std::vector<TrialRecord>& records);
std::vector<TrialRecord> read_records_csv(std::istream& in);

}  // namespace ftvr

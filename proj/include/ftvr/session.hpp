#pragma once

#include "ftvr/input.hpp"
#include "ftvr/mapping.hpp"
#include "ftvr/picking.hpp"
#include "ftvr/protocol.hpp"
#include "ftvr/scene.hpp"
#include "ftvr/tasks.hpp"
#include "ftvr/techniques.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ftvr {

/// An event older than the previous event of the same source.
class MonotonicityError : public std::runtime_error {
public:
    MonotonicityError(const std::string& source, std::int64_t t_ms, std::int64_t last_ms);
    const std::string& source() const { return source_; }

private:
    std::string source_;
};

/// Directory holding phrases.txt and default_mapping.json. Taken from the
/// FTVR_DATA_DIR environment variable when set, else the build-time path.
std::string data_dir();

/// The bundled phrase corpus.
const PhraseSet& default_phrase_set();

struct SessionConfig {
    TaskKind task = TaskKind::Menu15;
    TechniqueKind technique = TechniqueKind::SideGaze;
    /// Explicit mapping mode; gaze techniques must leave this empty.
    std::optional<MappingMode> mapping_mode;
    std::uint64_t seed = 1;
    std::string session_id = "s1";
    int participant = 0;

    MappingModel mapping = default_mapping_model();
    double correction_fraction = 0.25;
    TechniqueConfig technique_config;

    BinaryParams binary;
    MenuParams menu;
    KeyboardParams keyboard;

    int binary_trials = 20;
    int menu_sessions = 3;
    int menu_trials_per_session = 14;
    int keyboard_phrases = 5;
    /// Keyboard phrases; drawn from the bundled corpus with `seed` when empty.
    std::vector<std::string> phrases;

    /// Throws std::invalid_argument on an inconsistent configuration.
    void validate() const;
    MappingMode effective_mapping_mode() const;
    TaskSpec task_spec() const;
    /// Scenes follow the head only for Front-View.
    Attachment attachment() const;
};

/// Scene built for a configuration, before any task colouring.
Scene build_scene(const SessionConfig& config);

/// One participant performing one task with one technique. Consumes input
/// events in order and produces the outbound protocol messages. The session
/// is fully sequential and owns all of its state.
class Session {
public:
    explicit Session(SessionConfig config);

    /// Initial scene snapshot, cursor and metrics.
    std::vector<json> start();

    /// Applies one event. Throws MonotonicityError, leaving the session
    /// untouched, when the event is older than the last one from its source
    /// (front pad, side pad, head).
    std::vector<json> handle(const InputEvent& event);

    /// Closes the session: the in-progress trial, if any, is recorded as
    /// abandoned, and the summary message is returned.
    std::vector<json> finish();

    bool done() const { return task_.done(); }
    bool finished() const { return finished_; }
    const SessionConfig& config() const { return config_; }
    const Scene& scene() const { return scene_; }
    const TaskRunner& task() const { return task_; }
    const MappingModel& mapping() const { return mapping_; }
    const TechniqueState& technique_state() const { return technique_; }
    const CursorAngles& cursor() const { return cursor_; }
    std::optional<NodeId> hovered() const { return hovered_; }
    const std::vector<TrialRecord>& records() const { return records_; }
    int offscreen_count() const { return offscreen_; }

    /// Node under the given cursor angles for the current head pose.
    std::optional<NodeId> pick_at(const CursorAngles& cursor) const;

    json metrics_message() const;

private:
    void check_time(const InputEvent& event) const;
    void apply(const TechniqueAction& action, std::vector<json>& out);
    void repick(std::int64_t t_ms, std::vector<json>& out);

    SessionConfig config_;
    Scene scene_;
    TaskRunner task_;
    MappingModel mapping_;
    TechniqueState technique_;
    CursorAngles cursor_;
    std::optional<NodeId> hovered_;
    std::vector<TrialRecord> records_;
    int offscreen_ = 0;
    std::optional<std::int64_t> last_front_, last_side_, last_head_;
    bool started_ = false;
    bool finished_ = false;
    bool summary_sent_ = false;
};

}  // namespace ftvr

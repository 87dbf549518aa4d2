#pragma once

#include "ftvr/picking.hpp"
#include "ftvr/scene.hpp"
#include "ftvr/techniques.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ftvr {

enum class TaskKind { Binary, Menu15, Keyboard };

std::string to_string(TaskKind kind);
TaskKind parse_task(const std::string& s);

struct TaskSpec {
    TaskKind kind = TaskKind::Menu15;
    TechniqueKind technique = TechniqueKind::SideGaze;
    std::uint64_t seed = 1;
    int binary_trials = 20;
    int menu_sessions = 3;
    int menu_trials_per_session = 14;
    int keyboard_phrases = 5;
};

struct TrialRecord {
    std::string session_id;
    int participant = 0;
    TechniqueKind technique = TechniqueKind::SideGaze;
    TaskKind task = TaskKind::Menu15;
    int trial_index = 0;
    int target_id = 0;
    std::int64_t t_start_ms = 0;
    std::int64_t t_commit_ms = 0;
    bool correct = false;
    int error_commits = 0;
    std::optional<std::string> presented;
    std::optional<std::string> transcription;
    bool abandoned = false;

    double elapsed_s() const { return static_cast<double>(t_commit_ms - t_start_ms) / 1000.0; }

    friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

class InsufficientCorpus : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class EventUnderflow : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Phrase corpus: lowercase letters and spaces, one phrase per line on disk.
struct PhraseSet {
    std::vector<std::string> phrases;
    std::vector<std::string> practice;
    std::string source;
};

PhraseSet load_phrase_set(const std::string& path);
PhraseSet parse_phrase_set(std::istream& in, std::string source);

/// Built-in practice phrases, shared by every participant.
std::vector<std::string> default_practice_phrases();

/// Deterministic draw of `count` distinct phrases with length in
/// [min_len, max_len], never including a practice phrase.
std::vector<std::string> sample_phrases(const PhraseSet& set, int count, std::uint64_t seed,
                                        std::pair<int, int> length_bounds = {25, 28});

/// Condition orders, one row per participant (cycled). Williams design for
/// even n, cyclic square for odd n.
std::vector<std::vector<int>> latin_square(int n);

/// Runtime state of one study task: target sequencing, scene colouring and
/// per-trial bookkeeping. Fed with the Select / SelectMiss events produced
/// at each commit.
class TaskRunner {
public:
    TaskRunner(TaskSpec spec, std::string session_id, int participant,
               std::vector<std::string> phrases = {});

    struct Feedback {
        std::vector<TrialRecord> finished;
        bool key_click = false;
        bool scene_changed = false;
    };

    /// Paints the initial colours and texts.
    void start(Scene& scene);

    Feedback on_commit(Scene& scene, const UiEvent& event, std::int64_t t_ms);

    bool done() const { return done_; }

    /// Node the participant is asked to select next (the start button, the
    /// red target, or the next key by prefix matching).
    std::optional<NodeId> goal(const Scene& scene) const;

    /// The in-progress trial, marked abandoned, if the task is not finished.
    std::optional<TrialRecord> abandon() const;

    const TaskSpec& spec() const { return spec_; }
    const std::vector<std::string>& phrases() const { return phrases_; }
    const std::string& transcription() const { return transcription_; }
    std::optional<std::string> presented() const;
    const std::vector<int>& menu_order() const { return menu_order_; }
    int trials_completed() const { return trial_; }
    int total_trials() const;

private:
    enum class Stage { WaitStart, Running };

    TrialRecord make_record() const;
    void paint_menu(Scene& scene) const;
    void paint_binary(Scene& scene) const;
    void paint_keyboard(Scene& scene) const;
    Feedback on_binary(Scene& scene, const UiEvent& event, std::int64_t t_ms);
    Feedback on_menu(Scene& scene, const UiEvent& event, std::int64_t t_ms);
    Feedback on_keyboard(Scene& scene, const UiEvent& event, std::int64_t t_ms);

    TaskSpec spec_;
    std::string session_id_;
    int participant_;
    std::vector<std::string> phrases_;
    std::vector<int> menu_order_;

    Stage stage_ = Stage::WaitStart;
    bool done_ = false;
    int trial_ = 0;
    int red_plane_ = 0;
    std::optional<int> last_success_;
    std::int64_t t_start_ = 0;
    int errors_ = 0;
    std::string transcription_;
    bool phrase_started_ = false;
};

/// Menu target order: per session, a permutation of the non-centre buttons.
std::vector<int> menu_target_order(const TaskSpec& spec, int buttons = 15, int center = 7);

}  // namespace ftvr

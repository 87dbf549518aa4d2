#include "ftvr/tasks.hpp"

#include "ftvr/random.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>

namespace ftvr {

std::string to_string(TaskKind kind) {
    switch (kind) {
        case TaskKind::Binary: return "binary";
        case TaskKind::Menu15: return "menu15";
        case TaskKind::Keyboard: return "keyboard";
    }
    return "menu15";
}

TaskKind parse_task(const std::string& s) {
    if (s == "binary") return TaskKind::Binary;
    if (s == "menu15") return TaskKind::Menu15;
    if (s == "keyboard") return TaskKind::Keyboard;
    throw std::invalid_argument("unknown task: " + s);
}

namespace {

bool valid_phrase(const std::string& p) {
    return !p.empty() &&
           std::all_of(p.begin(), p.end(), [](char c) { return (c >= 'a' && c <= 'z') || c == ' '; });
}

std::string normalise(std::string line) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) {
        line.pop_back();
    }
    std::size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos) return {};
    line = line.substr(start);
    std::transform(line.begin(), line.end(), line.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return line;
}

}  // namespace

std::vector<std::string> default_practice_phrases() {
    return {"the quick brown fox jumps", "practice makes perfect"};
}

PhraseSet parse_phrase_set(std::istream& in, std::string source) {
    PhraseSet set;
    set.source = std::move(source);
    set.practice = default_practice_phrases();
    std::string line;
    while (std::getline(in, line)) {
        line = normalise(line);
        // Lines outside the keyboard's alphabet cannot be typed and are skipped.
        if (valid_phrase(line)) set.phrases.push_back(line);
    }
    return set;
}

PhraseSet load_phrase_set(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open phrase corpus: " + path);
    return parse_phrase_set(in, path);
}

std::vector<std::string> sample_phrases(const PhraseSet& set, int count, std::uint64_t seed,
                                        std::pair<int, int> length_bounds) {
    const std::set<std::string> practice(set.practice.begin(), set.practice.end());
    std::vector<std::string> pool;
    std::set<std::string> seen;
    for (const auto& p : set.phrases) {
        const auto len = static_cast<int>(p.size());
        if (len < length_bounds.first || len > length_bounds.second) continue;
        if (practice.contains(p) || !seen.insert(p).second) continue;
        pool.push_back(p);
    }
    if (count < 0 || static_cast<int>(pool.size()) < count) {
        throw InsufficientCorpus("sample_phrases: need " + std::to_string(count) + " phrases of length " +
                                 std::to_string(length_bounds.first) + ".." +
                                 std::to_string(length_bounds.second) + ", corpus has " +
                                 std::to_string(pool.size()));
    }
    Rng rng = Rng::derive(seed, 0x7068);
    rng.shuffle(std::span<std::string>(pool));
    pool.resize(static_cast<std::size_t>(count));
    return pool;
}

std::vector<std::vector<int>> latin_square(int n) {
    if (n < 1) throw std::invalid_argument("latin_square: n must be >= 1");
    std::vector<int> first(static_cast<std::size_t>(n));
    if (n % 2 == 0) {
        // 0, 1, n-1, 2, n-2, ...
        int lo = 1, hi = n - 1;
        first[0] = 0;
        for (int j = 1; j < n; ++j) first[static_cast<std::size_t>(j)] = (j % 2 == 1) ? lo++ : hi--;
    } else {
        std::iota(first.begin(), first.end(), 0);
    }
    std::vector<std::vector<int>> square(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n)));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            square[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                (first[static_cast<std::size_t>(j)] + i) % n;
        }
    }
    return square;
}

std::vector<int> menu_target_order(const TaskSpec& spec, int buttons, int center) {
    Rng rng = Rng::derive(spec.seed, 0x6d65);
    std::vector<int> order;
    for (int s = 0; s < spec.menu_sessions; ++s) {
        std::vector<int> block;
        for (int b = 0; b < buttons; ++b) {
            if (b != center) block.push_back(b);
        }
        rng.shuffle(std::span<int>(block));
        block.resize(std::min<std::size_t>(block.size(), static_cast<std::size_t>(spec.menu_trials_per_session)));
        order.insert(order.end(), block.begin(), block.end());
    }
    return order;
}

TaskRunner::TaskRunner(TaskSpec spec, std::string session_id, int participant,
                       std::vector<std::string> phrases)
    : spec_(spec), session_id_(std::move(session_id)), participant_(participant), phrases_(std::move(phrases)) {
    switch (spec_.kind) {
        case TaskKind::Binary:
            red_plane_ = static_cast<int>(Rng::derive(spec_.seed, 0x6269).below(2));
            break;
        case TaskKind::Menu15:
            menu_order_ = menu_target_order(spec_);
            break;
        case TaskKind::Keyboard:
            if (static_cast<int>(phrases_.size()) < spec_.keyboard_phrases) {
                throw InsufficientCorpus("keyboard task needs " + std::to_string(spec_.keyboard_phrases) +
                                         " phrases");
            }
            phrases_.resize(static_cast<std::size_t>(spec_.keyboard_phrases));
            stage_ = Stage::Running;
            break;
    }
    done_ = total_trials() == 0;
}

int TaskRunner::total_trials() const {
    switch (spec_.kind) {
        case TaskKind::Binary: return spec_.binary_trials;
        case TaskKind::Menu15: return static_cast<int>(menu_order_.size());
        case TaskKind::Keyboard: return static_cast<int>(phrases_.size());
    }
    return 0;
}

std::optional<std::string> TaskRunner::presented() const {
    if (spec_.kind != TaskKind::Keyboard || done_) return std::nullopt;
    return phrases_[static_cast<std::size_t>(trial_)];
}

void TaskRunner::start(Scene& scene) {
    switch (spec_.kind) {
        case TaskKind::Binary: paint_binary(scene); break;
        case TaskKind::Menu15: paint_menu(scene); break;
        case TaskKind::Keyboard: paint_keyboard(scene); break;
    }
}

void TaskRunner::paint_binary(Scene& scene) const {
    for (int label = 0; label < 2; ++label) {
        if (auto id = scene.find_plane(label)) {
            scene.node(*id).color = label == red_plane_ ? ColorId::Red : ColorId::Blue;
        }
    }
}

void TaskRunner::paint_menu(Scene& scene) const {
    for (NodeId id : scene.find_all(UiKind::Button)) {
        auto& n = scene.node(id);
        const bool success = last_success_ && n.role.label == *last_success_;
        n.color = success ? ColorId::Green : ColorId::Neutral;
    }
    if (done_) return;
    const int red = stage_ == Stage::WaitStart ? 7 : menu_order_[static_cast<std::size_t>(trial_)];
    if (auto id = scene.find_button(red)) scene.node(*id).color = ColorId::Red;
}

void TaskRunner::paint_keyboard(Scene& scene) const {
    if (auto id = scene.find_text("presented")) {
        scene.node(*id).text = done_ ? std::string() : phrases_[static_cast<std::size_t>(trial_)];
    }
    if (auto id = scene.find_text("transcription")) scene.node(*id).text = transcription_;
}

std::optional<NodeId> TaskRunner::goal(const Scene& scene) const {
    if (done_) return std::nullopt;
    switch (spec_.kind) {
        case TaskKind::Binary: return scene.find_plane(red_plane_);
        case TaskKind::Menu15:
            return scene.find_button(stage_ == Stage::WaitStart ? 7 : menu_order_[static_cast<std::size_t>(trial_)]);
        case TaskKind::Keyboard: {
            const std::string& target = phrases_[static_cast<std::size_t>(trial_)];
            if (transcription_ == target) return scene.find_key(keys::done);
            if (target.compare(0, transcription_.size(), transcription_) == 0) {
                return scene.find_key(target[transcription_.size()]);
            }
            return scene.find_key(keys::backspace);
        }
    }
    return std::nullopt;
}

TrialRecord TaskRunner::make_record() const {
    TrialRecord r;
    r.session_id = session_id_;
    r.participant = participant_;
    r.technique = spec_.technique;
    r.task = spec_.kind;
    r.trial_index = trial_;
    r.t_start_ms = t_start_;
    r.error_commits = errors_;
    switch (spec_.kind) {
        case TaskKind::Binary: r.target_id = red_plane_; break;
        case TaskKind::Menu15: r.target_id = menu_order_[static_cast<std::size_t>(trial_)]; break;
        case TaskKind::Keyboard:
            r.target_id = trial_;
            r.presented = phrases_[static_cast<std::size_t>(trial_)];
            r.transcription = transcription_;
            break;
    }
    return r;
}

std::optional<TrialRecord> TaskRunner::abandon() const {
    if (done_) return std::nullopt;
    TrialRecord r = make_record();
    r.abandoned = true;
    r.correct = false;
    r.t_commit_ms = r.t_start_ms;
    return r;
}

TaskRunner::Feedback TaskRunner::on_commit(Scene& scene, const UiEvent& event, std::int64_t t_ms) {
    if (done_) return {};
    if (event.kind != UiEventKind::Select && event.kind != UiEventKind::SelectMiss) return {};
    switch (spec_.kind) {
        case TaskKind::Binary: return on_binary(scene, event, t_ms);
        case TaskKind::Menu15: return on_menu(scene, event, t_ms);
        case TaskKind::Keyboard: return on_keyboard(scene, event, t_ms);
    }
    return {};
}

TaskRunner::Feedback TaskRunner::on_binary(Scene& scene, const UiEvent& event, std::int64_t t_ms) {
    Feedback fb;
    const bool hit_red = event.kind == UiEventKind::Select &&
                         scene.node(*event.node_id).role.kind == UiKind::Plane &&
                         scene.node(*event.node_id).role.label == red_plane_;
    if (stage_ == Stage::WaitStart) {
        if (!hit_red) return fb;
        stage_ = Stage::Running;
    } else if (!hit_red) {
        ++errors_;
        return fb;
    } else {
        TrialRecord r = make_record();
        r.t_commit_ms = t_ms;
        r.correct = errors_ == 0;
        fb.finished.push_back(std::move(r));
        ++trial_;
        done_ = trial_ >= spec_.binary_trials;
    }
    // Selected plane turns blue, the other one becomes the red target.
    red_plane_ = 1 - red_plane_;
    t_start_ = t_ms;
    errors_ = 0;
    paint_binary(scene);
    fb.scene_changed = true;
    return fb;
}

TaskRunner::Feedback TaskRunner::on_menu(Scene& scene, const UiEvent& event, std::int64_t t_ms) {
    Feedback fb;
    const int label = event.kind == UiEventKind::Select && scene.node(*event.node_id).role.kind == UiKind::Button
                          ? scene.node(*event.node_id).role.label
                          : -1;
    if (stage_ == Stage::WaitStart) {
        if (label != 7) return fb;
        stage_ = Stage::Running;
        t_start_ = t_ms;
        errors_ = 0;
        last_success_.reset();
        paint_menu(scene);
        fb.scene_changed = true;
        return fb;
    }
    const int target = menu_order_[static_cast<std::size_t>(trial_)];
    if (label != target) {
        ++errors_;
        return fb;
    }
    TrialRecord r = make_record();
    r.t_commit_ms = t_ms;
    r.correct = errors_ == 0;
    fb.finished.push_back(std::move(r));
    last_success_ = target;
    ++trial_;
    done_ = trial_ >= static_cast<int>(menu_order_.size());
    stage_ = Stage::WaitStart;
    paint_menu(scene);
    fb.scene_changed = true;
    return fb;
}

TaskRunner::Feedback TaskRunner::on_keyboard(Scene& scene, const UiEvent& event, std::int64_t t_ms) {
    Feedback fb;
    if (event.kind == UiEventKind::SelectMiss || scene.node(*event.node_id).role.kind != UiKind::Key) {
        ++errors_;
        return fb;
    }
    fb.key_click = true;
    if (!phrase_started_) {
        phrase_started_ = true;
        t_start_ = t_ms;
    }
    const char key = scene.node(*event.node_id).role.key;
    if (key == keys::done) {
        TrialRecord r = make_record();
        r.t_commit_ms = t_ms;
        r.correct = transcription_ == phrases_[static_cast<std::size_t>(trial_)];
        fb.finished.push_back(std::move(r));
        ++trial_;
        done_ = trial_ >= static_cast<int>(phrases_.size());
        transcription_.clear();
        errors_ = 0;
        phrase_started_ = false;
    } else if (key == keys::backspace) {
        if (!transcription_.empty()) transcription_.pop_back();
    } else {
        transcription_.push_back(key);
    }
    paint_keyboard(scene);
    fb.scene_changed = true;
    return fb;
}

}  // namespace ftvr

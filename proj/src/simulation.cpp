#include "ftvr/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>

namespace ftvr {

NoiseModel NoiseModel::from_mean_radial(double mean_radial_px, double axis_ratio) {
    NoiseModel n;
    n.axis_ratio = axis_ratio;
    n.touch_sigma_px = 1.0;
    n.touch_sigma_px = mean_radial_px / n.mean_radial_error();
    return n;
}

NoiseModel NoiseModel::zero() {
    NoiseModel n;
    n.touch_sigma_px = 0.0;
    n.tap_timing_jitter_ms = 0.0;
    n.head_settle_noise_deg = 0.0;
    n.correction_sigma_px = 0.0;
    n.retap_sigma_px = 0.0;
    n.second_finger_sigma_px = 0.0;
    return n;
}

double NoiseModel::mean_radial_error() const {
    // E|(sx Z1, sy Z2)| = sqrt(pi/2) * mean over phi of sqrt(sx^2 cos^2 + sy^2 sin^2).
    const double sx = touch_sigma_px, sy = touch_sigma_px * axis_ratio;
    constexpr int steps = 4096;
    double sum = 0.0;
    for (int i = 0; i < steps; ++i) {
        const double phi = (i + 0.5) * 2.0 * std::numbers::pi / steps;
        const double c = std::cos(phi), s = std::sin(phi);
        sum += std::sqrt(sx * sx * c * c + sy * sy * s * s);
    }
    return std::sqrt(std::numbers::pi / 2.0) * sum / steps;
}

Eigen::Vector2d NoiseModel::sample_touch(Rng& rng) const {
    const double x = rng.normal(0.0, touch_sigma_px);
    const double y = rng.normal(0.0, touch_sigma_px * axis_ratio);
    return {x, y};
}

void NoiseModel::validate() const {
    if (touch_sigma_px < 0 || axis_ratio < 0 || tap_timing_jitter_ms < 0 || head_settle_noise_deg < 0 ||
        correction_sigma_px < 0 || retap_sigma_px < 0 || second_finger_sigma_px < 0) {
        throw std::invalid_argument("noise scales must be non-negative");
    }
}

void UserModel::validate() const {
    if (!(head_velocity_deg_s > 0) || !(drag_velocity_px_s > 0)) {
        throw std::invalid_argument("user velocities must be positive");
    }
    if (corrective_iterations < 0) throw std::invalid_argument("corrective_iterations must be >= 0");
    if (reaction_ms < 0 || verify_ms < 0 || retap_delay_ms < 0 || !(sample_interval_ms > 0) ||
        !(tap_duration_ms > 0)) {
        throw std::invalid_argument("user timings out of range");
    }
    if (max_attempts < 1) throw std::invalid_argument("max_attempts must be >= 1");
}

namespace {

constexpr double margin_px = 24.0;

Eigen::Vector2d clamp_to_panel(Eigen::Vector2d p, double margin = margin_px) {
    p.x() = std::clamp(p.x(), margin, panel_width_px - 1 - margin);
    p.y() = std::clamp(p.y(), margin, panel_height_px - 1 - margin);
    return p;
}

TouchPoint to_point(const Eigen::Vector2d& p) {
    return {static_cast<int>(std::lround(p.x())), static_cast<int>(std::lround(p.y()))};
}

Eigen::Vector2d to_vec(const TouchPoint& p) { return {static_cast<double>(p.x), static_cast<double>(p.y)}; }

std::int64_t ms(double v) { return static_cast<std::int64_t>(std::llround(v)); }

class Simulator {
public:
    Simulator(const SessionConfig& config, const UserModel& user, const NoiseModel& noise, std::uint64_t seed)
        : session_(config), user_(user), noise_(noise), rng_(Rng::derive(seed, 0x73696d)), map_(config.mapping) {
        user.validate();
        noise.validate();
        result_.trace.header.task = config.task;
        result_.trace.header.technique = config.technique;
        result_.trace.header.seed = config.seed;
        result_.trace.header.mapping_mode = config.mapping_mode;
        result_.trace.header.participant = config.participant;
        result_.trace.header.session_id = config.session_id;
        if (config.task == TaskKind::Keyboard) result_.trace.header.phrases = session_.task().phrases();
    }

    SimulationResult run() {
        session_.start();
        t_ = 500;
        std::string last_key;
        int attempts = 0;
        try {
            while (!session_.done()) {
                const auto goal = current_goal();
                if (!goal) break;
                const std::string key = progress_key(*goal);
                attempts = key == last_key ? attempts + 1 : 0;
                last_key = key;
                if (attempts >= user_.max_attempts) throw NonTermination("goal not reached");
                t_ += ms(user_.reaction_ms);
                select(*goal);
            }
        } catch (const NonTermination&) {
            result_.abandoned = true;
        }
        release_all();
        session_.finish();
        result_.records = session_.records();
        result_.offscreen_count = session_.offscreen_count();
        return std::move(result_);
    }

private:
    Session session_;
    UserModel user_;
    NoiseModel noise_;
    Rng rng_;
    MappingModel map_;  // the user's own sense of where things are on the pad
    SimulationResult result_;
    std::int64_t t_ = 0;
    std::int64_t last_touch_t_ = 0;
    double head_yaw_ = 0.0, head_pitch_ = 0.0;
    std::optional<TouchPoint> dragger_;  // finger 0 held on the front pad
    int typo_phrase_ = -1;               // phrase whose typo the user decided to leave

    // -- event plumbing ------------------------------------------------------

    void emit(const InputEvent& ev) {
        if (result_.trace.events.size() >= user_.max_events) throw NonTermination("event budget exhausted");
        result_.trace.events.push_back(ev);
        session_.handle(ev);
    }

    void touch(TouchAction action, int finger, TouchPoint p, TouchSource source = TouchSource::FrontPad) {
        t_ = std::max(t_, last_touch_t_);
        last_touch_t_ = t_;
        emit(TouchEvent{t_, action, finger, p, source});
    }

    void head(double yaw, double pitch, std::int64_t t) {
        head_yaw_ = yaw;
        head_pitch_ = pitch;
        emit(HeadPoseEvent{t, yaw, pitch});
    }

    void release_all() {
        if (dragger_) {
            t_ += ms(user_.tap_duration_ms);
            touch(TouchAction::Up, 0, *dragger_);
            dragger_.reset();
        }
    }

    // -- goals -----------------------------------------------------------------

    std::optional<NodeId> current_goal() {
        const auto& task = session_.task();
        auto goal = task.goal(session_.scene());
        if (!goal || session_.config().task != TaskKind::Keyboard) return goal;
        const Scene& scene = session_.scene();
        const std::string& typed = task.transcription();
        const std::string target = task.presented().value_or("");
        if (typo_phrase_ != task.trials_completed() && scene.node(*goal).role.key == keys::backspace &&
            target.compare(0, std::min(typed.size(), target.size()), typed, 0,
                           std::min(typed.size(), target.size())) != 0) {
            // A fresh typo: either fix it or carry on regardless.
            if (rng_.uniform() < user_.notice_typo_probability) return goal;
            typo_phrase_ = task.trials_completed();
        }
        if (typo_phrase_ == task.trials_completed()) {
            if (typed.size() >= target.size()) return scene.find_key(keys::done);
            return scene.find_key(target[typed.size()]);
        }
        return goal;
    }

    std::string progress_key(NodeId goal) const {
        const auto& task = session_.task();
        return std::to_string(goal) + "|" + std::to_string(task.trials_completed()) + "|" + task.transcription() +
               "|" + std::to_string(session_.records().size());
    }

    // World angles of the goal's centre.
    CursorAngles goal_angles(NodeId goal) const {
        const Eigen::Vector2d c = angular_center(session_.scene().node(goal));
        return {c.x(), c.y()};
    }

    // Cursor angles that put the cursor on the goal for the current head pose.
    CursorAngles goal_cursor(NodeId goal) const {
        const CursorAngles w = goal_angles(goal);
        return {w.theta1_deg - head_yaw_, w.theta2_deg - head_pitch_};
    }

    Eigen::Vector2d aim_pixel(NodeId goal) const { return clamp_to_panel(map_.pixel_of(goal_cursor(goal))); }

    bool on_goal(NodeId goal) const { return session_.hovered() == goal; }

    // -- techniques ------------------------------------------------------------

    void select(NodeId goal) {
        switch (session_.config().technique) {
            case TechniqueKind::SideGaze:
            case TechniqueKind::FrontGaze: gaze_select(goal); break;
            case TechniqueKind::FrontWorld:
            case TechniqueKind::FrontView: front_select(goal); break;
            case TechniqueKind::TwoFingers: two_fingers_select(goal); break;
            case TechniqueKind::DragNTap: drag_n_tap_select(goal); break;
        }
    }

    std::int64_t tap_ms() const { return std::max<std::int64_t>(1, ms(user_.tap_duration_ms)); }

    void tap(int finger, TouchPoint p, TouchSource source = TouchSource::FrontPad) {
        touch(TouchAction::Down, finger, p, source);
        t_ += tap_ms();
        touch(TouchAction::Up, finger, p, source);
    }

    // Head sweeps at constant velocity to the goal plus settle noise; the tap
    // is timed from the planned arrival and may land early or late.
    void gaze_select(NodeId goal) {
        const CursorAngles w = goal_angles(goal);
        const double yaw1 = w.theta1_deg + rng_.normal(0.0, noise_.head_settle_noise_deg);
        const double pitch1 = w.theta2_deg + rng_.normal(0.0, noise_.head_settle_noise_deg);
        const double yaw0 = head_yaw_, pitch0 = head_pitch_;
        const double dist = std::hypot(yaw1 - yaw0, pitch1 - pitch0);
        const double duration = dist / user_.head_velocity_deg_s * 1000.0;
        const std::int64_t t0 = t_;
        const std::int64_t t_arrive = t0 + ms(duration);

        std::int64_t t_up = t_arrive + ms(user_.verify_ms + rng_.normal(0.0, noise_.tap_timing_jitter_ms));
        t_up = std::max(t_up, std::max(t0, last_touch_t_) + tap_ms());
        const std::int64_t t_down = t_up - tap_ms();

        const TouchSource source = designated_pad(session_.config().technique);
        const TouchPoint at = source == TouchSource::SidePad
                                  ? TouchPoint{panel_width_px / 2, panel_height_px / 2}
                                  : to_point(Eigen::Vector2d(panel_width_px / 2.0, panel_height_px / 2.0) +
                                             noise_.sample_touch(rng_));

        const int steps = std::max(1, static_cast<int>(std::ceil(duration / user_.sample_interval_ms)));
        bool down_sent = false, up_sent = false;
        auto flush_touch = [&](std::int64_t until) {
            if (!down_sent && t_down < until) {
                t_ = t_down;
                touch(TouchAction::Down, 0, at, source);
                down_sent = true;
            }
            if (down_sent && !up_sent && t_up < until) {
                t_ = t_up;
                touch(TouchAction::Up, 0, at, source);
                up_sent = true;
            }
        };
        if (dist > 0.0) {
            for (int k = 1; k <= steps; ++k) {
                const double f = static_cast<double>(k) / steps;
                const std::int64_t tk = t0 + ms(duration * f);
                flush_touch(tk);
                head(yaw0 + f * (yaw1 - yaw0), pitch0 + f * (pitch1 - pitch0), tk);
            }
        }
        flush_touch(std::numeric_limits<std::int64_t>::max());
        t_ = std::max(t_up, t_arrive);
    }

    // Open-loop tap at the proprioceptive estimate of the goal. With a
    // relative mapping the cursor is first dragged onto the goal.
    void front_select(NodeId goal) {
        if (session_.mapping().mode == MappingMode::Absolute) {
            tap(0, to_point(aim_pixel(goal) + noise_.sample_touch(rng_)));
            return;
        }
        if (!on_goal(goal)) {
            const TouchPoint start = place_for_drag(goal);
            touch(TouchAction::Down, 0, start);
            TouchPoint at = start;
            drag_onto(goal, 0, at);
            t_ += ms(user_.sample_interval_ms);
            touch(TouchAction::Up, 0, at);
            t_ += ms(user_.reaction_ms / 2);
        }
        tap(0, to_point(Eigen::Vector2d(panel_width_px / 2.0, panel_height_px / 2.0) +
                        noise_.sample_touch(rng_) * 0.25));
    }

    void two_fingers_select(NodeId goal) {
        if (!dragger_) {
            const TouchPoint land = session_.mapping().mode == MappingMode::Absolute
                                        ? to_point(aim_pixel(goal) + noise_.sample_touch(rng_))
                                        : place_for_drag(goal);
            touch(TouchAction::Down, 0, land);
            if (!in_panel(land)) {
                t_ += tap_ms();
                touch(TouchAction::Up, 0, land);
                return;
            }
            dragger_ = land;
        }
        TouchPoint at = *dragger_;
        drag_onto(goal, 0, at);
        dragger_ = at;
        t_ += ms(user_.verify_ms);
        const double side = dragger_->x < panel_width_px / 2 ? 1.0 : -1.0;
        const Eigen::Vector2d b = to_vec(*dragger_) + Eigen::Vector2d(side * user_.second_finger_offset_px, 0.0) +
                                  Eigen::Vector2d(rng_.normal(0.0, noise_.second_finger_sigma_px),
                                                  rng_.normal(0.0, noise_.second_finger_sigma_px));
        tap(1, to_point(clamp_to_panel(b, 0.0)));
    }

    void drag_n_tap_select(NodeId goal) {
        const TouchPoint start = session_.mapping().mode == MappingMode::Absolute
                                     ? to_point(aim_pixel(goal) + noise_.sample_touch(rng_))
                                     : place_for_drag(goal);
        touch(TouchAction::Down, 0, start);
        if (!in_panel(start)) {
            t_ += tap_ms();
            touch(TouchAction::Up, 0, start);
            return;
        }
        TouchPoint at = start;
        drag_onto(goal, 0, at);
        t_ += ms(user_.verify_ms / 2);
        touch(TouchAction::Up, 0, at);
        t_ += ms(user_.retap_delay_ms);
        const Eigen::Vector2d retap = to_vec(at) + Eigen::Vector2d(rng_.normal(0.0, noise_.retap_sigma_px),
                                                                   rng_.normal(0.0, noise_.retap_sigma_px));
        tap(0, to_point(clamp_to_panel(retap, 0.0)));
    }

    // Where a finger lands to start a relative drag: roughly the pad centre,
    // offset so the drag toward the goal stays on the pad.
    TouchPoint place_for_drag(NodeId goal) {
        const Eigen::Vector2d need = drag_delta(goal);
        const Eigen::Vector2d centre(panel_width_px / 2.0, panel_height_px / 2.0);
        return to_point(clamp_to_panel(centre - need / 2.0 + noise_.sample_touch(rng_) * 0.25));
    }

    // Pixel motion that carries the current cursor onto the goal.
    Eigen::Vector2d drag_delta(NodeId goal) const {
        const CursorAngles want = goal_cursor(goal);
        const CursorAngles& have = session_.cursor();
        return {(want.theta1_deg - have.theta1_deg) * map_.ax, (want.theta2_deg - have.theta2_deg) * map_.ay};
    }

    // Closed-loop dragging with `finger` (currently at `at`) until the cursor
    // hovers the goal or the corrections run out. When the pad edge is in the
    // way the finger is lifted and put down again (clutching).
    void drag_onto(NodeId goal, int finger, TouchPoint& at) {
        const bool absolute = session_.mapping().mode == MappingMode::Absolute;
        for (int i = 0; i <= user_.corrective_iterations && !on_goal(goal); ++i) {
            if (i > 0) t_ += ms(user_.reaction_ms / 2);
            const Eigen::Vector2d err(rng_.normal(0.0, noise_.correction_sigma_px),
                                      rng_.normal(0.0, noise_.correction_sigma_px));
            const Eigen::Vector2d want = to_vec(at) + drag_delta(goal) + err;
            const Eigen::Vector2d reach = clamp_to_panel(want);
            move_to(finger, at, to_point(reach));
            if (!absolute && (reach - want).norm() > 1.0) clutch(finger, at, want - reach);
        }
    }

    void move_to(int finger, TouchPoint& at, TouchPoint to) {
        const Eigen::Vector2d a = to_vec(at), b = to_vec(to);
        const double duration = (b - a).norm() / user_.drag_velocity_px_s * 1000.0;
        const int steps = std::max(1, static_cast<int>(std::ceil(duration / user_.sample_interval_ms)));
        const std::int64_t t0 = t_;
        for (int k = 1; k <= steps; ++k) {
            t_ = t0 + std::max<std::int64_t>(k, ms(duration * k / steps));
            const TouchPoint p = to_point(a + (b - a) * (static_cast<double>(k) / steps));
            touch(TouchAction::Move, finger, p);
        }
        at = to;
    }

    void clutch(int finger, TouchPoint& at, const Eigen::Vector2d& remaining) {
        t_ += ms(user_.sample_interval_ms);
        touch(TouchAction::Up, finger, at);
        // Wait out the re-tap window so the new touch starts a fresh drag.
        t_ += session_.config().technique_config.retap_window_ms + ms(user_.reaction_ms / 2);
        const Eigen::Vector2d centre(panel_width_px / 2.0, panel_height_px / 2.0);
        at = to_point(clamp_to_panel(centre - remaining / 2.0));
        touch(TouchAction::Down, finger, at);
    }
};

}  // namespace

SimulationResult simulate_participant(const SessionConfig& config, const UserModel& user, const NoiseModel& noise,
                                      std::uint64_t seed) {
    return Simulator(config, user, noise, seed).run();
}

std::vector<StudyRun> simulate_study(const StudyPlan& plan) {
    if (plan.techniques.empty()) throw std::invalid_argument("simulate_study: no techniques");
    if (plan.participants < 1) throw std::invalid_argument("simulate_study: need at least one participant");
    const auto orders = latin_square(static_cast<int>(plan.techniques.size()));

    auto run_participant = [&plan, &orders](int p) {
        std::vector<StudyRun> runs;
        const auto& order = orders[static_cast<std::size_t>(p - 1) % orders.size()];
        for (int index : order) {
            const TechniqueKind technique = plan.techniques[static_cast<std::size_t>(index)];
            SessionConfig config = plan.base;
            config.task = plan.task;
            config.technique = technique;
            config.participant = p;
            config.seed = Rng::derive(plan.seed, static_cast<std::uint64_t>(p) * 64 +
                                                     static_cast<std::uint64_t>(technique))
                              .next_u64() >>
                          11;
            config.session_id = "p" + std::to_string(p) + "-" + to_string(technique) + "-" + to_string(plan.task);
            if (is_gaze(technique)) config.mapping_mode.reset();
            runs.push_back({p, technique, simulate_participant(config, plan.user, plan.noise, config.seed)});
        }
        return runs;
    };

    std::vector<std::future<std::vector<StudyRun>>> futures;
    for (int p = 1; p <= plan.participants; ++p) futures.push_back(std::async(std::launch::async, run_participant, p));
    std::vector<StudyRun> out;
    for (auto& f : futures) {
        for (auto& run : f.get()) out.push_back(std::move(run));
    }
    return out;
}

CalibrationGrid CalibrationGrid::standard() {
    CalibrationGrid g;
    for (int i = 0; i < 13; ++i) g.theta1_deg.push_back(-24.0 + 4.0 * i);
    for (int j = 0; j < 9; ++j) g.theta2_deg.push_back(-10.0 + 2.5 * j);
    return g;
}

std::vector<CalibrationSample> simulate_calibration(const MappingModel& planted, const NoiseModel& noise,
                                                    const CalibrationGrid& grid, int participant,
                                                    std::uint64_t seed) {
    noise.validate();
    Rng rng = Rng::derive(seed, 0x63616c + static_cast<std::uint64_t>(participant));
    std::vector<CalibrationSample> out;
    out.reserve(grid.samples_per_participant());
    for (int s = 0; s < grid.sessions; ++s) {
        std::vector<std::pair<double, double>> targets;
        for (double t1 : grid.theta1_deg) {
            for (double t2 : grid.theta2_deg) targets.emplace_back(t1, t2);
        }
        rng.shuffle(std::span<std::pair<double, double>>(targets));
        for (const auto& [t1, t2] : targets) {
            const Eigen::Vector2d ideal = planted.pixel_of({t1, t2});
            TouchPoint p;
            int tries = 0;
            do {
                p = to_point(ideal + noise.sample_touch(rng));
            } while (!in_panel(p) && ++tries < 1000);
            if (!in_panel(p)) p = to_point(clamp_to_panel(ideal, 0.0));
            out.push_back({t1, t2, p, participant, s});
        }
    }
    return out;
}

}  // namespace ftvr

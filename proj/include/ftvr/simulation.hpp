#pragma once

#include "ftvr/mapping.hpp"
#include "ftvr/random.hpp"
#include "ftvr/session.hpp"
#include "ftvr/tasks.hpp"
#include "ftvr/trace.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace ftvr {

/// Motor and timing noise of a synthetic user. Touch landing error is an
/// anisotropic Gaussian with sigma_x = touch_sigma_px and
/// sigma_y = touch_sigma_px * axis_ratio.
struct NoiseModel {
    double touch_sigma_px = 0.0;
    double axis_ratio = 1.0;
    double tap_timing_jitter_ms = 40.0;
    double head_settle_noise_deg = 0.8;
    double correction_sigma_px = 15.0;     // residual error of a visually guided drag
    double retap_sigma_px = 15.0;          // Drag-n-Tap re-tap distance from the lift point
    double second_finger_sigma_px = 10.0;  // Two-Fingers tap placement

    /// Default model, with touch sigma solved so the mean radial landing
    /// error equals `mean_radial_px`.
    static NoiseModel from_mean_radial(double mean_radial_px = 184.0, double axis_ratio = 1.0);
    /// Every scale set to zero.
    static NoiseModel zero();

    /// Expected radial landing error, by quadrature over the angle.
    double mean_radial_error() const;
    Eigen::Vector2d sample_touch(Rng& rng) const;
    void validate() const;
};

/// Behavioural parameters of a synthetic user.
struct UserModel {
    double reaction_ms = 420.0;
    double head_velocity_deg_s = 50.0;
    double drag_velocity_px_s = 1200.0;
    int corrective_iterations = 3;
    double verify_ms = 250.0;  // dwell on the target before committing
    double tap_duration_ms = 90.0;
    double retap_delay_ms = 180.0;
    double second_finger_offset_px = 220.0;
    double sample_interval_ms = 16.0;  // touch-move and head-pose rate
    double notice_typo_probability = 0.9;
    int max_attempts = 12;  // per goal, before the trial is abandoned
    std::size_t max_events = 400000;

    void validate() const;
};

class NonTermination : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SimulationResult {
    Trace trace;
    std::vector<TrialRecord> records;  // includes an abandoned record if the guard fired
    int offscreen_count = 0;
    bool abandoned = false;
};

/// Runs one synthetic participant through one session. The user observes
/// the live session (cursor, hover, task goal) and reacts, so the returned
/// trace replays to exactly the returned records.
SimulationResult simulate_participant(const SessionConfig& config, const UserModel& user, const NoiseModel& noise,
                                      std::uint64_t seed);

/// Several participants each doing every listed technique in Latin-square
/// order. Participants run in parallel; results are ordered by participant,
/// then by the order the participant used.
struct StudyPlan {
    TaskKind task = TaskKind::Menu15;
    std::vector<TechniqueKind> techniques;
    int participants = 1;
    std::uint64_t seed = 1;
    SessionConfig base;  // task, technique, seed, participant and session id are overwritten
    UserModel user;
    NoiseModel noise = NoiseModel::from_mean_radial();
};

struct StudyRun {
    int participant = 0;
    TechniqueKind technique = TechniqueKind::SideGaze;
    SimulationResult result;
};

std::vector<StudyRun> simulate_study(const StudyPlan& plan);

/// Target grid of the calibration task: every (theta1, theta2) pair shown
/// once per session.
struct CalibrationGrid {
    std::vector<double> theta1_deg;
    std::vector<double> theta2_deg;
    int sessions = 6;

    /// 13 x 9 targets spanning +-24 deg horizontally and +-10 deg vertically.
    static CalibrationGrid standard();
    std::size_t samples_per_participant() const { return theta1_deg.size() * theta2_deg.size() * sessions; }
};

/// Calibration touches of one participant: the planted map's pixel for each
/// target plus landing noise, redrawn while it falls off the panel, and
/// rounded to whole pixels.
std::vector<CalibrationSample> simulate_calibration(const MappingModel& planted, const NoiseModel& noise,
                                                    const CalibrationGrid& grid, int participant,
                                                    std::uint64_t seed);

}  // namespace ftvr

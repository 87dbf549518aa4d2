#pragma once

#include "ftvr/input.hpp"
#include "ftvr/picking.hpp"

#include <optional>
#include <span>
#include <stdexcept>
#include <string>

namespace ftvr {

/// One calibration touch: the angles of the displayed target and where the
/// participant touched the front pad.
struct CalibrationSample {
    double target_theta1_deg = 0.0;
    double target_theta2_deg = 0.0;
    TouchPoint touch;
    int participant_id = 0;
    int session_index = 0;
};

enum class MappingMode { Absolute, Relative, Hybrid };

/// Only Linear is implemented; the slot exists for a future velocity-gain map.
enum class GainCurve { Linear };

struct MappingAnchor {
    bool active = false;
    TouchPoint last_point;
    CursorAngles cursor;
};

/// Affine pixel <-> angle map, x = ax * theta1 + bx and y = ay * theta2 + by,
/// plus the mapping mode and the per-session anchor used by relative modes.
struct MappingModel {
    double ax = 40.0;
    double bx = 1280.0;
    double ay = -35.0;
    double by = 720.0;
    double r_x = 1.0;
    double r_y = 1.0;
    double dispersion_px = 0.0;
    MappingMode mode = MappingMode::Absolute;
    double correction_fraction = 0.25;
    GainCurve gain = GainCurve::Linear;
    MappingAnchor anchor;

    /// Angles whose image under the fitted map is `p`.
    CursorAngles absolute_angles(double x, double y) const;
    CursorAngles absolute_angles(const TouchPoint& p) const {
        return absolute_angles(static_cast<double>(p.x), static_cast<double>(p.y));
    }
    /// Panel position (fractional pixels) of the given angles.
    Eigen::Vector2d pixel_of(const CursorAngles& angles) const;
};

class DegenerateFit : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class MappingError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Round-number map used to generate synthetic calibration data:
/// x = 40 theta1 + 1280, y = -35 theta2 + 720.
MappingModel nominal_mapping_model();

/// The shipped default model (data/default_mapping.json), fitted to the
/// synthetic calibration run `ftvr simulate --task calibration
/// --participants 10 --seed 1`.
MappingModel default_mapping_model();

/// Ordinary least squares in the pixel = f(angle) direction, one axis at a
/// time. r_x and r_y are the correlations between target angle and
/// per-target centroid, reported as magnitudes; dispersion_px is the mean
/// over targets of the mean distance of samples from their centroid.
MappingModel fit_linear_map(std::span<const CalibrationSample> samples);

/// Maps one touch event to cursor angles, updating the anchor state. Returns
/// nullopt (off-screen) when the point is outside the panel.
///
/// Absolute: the inverse affine image of the point.
/// Relative: a Down keeps the cursor and anchors the finger; a Move adds the
///   pixel delta converted through the fitted slopes.
/// Hybrid: Relative, but each Down, and each Move that re-enters the panel,
///   moves the cursor toward the absolute position by correction_fraction of
///   the offset.
std::optional<CursorAngles> map_touch(MappingModel& model, const TouchEvent& event);

/// Resets the anchor so the next Down starts from `cursor`.
void set_cursor(MappingModel& model, const CursorAngles& cursor);

/// Angular distance the cursor would travel on a touch-down at `event`.
double jump_distance(const MappingModel& model, const CursorAngles& before, const TouchEvent& event);

std::string to_string(MappingMode mode);
MappingMode parse_mapping_mode(const std::string& s);

}  // namespace ftvr

#include "ftvr/mapping.hpp"

#include <cmath>
#include <map>
#include <set>
#include <utility>

namespace ftvr {

CursorAngles MappingModel::absolute_angles(double x, double y) const {
    return {(x - bx) / ax, (y - by) / ay};
}

Eigen::Vector2d MappingModel::pixel_of(const CursorAngles& angles) const {
    return {ax * angles.theta1_deg + bx, ay * angles.theta2_deg + by};
}

MappingModel nominal_mapping_model() {
    MappingModel model;
    model.ax = 40.0;
    model.bx = 1280.0;
    model.ay = -35.0;
    model.by = 720.0;
    return model;
}

MappingModel default_mapping_model() {
    MappingModel model;
    model.ax = 40.078029609279575;
    model.bx = 1281.1383190883196;
    model.ay = -34.66538461538465;
    model.by = 720.0534188034214;
    model.r_x = 0.999487355359611;
    model.r_y = 0.9970945356876701;
    model.dispersion_px = 183.39668674112838;
    return model;
}

namespace {

struct AxisFit {
    double slope = 0.0;
    double intercept = 0.0;
};

AxisFit fit_axis(const Eigen::VectorXd& angle, const Eigen::VectorXd& pixel) {
    Eigen::MatrixXd design(angle.size(), 2);
    design.col(0) = angle;
    design.col(1).setOnes();
    const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(pixel);
    return {coef(0), coef(1)};
}

double pearson_magnitude(const std::vector<double>& a, const std::vector<double>& b) {
    const auto n = static_cast<double>(a.size());
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (saa == 0 || sbb == 0) return 0.0;
    return std::min(1.0, std::abs(sab) / std::sqrt(saa * sbb));
}

}  // namespace

MappingModel fit_linear_map(std::span<const CalibrationSample> samples) {
    std::set<double> theta1_values;
    std::set<double> theta2_values;
    for (const auto& s : samples) {
        theta1_values.insert(s.target_theta1_deg);
        theta2_values.insert(s.target_theta2_deg);
    }
    if (theta1_values.size() < 2) throw DegenerateFit("fit_linear_map: theta1 has no variance");
    if (theta2_values.size() < 2) throw DegenerateFit("fit_linear_map: theta2 has no variance");

    const auto n = static_cast<Eigen::Index>(samples.size());
    Eigen::VectorXd t1(n), t2(n), x(n), y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& s = samples[static_cast<std::size_t>(i)];
        t1(i) = s.target_theta1_deg;
        t2(i) = s.target_theta2_deg;
        x(i) = s.touch.x;
        y(i) = s.touch.y;
    }
    const AxisFit fx = fit_axis(t1, x);
    const AxisFit fy = fit_axis(t2, y);
    if (fx.slope == 0.0 || fy.slope == 0.0) {
        throw DegenerateFit("fit_linear_map: touch coordinates do not vary with the target");
    }

    struct Group {
        Eigen::Vector2d sum = Eigen::Vector2d::Zero();
        std::vector<Eigen::Vector2d> points;
    };
    std::map<std::pair<double, double>, Group> targets;
    for (const auto& s : samples) {
        auto& g = targets[{s.target_theta1_deg, s.target_theta2_deg}];
        const Eigen::Vector2d p(s.touch.x, s.touch.y);
        g.sum += p;
        g.points.push_back(p);
    }

    std::vector<double> angle1, angle2, cx, cy;
    double dispersion = 0.0;
    for (const auto& [key, g] : targets) {
        const Eigen::Vector2d centroid = g.sum / static_cast<double>(g.points.size());
        double radial = 0.0;
        for (const auto& p : g.points) radial += (p - centroid).norm();
        dispersion += radial / static_cast<double>(g.points.size());
        angle1.push_back(key.first);
        angle2.push_back(key.second);
        cx.push_back(centroid.x());
        cy.push_back(centroid.y());
    }

    MappingModel model;
    model.ax = fx.slope;
    model.bx = fx.intercept;
    model.ay = fy.slope;
    model.by = fy.intercept;
    model.r_x = pearson_magnitude(angle1, cx);
    model.r_y = pearson_magnitude(angle2, cy);
    model.dispersion_px = dispersion / static_cast<double>(targets.size());
    return model;
}

std::optional<CursorAngles> map_touch(MappingModel& model, const TouchEvent& event) {
    auto& anchor = model.anchor;
    if (!in_panel(event.point)) {
        anchor.active = false;
        return std::nullopt;
    }
    const CursorAngles absolute = model.absolute_angles(event.point);

    if (event.action == TouchAction::Up) {
        anchor.active = false;
        anchor.last_point = event.point;
        return anchor.cursor;
    }

    switch (model.mode) {
        case MappingMode::Absolute:
            anchor.cursor = absolute;
            break;
        case MappingMode::Relative:
        case MappingMode::Hybrid:
            if (event.action == TouchAction::Down || !anchor.active) {
                if (model.mode == MappingMode::Hybrid) {
                    // Written as target - (1-f)*offset so that f = 1 lands exactly on target.
                    const double keep = 1.0 - model.correction_fraction;
                    anchor.cursor.theta1_deg =
                        absolute.theta1_deg - keep * (absolute.theta1_deg - anchor.cursor.theta1_deg);
                    anchor.cursor.theta2_deg =
                        absolute.theta2_deg - keep * (absolute.theta2_deg - anchor.cursor.theta2_deg);
                }
            } else if (model.mode == MappingMode::Hybrid) {
                // Carry the offset from the absolute position, so that a zero offset stays exactly zero.
                const CursorAngles last = model.absolute_angles(anchor.last_point);
                anchor.cursor.theta1_deg = absolute.theta1_deg + (anchor.cursor.theta1_deg - last.theta1_deg);
                anchor.cursor.theta2_deg = absolute.theta2_deg + (anchor.cursor.theta2_deg - last.theta2_deg);
            } else {
                anchor.cursor.theta1_deg += (event.point.x - anchor.last_point.x) / model.ax;
                anchor.cursor.theta2_deg += (event.point.y - anchor.last_point.y) / model.ay;
            }
            break;
    }
    anchor.active = true;
    anchor.last_point = event.point;
    return anchor.cursor;
}

void set_cursor(MappingModel& model, const CursorAngles& cursor) {
    model.anchor.cursor = cursor;
    model.anchor.active = false;
}

double jump_distance(const MappingModel& model, const CursorAngles& before, const TouchEvent& event) {
    if (!in_panel(event.point) || model.mode == MappingMode::Relative) return 0.0;
    MappingModel probe = model;
    set_cursor(probe, before);
    TouchEvent down = event;
    down.action = TouchAction::Down;
    const auto after = map_touch(probe, down);
    return std::hypot(after->theta1_deg - before.theta1_deg, after->theta2_deg - before.theta2_deg);
}

std::string to_string(MappingMode mode) {
    switch (mode) {
        case MappingMode::Absolute: return "absolute";
        case MappingMode::Relative: return "relative";
        case MappingMode::Hybrid: return "hybrid";
    }
    return "absolute";
}

MappingMode parse_mapping_mode(const std::string& s) {
    if (s == "absolute") return MappingMode::Absolute;
    if (s == "relative") return MappingMode::Relative;
    if (s == "hybrid") return MappingMode::Hybrid;
    throw MappingError("unknown mapping mode: " + s);
}

}  // namespace ftvr

#pragma once

#include "ftvr/geometry.hpp"
#include "ftvr/scene.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace ftvr {

/// View-local cursor position: horizontal angle and elevation, in degrees.
struct CursorAngles {
    double theta1_deg = 0.0;
    double theta2_deg = 0.0;

    friend bool operator==(const CursorAngles&, const CursorAngles&) = default;
};

struct PickResult {
    NodeId node_id = 0;
    double t = 0.0;
    Vec3d hit_point = Vec3d::Zero();
};

/// Traversal counters. `culled` lists the roots of skipped subtrees.
struct PickStats {
    std::size_t visited = 0;
    std::size_t triangle_tests = 0;
    std::vector<NodeId> culled;
};

inline constexpr double default_t_max_m = 100.0;

/// Centre-eye ray at yaw = head_yaw + theta1, pitch = head_pitch + theta2.
Rayd make_ray(const Camera& camera, const CursorAngles& cursor, double t_max = default_t_max_m);

/// Nearest mesh hit below the root, walking the scene hierarchy and skipping
/// any subtree whose bounds miss the ray's t-range. Ties on t go to the
/// smaller node id. Bounds must be current for the scene's camera.
std::optional<PickResult> pick(const Scene& scene, const Rayd& ray, PickStats* stats = nullptr);

enum class UiEventKind { HoverEnter, HoverExit, Select, SelectMiss };

struct UiEvent {
    UiEventKind kind = UiEventKind::HoverEnter;
    std::optional<NodeId> node_id;

    friend bool operator==(const UiEvent&, const UiEvent&) = default;
};

/// Hover transitions for a pick change, followed by Select or SelectMiss
/// when `commit` is set. Committing on nothing, or on a node that is not a
/// button, plane or key, is a SelectMiss.
std::vector<UiEvent> emit_ui_event(const Scene& scene, std::optional<NodeId> prev_pick,
                                   std::optional<NodeId> new_pick, bool commit);

std::string to_string(UiEventKind kind);

}  // namespace ftvr

#include "ftvr/picking.hpp"

namespace ftvr {

Rayd make_ray(const Camera& camera, const CursorAngles& cursor, double t_max) {
    Rayd ray;
    ray.origin = camera.position();
    ray.direction = direction_from_angles(camera.head_yaw_deg + cursor.theta1_deg,
                                          camera.head_pitch_deg + cursor.theta2_deg);
    ray.t_min = 0.0;
    ray.t_max = t_max;
    return ray;
}

namespace {

struct Best {
    std::optional<PickResult> hit;

    void offer(NodeId id, double t, const Rayd& ray) {
        if (!hit || t < hit->t || (t == hit->t && id < hit->node_id)) {
            hit = PickResult{id, t, ray.at(t)};
        }
    }
};

void visit(const Scene& scene, NodeId id, const Rayd& ray, Best& best, PickStats* stats) {
    const SceneNode& node = scene.node(id);
    if (!ray_aabb_clip(ray, node.bounds)) {
        if (stats) stats->culled.push_back(id);
        return;
    }
    if (stats) ++stats->visited;
    for (const auto& tri : node.mesh) {
        if (stats) ++stats->triangle_tests;
        const auto t = ray_triangle(ray, Vec3d(node.world * tri.a), Vec3d(node.world * tri.b),
                                    Vec3d(node.world * tri.c));
        if (t) best.offer(id, *t, ray);
    }
    for (NodeId child : node.children) visit(scene, child, ray, best, stats);
}

}  // namespace

std::optional<PickResult> pick(const Scene& scene, const Rayd& ray, PickStats* stats) {
    Best best;
    visit(scene, scene.root(), ray, best, stats);
    return best.hit;
}

std::vector<UiEvent> emit_ui_event(const Scene& scene, std::optional<NodeId> prev_pick,
                                   std::optional<NodeId> new_pick, bool commit) {
    std::vector<UiEvent> events;
    if (prev_pick != new_pick) {
        if (prev_pick) events.push_back({UiEventKind::HoverExit, prev_pick});
        if (new_pick) events.push_back({UiEventKind::HoverEnter, new_pick});
    }
    if (commit) {
        if (new_pick && scene.node(*new_pick).role.selectable()) {
            events.push_back({UiEventKind::Select, new_pick});
        } else {
            events.push_back({UiEventKind::SelectMiss, std::nullopt});
        }
    }
    return events;
}

std::string to_string(UiEventKind kind) {
    switch (kind) {
        case UiEventKind::HoverEnter: return "hover_enter";
        case UiEventKind::HoverExit: return "hover_exit";
        case UiEventKind::Select: return "select";
        case UiEventKind::SelectMiss: return "select_miss";
    }
    return "select_miss";
}

}  // namespace ftvr

#include "ftvr/scene.hpp"

#include <cmath>
#include <set>

namespace ftvr {

Scene::Scene() {
    SceneNode root;
    root.name = "root";
    nodes_.push_back(std::move(root));
}

NodeId Scene::add_node(NodeId parent, SceneNode proto) {
    if (parent >= nodes_.size()) throw SceneError("add_node: unknown parent " + std::to_string(parent));
    if (proto.attachment == Attachment::WorldFixed &&
        nodes_[parent].attachment == Attachment::ViewFixed) {
        throw SceneError("add_node: world-fixed node under a view-fixed parent");
    }
    const auto id = static_cast<NodeId>(nodes_.size());
    proto.id = id;
    proto.parent = parent;
    proto.children.clear();
    nodes_.push_back(std::move(proto));
    nodes_[parent].children.push_back(id);
    return id;
}

std::vector<NodeId> Scene::find_all(UiKind kind) const {
    std::vector<NodeId> out;
    for (const auto& n : nodes_) {
        if (n.role.kind == kind) out.push_back(n.id);
    }
    return out;
}

std::optional<NodeId> Scene::find_button(int label) const {
    for (const auto& n : nodes_) {
        if (n.role.kind == UiKind::Button && n.role.label == label) return n.id;
    }
    return std::nullopt;
}

std::optional<NodeId> Scene::find_plane(int label) const {
    for (const auto& n : nodes_) {
        if (n.role.kind == UiKind::Plane && n.role.label == label) return n.id;
    }
    return std::nullopt;
}

std::optional<NodeId> Scene::find_key(char key) const {
    for (const auto& n : nodes_) {
        if (n.role.kind == UiKind::Key && n.role.key == key) return n.id;
    }
    return std::nullopt;
}

std::optional<NodeId> Scene::find_text(const std::string& name) const {
    for (const auto& n : nodes_) {
        if (n.role.kind == UiKind::Text && n.name == name) return n.id;
    }
    return std::nullopt;
}

std::optional<NodeId> Scene::cursor() const {
    for (const auto& n : nodes_) {
        if (n.role.kind == UiKind::Cursor) return n.id;
    }
    return std::nullopt;
}

Isometry3d view_space_transform(const Scene& scene, NodeId id) {
    const SceneNode& n = scene.node(id);
    if (n.attachment != Attachment::ViewFixed) {
        throw SceneError("view_space_transform: node is world-fixed");
    }
    if (n.parent && scene.node(*n.parent).attachment == Attachment::ViewFixed) {
        return view_space_transform(scene, *n.parent) * n.local;
    }
    return n.local;
}

void update_world_transforms(Scene& scene, const Camera& camera) {
    scene.camera_ = camera;
    const Isometry3d head = camera.pose();
    auto& nodes = scene.nodes_;

    // Parents precede children, so one forward pass composes transforms.
    for (auto& n : nodes) {
        if (!n.parent) {
            n.world = n.attachment == Attachment::ViewFixed ? head * n.local : n.local;
            continue;
        }
        const SceneNode& parent = nodes[*n.parent];
        if (n.attachment == Attachment::ViewFixed && parent.attachment != Attachment::ViewFixed) {
            n.world = head * n.local;
        } else {
            n.world = parent.world * n.local;
        }
    }

    for (auto it = nodes.rbegin(); it != nodes.rend(); ++it) {
        SceneNode& n = *it;
        Aabbd box;
        for (const auto& tri : n.mesh) {
            box.extend(n.world * tri.a);
            box.extend(n.world * tri.b);
            box.extend(n.world * tri.c);
        }
        for (NodeId child : n.children) box.extend(nodes[child].bounds);
        n.bounds = box;
    }
}

SceneNode make_quad_node(double yaw_deg, double pitch_deg, double width_deg, double height_deg,
                         double radius_m) {
    SceneNode node;
    const auto rot = head_rotation(yaw_deg, pitch_deg);
    node.local.linear() = rot;
    node.local.translation() = rot * Vec3d(0, 0, -radius_m);
    const double hw = radius_m * std::tan(deg_to_rad(width_deg) / 2);
    const double hh = radius_m * std::tan(deg_to_rad(height_deg) / 2);
    const Vec3d v0(-hw, -hh, 0), v1(hw, -hh, 0), v2(hw, hh, 0), v3(-hw, hh, 0);
    node.mesh = {Triangle{v0, v1, v2}, Triangle{v0, v2, v3}};
    return node;
}

std::optional<std::array<Vec3d, 4>> world_quad(const SceneNode& node) {
    if (node.mesh.size() != 2) return std::nullopt;
    const auto& t0 = node.mesh[0];
    const auto& t1 = node.mesh[1];
    return std::array<Vec3d, 4>{node.world * t0.a, node.world * t0.b, node.world * t0.c,
                                node.world * t1.c};
}

Eigen::Vector2d angular_center(const SceneNode& node) {
    Vec3d sum = Vec3d::Zero();
    int count = 0;
    for (const auto& tri : node.mesh) {
        for (const Vec3d* v : {&tri.a, &tri.b, &tri.c}) {
            sum += node.world * *v;
            ++count;
        }
    }
    if (count == 0) sum = node.world.translation();
    return angles_from_direction(sum);
}

namespace {

void add_cursor(Scene& scene) {
    SceneNode cursor;
    cursor.name = "cursor";
    cursor.attachment = Attachment::ViewFixed;
    cursor.role.kind = UiKind::Cursor;
    scene.add_node(scene.root(), std::move(cursor));
}

NodeId add_group(Scene& scene, NodeId parent, std::string name, Attachment attachment) {
    SceneNode group;
    group.name = std::move(name);
    group.attachment = attachment;
    return scene.add_node(parent, std::move(group));
}

}  // namespace

Scene build_binary_scene(const BinaryParams& params) {
    if (params.plane_width_deg <= 0 || params.plane_height_deg <= 0 || params.divider_deg < 0) {
        throw SceneError("build_binary_scene: non-positive plane size");
    }
    Scene scene;
    const NodeId group = add_group(scene, scene.root(), "planes", params.attachment);
    const double offset = (params.plane_width_deg + params.divider_deg) / 2;
    for (int side = 0; side < 2; ++side) {
        SceneNode plane = make_quad_node(side == 0 ? -offset : offset, 0.0, params.plane_width_deg,
                                         params.plane_height_deg, params.radius_m);
        plane.name = side == 0 ? "left" : "right";
        plane.attachment = params.attachment;
        plane.role = UiRole{UiKind::Plane, side, 0};
        plane.color = side == 0 ? ColorId::Red : ColorId::Blue;
        scene.add_node(group, std::move(plane));
    }
    add_cursor(scene);
    update_world_transforms(scene, Camera{});
    return scene;
}

Scene build_menu_scene(const MenuParams& params) {
    if (params.rows <= 0 || params.cols <= 0) {
        throw SceneError("build_menu_scene: rows and cols must be positive");
    }
    if (params.button_width_deg <= 0 || params.button_height_deg <= 0 || params.gap_deg < 0) {
        throw SceneError("build_menu_scene: non-positive button size");
    }
    Scene scene;
    const NodeId group = add_group(scene, scene.root(), "menu", params.attachment);
    const double step_x = params.button_width_deg + params.gap_deg;
    const double step_y = params.button_height_deg + params.gap_deg;
    for (int r = 0; r < params.rows; ++r) {
        for (int c = 0; c < params.cols; ++c) {
            const double yaw = (c - (params.cols - 1) / 2.0) * step_x;
            const double pitch = ((params.rows - 1) / 2.0 - r) * step_y;
            SceneNode button = make_quad_node(yaw, pitch, params.button_width_deg,
                                              params.button_height_deg, params.radius_m);
            const int label = r * params.cols + c;
            button.name = "button" + std::to_string(label);
            button.attachment = params.attachment;
            button.role = UiRole{UiKind::Button, label, 0};
            scene.add_node(group, std::move(button));
        }
    }
    add_cursor(scene);
    update_world_transforms(scene, Camera{});
    return scene;
}

KeyboardLayout qwerty_layout() {
    KeyboardLayout layout;
    for (const std::string row : {"qwertyuiop", "asdfghjkl", "zxcvbnm"}) {
        std::vector<KeySpec> keys;
        for (char c : row) keys.push_back({c, 1.0});
        layout.rows.push_back(std::move(keys));
    }
    layout.rows.push_back({{keys::backspace, 2.0}, {keys::space, 5.0}, {keys::done, 2.0}});
    return layout;
}

Scene build_keyboard_scene(const KeyboardLayout& layout, const KeyboardParams& params) {
    if (layout.rows.empty()) throw SceneError("build_keyboard_scene: empty layout");
    std::set<char> seen;
    for (const auto& row : layout.rows) {
        for (const auto& key : row) {
            if (key.code == 0) throw SceneError("build_keyboard_scene: key without a code");
            if (key.width_units <= 0) throw SceneError("build_keyboard_scene: non-positive key width");
            if (!seen.insert(key.code).second) {
                throw SceneError("build_keyboard_scene: duplicate key '" + key_name(key.code) + "'");
            }
        }
    }

    Scene scene;
    const NodeId group = add_group(scene, scene.root(), "keyboard", params.attachment);
    const double unit = params.key_width_deg + params.gap_deg;
    const double step_y = params.key_height_deg + params.gap_deg;
    for (std::size_t r = 0; r < layout.rows.size(); ++r) {
        const auto& row = layout.rows[r];
        double total_units = 0;
        for (const auto& key : row) total_units += key.width_units;
        double cursor_units = -total_units / 2;
        const double pitch = params.top_row_pitch_deg - static_cast<double>(r) * step_y;
        for (const auto& key : row) {
            const double yaw = (cursor_units + key.width_units / 2) * unit;
            const double width = key.width_units * unit - params.gap_deg;
            SceneNode node = make_quad_node(yaw, pitch, width, params.key_height_deg, params.radius_m);
            node.name = "key_" + key_name(key.code);
            node.attachment = params.attachment;
            node.role = UiRole{UiKind::Key, -1, key.code};
            scene.add_node(group, std::move(node));
            cursor_units += key.width_units;
        }
    }

    int line = 0;
    for (const char* name : {"presented", "transcription"}) {
        SceneNode text;
        text.name = name;
        text.attachment = params.attachment;
        text.role.kind = UiKind::Text;
        text.color = line == 0 ? ColorId::Green : ColorId::Orange;
        const double pitch = params.top_row_pitch_deg + (2.0 - line) * step_y;
        const auto rot = head_rotation(0.0, pitch);
        text.local.linear() = rot;
        text.local.translation() = rot * Vec3d(0, 0, -params.radius_m);
        scene.add_node(group, std::move(text));
        ++line;
    }

    add_cursor(scene);
    update_world_transforms(scene, Camera{});
    return scene;
}

namespace {

void add_grid_block(Scene& scene, NodeId parent, int r0, int r1, int c0, int c1, int rows, int cols,
                    double cell_deg, double gap_deg, double radius_m) {
    const int nr = r1 - r0;
    const int nc = c1 - c0;
    if (nr * nc <= 4) {
        const double step = cell_deg + gap_deg;
        for (int r = r0; r < r1; ++r) {
            for (int c = c0; c < c1; ++c) {
                const double yaw = (c - (cols - 1) / 2.0) * step;
                const double pitch = ((rows - 1) / 2.0 - r) * step;
                SceneNode button = make_quad_node(yaw, pitch, cell_deg, cell_deg, radius_m);
                const int label = r * cols + c;
                button.name = "button" + std::to_string(label);
                button.role = UiRole{UiKind::Button, label, 0};
                scene.add_node(parent, std::move(button));
            }
        }
        return;
    }
    const int rm = nr > 1 ? r0 + nr / 2 : r1;
    const int cm = nc > 1 ? c0 + nc / 2 : c1;
    for (auto [ra, rb] : {std::pair{r0, rm}, std::pair{rm, r1}}) {
        for (auto [ca, cb] : {std::pair{c0, cm}, std::pair{cm, c1}}) {
            if (ra >= rb || ca >= cb) continue;
            const NodeId group = add_group(scene, parent, "block", Attachment::WorldFixed);
            add_grid_block(scene, group, ra, rb, ca, cb, rows, cols, cell_deg, gap_deg, radius_m);
        }
    }
}

}  // namespace

Scene build_grid_scene(int rows, int cols, double cell_deg, double gap_deg, double radius_m) {
    if (rows <= 0 || cols <= 0 || cell_deg <= 0 || gap_deg < 0) {
        throw SceneError("build_grid_scene: invalid dimensions");
    }
    Scene scene;
    const NodeId group = add_group(scene, scene.root(), "grid", Attachment::WorldFixed);
    add_grid_block(scene, group, 0, rows, 0, cols, rows, cols, cell_deg, gap_deg, radius_m);
    add_cursor(scene);
    update_world_transforms(scene, Camera{});
    return scene;
}

std::string to_string(UiKind kind) {
    switch (kind) {
        case UiKind::None: return "none";
        case UiKind::Button: return "button";
        case UiKind::Plane: return "plane";
        case UiKind::Key: return "key";
        case UiKind::Cursor: return "cursor";
        case UiKind::Text: return "text";
    }
    return "none";
}

std::string to_string(ColorId color) {
    switch (color) {
        case ColorId::Neutral: return "neutral";
        case ColorId::Red: return "red";
        case ColorId::Blue: return "blue";
        case ColorId::Green: return "green";
        case ColorId::Orange: return "orange";
    }
    return "neutral";
}

std::string to_string(Attachment attachment) {
    return attachment == Attachment::ViewFixed ? "view" : "world";
}

std::string key_name(char key) {
    switch (key) {
        case keys::space: return "space";
        case keys::backspace: return "backspace";
        case keys::done: return "done";
        default: return std::string(1, key);
    }
}

}  // namespace ftvr

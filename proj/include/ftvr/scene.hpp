#pragma once

#include "ftvr/geometry.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ftvr {

using NodeId = std::uint32_t;

enum class Attachment { WorldFixed, ViewFixed };

/// Semantic colour ids; the renderer decides what they look like.
enum class ColorId { Neutral, Red, Blue, Green, Orange };

enum class UiKind { None, Button, Plane, Key, Cursor, Text };

/// Control keys are stored in the same char slot as letters.
namespace keys {
inline constexpr char space = ' ';
inline constexpr char backspace = '\b';
inline constexpr char done = '\n';
}  // namespace keys

struct UiRole {
    UiKind kind = UiKind::None;
    int label = -1;  // button number or plane index
    char key = 0;    // for UiKind::Key

    bool selectable() const {
        return kind == UiKind::Button || kind == UiKind::Plane || kind == UiKind::Key;
    }
};

struct Triangle {
    Vec3d a;
    Vec3d b;
    Vec3d c;
};

struct SceneNode {
    NodeId id = 0;
    std::optional<NodeId> parent;
    std::vector<NodeId> children;
    std::string name;
    Isometry3d local = Isometry3d::Identity();
    Isometry3d world = Isometry3d::Identity();
    std::vector<Triangle> mesh;  // local space
    Attachment attachment = Attachment::WorldFixed;
    UiRole role;
    ColorId color = ColorId::Neutral;
    std::string text;
    Aabbd bounds;  // world space, mesh plus all descendants
};

struct Camera {
    double head_yaw_deg = 0.0;
    double head_pitch_deg = 0.0;

    Vec3d position() const { return Vec3d::Zero(); }
    Isometry3d pose() const {
        Isometry3d pose = Isometry3d::Identity();
        pose.linear() = head_rotation(head_yaw_deg, head_pitch_deg);
        return pose;
    }
};

class SceneError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A scene graph stored as a flat node array. Node 0 is the root, and every
/// node is created after its parent, so ids are a topological order.
class Scene {
public:
    Scene();

    NodeId root() const { return 0; }
    std::size_t size() const { return nodes_.size(); }

    const SceneNode& node(NodeId id) const { return nodes_.at(id); }
    SceneNode& node(NodeId id) { return nodes_.at(id); }
    std::span<const SceneNode> nodes() const { return nodes_; }

    /// Appends `proto` under `parent` and returns its id. A world-fixed node
    /// cannot live under a view-fixed one.
    NodeId add_node(NodeId parent, SceneNode proto);

    std::vector<NodeId> find_all(UiKind kind) const;
    std::optional<NodeId> find_button(int label) const;
    std::optional<NodeId> find_plane(int label) const;
    std::optional<NodeId> find_key(char key) const;
    std::optional<NodeId> find_text(const std::string& name) const;
    std::optional<NodeId> cursor() const;

    /// Camera used by the last update_world_transforms call.
    const Camera& camera() const { return camera_; }

private:
    friend void update_world_transforms(Scene& scene, const Camera& camera);

    std::vector<SceneNode> nodes_;
    Camera camera_;
};

/// Recomposes world transforms for the current head pose and refreshes every
/// bounding box bottom-up.
void update_world_transforms(Scene& scene, const Camera& camera);

/// Head-frame transform of a view-fixed node, i.e. its world transform
/// under an identity head pose.
Isometry3d view_space_transform(const Scene& scene, NodeId id);

/// A flat two-triangle quad of the given angular size, centred on the
/// direction (yaw, pitch) at `radius` metres and facing the origin.
SceneNode make_quad_node(double yaw_deg, double pitch_deg, double width_deg, double height_deg,
                         double radius_m);

/// World-space corners of a quad node, in mesh order.
std::optional<std::array<Vec3d, 4>> world_quad(const SceneNode& node);

/// Angular centre of a node's mesh as seen from the origin, under the scene's
/// current transforms. Returns (yaw, pitch) in degrees.
Eigen::Vector2d angular_center(const SceneNode& node);

struct BinaryParams {
    double plane_width_deg = 40.0;
    double plane_height_deg = 40.0;
    double divider_deg = 1.0;
    double radius_m = 2.0;
    Attachment attachment = Attachment::WorldFixed;
};

struct MenuParams {
    int rows = 3;
    int cols = 5;
    double button_width_deg = 12.0;
    double button_height_deg = 10.0;
    double gap_deg = 1.0;
    double radius_m = 2.0;
    Attachment attachment = Attachment::WorldFixed;
};

struct KeySpec {
    char code = 0;
    double width_units = 1.0;
};

struct KeyboardLayout {
    std::vector<std::vector<KeySpec>> rows;
};

struct KeyboardParams {
    double key_width_deg = 4.5;
    double key_height_deg = 5.0;
    double gap_deg = 0.5;
    double radius_m = 2.0;
    double top_row_pitch_deg = 2.75;
    Attachment attachment = Attachment::WorldFixed;
};

KeyboardLayout qwerty_layout();

/// Left plane is label 0 (red), right plane is label 1 (blue).
Scene build_binary_scene(const BinaryParams& params = {});

/// Buttons numbered row-major from the top-left corner.
Scene build_menu_scene(const MenuParams& params = {});

/// Text nodes are named "presented" and "transcription".
Scene build_keyboard_scene(const KeyboardLayout& layout, const KeyboardParams& params = {});

/// A rows x cols button grid grouped into a quadtree of container nodes, so
/// that the hierarchy culls picking rays.
Scene build_grid_scene(int rows, int cols, double cell_deg, double gap_deg, double radius_m = 2.0);

std::string to_string(UiKind kind);
std::string to_string(ColorId color);
std::string to_string(Attachment attachment);
std::string key_name(char key);

}  // namespace ftvr

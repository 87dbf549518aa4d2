#include "ftvr/picking.hpp"
#include "ftvr/random.hpp"
#include "oracles/oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace ftvr;

namespace {

Vec3d random_unit(Rng& rng) {
    Vec3d v;
    do {
        v = Vec3d(rng.normal(), rng.normal(), rng.normal());
    } while (v.norm() < 1e-6);
    return v.normalized();
}

Vec3d random_point(Rng& rng, double scale) {
    return Vec3d(rng.uniform() * 2 - 1, rng.uniform() * 2 - 1, rng.uniform() * 2 - 1) * scale;
}

void check_against_oracle(const Scene& scene, Rng& rng, int rays, double yaw_span, double pitch_span) {
    const auto tris = oracle::flatten(scene);
    int hits = 0;
    for (int i = 0; i < rays; ++i) {
        const CursorAngles c{(rng.uniform() * 2 - 1) * yaw_span, (rng.uniform() * 2 - 1) * pitch_span};
        const Rayd ray = make_ray(scene.camera(), c);
        PickStats stats;
        const auto got = pick(scene, ray, &stats);
        const auto all = oracle::all_hits(tris, ray);
        const auto want = oracle::nearest(all);
        REQUIRE(got.has_value() == want.has_value());
        if (got) {
            ++hits;
            CHECK(got->node_id == want->node);
            CHECK(std::abs(got->t - want->t) < 1e-9);
        }
        for (const auto& h : all) {
            for (NodeId root : stats.culled) CHECK_FALSE(oracle::in_subtree(scene, h.node, root));
        }
    }
    CHECK(hits > rays / 10);
}

}  // namespace

TEST_CASE("make_ray composes head and cursor angles") {
    const Rayd fwd = make_ray(Camera{}, {});
    CHECK((fwd.direction - Vec3d(0, 0, -1)).norm() < 1e-15);
    const Rayd right = make_ray(Camera{}, {90.0, 0.0});
    CHECK((right.direction - Vec3d(1, 0, 0)).norm() < 1e-15);
    const Rayd cancel = make_ray(Camera{30.0, 0.0}, {-30.0, 0.0});
    CHECK((cancel.direction - Vec3d(0, 0, -1)).norm() < 1e-15);
    const Rayd up = make_ray(Camera{0.0, 20.0}, {0.0, 10.0});
    CHECK(std::abs(up.direction.norm() - 1.0) < 1e-12);
    CHECK(up.direction.y() == doctest::Approx(std::sin(deg_to_rad(30.0))));
    CHECK(fwd.t_min == 0.0);
    CHECK(fwd.t_max == default_t_max_m);
}

TEST_CASE("ray_triangle hits an axis-aligned triangle and misses an offset one") {
    const Rayd ray;
    const auto t = ray_triangle(ray, Vec3d(-1, -1, -5), Vec3d(1, -1, -5), Vec3d(0, 1, -5));
    REQUIRE(t);
    CHECK(*t == doctest::Approx(5.0));
    CHECK_FALSE(ray_triangle(ray, Vec3d(2, -1, -5), Vec3d(3, -1, -5), Vec3d(2.5, 1, -5)));
    CHECK_FALSE(ray_triangle(ray, Vec3d(0, 0, -5), Vec3d(1, 1, -5), Vec3d(2, 2, -5)));
}

TEST_CASE("ray_triangle matches the linear-system oracle on random triangles") {
    Rng rng(3);
    int agree_hits = 0;
    for (int i = 0; i < 100000; ++i) {
        Rayd ray;
        ray.origin = random_point(rng, 1.0);
        ray.direction = random_unit(rng);
        ray.t_max = 10.0;
        const Vec3d v0 = random_point(rng, 3.0), v1 = random_point(rng, 3.0), v2 = random_point(rng, 3.0);
        const auto got = ray_triangle(ray, v0, v1, v2);
        const auto want = oracle::solve_ray_triangle(ray, v0, v1, v2);
        REQUIRE(got.has_value() == want.has_value());
        if (got) {
            ++agree_hits;
            CHECK(std::abs(*got - *want) < 1e-9);
        }
    }
    CHECK(agree_hits > 1000);
}

TEST_CASE("ray through the shared diagonal of a quad hits it") {
    const Scene scene = build_menu_scene();
    for (int label = 0; label < 15; ++label) {
        const auto c = angular_center(scene.node(*scene.find_button(label)));
        const auto hit = pick(scene, make_ray(Camera{}, {c.x(), c.y()}));
        REQUIRE(hit);
        CHECK(hit->node_id == *scene.find_button(label));
    }
}

TEST_CASE("ray_aabb_clip basics") {
    const Aabbd box = Aabbd::from_points(Vec3d(-1, -1, -6), Vec3d(1, 1, -4));
    const auto through = ray_aabb_clip(Rayd{}, box);
    REQUIRE(through);
    CHECK(through->lo == doctest::Approx(4.0));
    CHECK(through->hi == doctest::Approx(6.0));
    CHECK(through->width() > 0);

    Rayd parallel;
    parallel.origin = Vec3d(2, 0, 0);
    CHECK_FALSE(ray_aabb_clip(parallel, box));

    Rayd grazing;
    grazing.origin = Vec3d(1, 0, 0);
    CHECK(ray_aabb_clip(grazing, box));
    CHECK_FALSE(ray_aabb_clip(Rayd{}, Aabbd::empty()));
}

TEST_CASE("ray_aabb_clip agrees with point marching") {
    Rng rng(17);
    constexpr int pairs = 1000;
    constexpr int samples = 1000;
    for (int i = 0; i < pairs; ++i) {
        Rayd ray;
        ray.origin = random_point(rng, 2.0);
        ray.direction = random_unit(rng);
        if (i % 10 == 0) ray.direction[static_cast<int>(rng.below(3))] = 0.0;
        ray.direction.normalize();
        ray.t_max = 8.0;
        const Aabbd box = Aabbd::from_points(random_point(rng, 2.0), random_point(rng, 2.0));
        const auto clip = ray_aabb_clip(ray, box);
        for (int k = 0; k < samples; ++k) {
            const double t = ray.t_min + (ray.t_max - ray.t_min) * (k + 0.5) / samples;
            const bool inside = oracle::marched_inside(ray, box, t);
            if (clip && (std::abs(t - clip->lo) < 1e-6 || std::abs(t - clip->hi) < 1e-6)) continue;
            const bool in_clip = clip && t >= clip->lo && t <= clip->hi;
            REQUIRE(in_clip == inside);
        }
    }
}

TEST_CASE("pick direct hit and clean miss") {
    const Scene scene = build_menu_scene();
    const auto hit = pick(scene, make_ray(Camera{}, {}));
    REQUIRE(hit);
    CHECK(hit->node_id == *scene.find_button(7));
    CHECK(hit->t > 0);
    CHECK(hit->t <= default_t_max_m);
    CHECK_FALSE(pick(scene, make_ray(Camera{}, {90.0, 0.0})));
}

TEST_CASE("pick equals brute force on every built scene") {
    Rng rng(23);
    check_against_oracle(build_binary_scene(), rng, 10000, 50, 30);
    check_against_oracle(build_menu_scene(), rng, 10000, 40, 25);
    check_against_oracle(build_keyboard_scene(qwerty_layout()), rng, 10000, 30, 25);
    check_against_oracle(build_grid_scene(10, 20, 3.0, 0.4), rng, 10000, 40, 20);

    MenuParams view;
    view.attachment = Attachment::ViewFixed;
    Scene vs = build_menu_scene(view);
    update_world_transforms(vs, Camera{25.0, -10.0});
    check_against_oracle(vs, rng, 5000, 40, 25);
}

TEST_CASE("nearest hit wins when quads overlap in depth") {
    Scene scene;
    SceneNode far = make_quad_node(0, 0, 20, 20, 3.0);
    SceneNode near = make_quad_node(0, 0, 10, 10, 2.0);
    SceneNode twin = make_quad_node(0, 0, 10, 10, 2.0);
    const NodeId f = scene.add_node(scene.root(), far);
    const NodeId n = scene.add_node(scene.root(), near);
    scene.add_node(scene.root(), twin);
    update_world_transforms(scene, Camera{});
    const auto hit = pick(scene, make_ray(Camera{}, {1.0, 1.0}));
    REQUIRE(hit);
    CHECK(hit->node_id == n);
    const auto outer = pick(scene, make_ray(Camera{}, {8.0, 0.0}));
    REQUIRE(outer);
    CHECK(outer->node_id == f);
}

TEST_CASE("centred rays visit a small fraction of a 10,000-button grid") {
    const Scene scene = build_grid_scene(100, 100, 0.5, 0.1);
    Rng rng(29);
    for (int i = 0; i < 200; ++i) {
        PickStats stats;
        const CursorAngles c{(rng.uniform() * 2 - 1) * 25, (rng.uniform() * 2 - 1) * 25};
        pick(scene, make_ray(Camera{}, c), &stats);
        CHECK(static_cast<double>(stats.visited) < 0.05 * static_cast<double>(scene.size()));
    }
}

TEST_CASE("emit_ui_event over all prev/new/commit cases") {
    const Scene scene = build_menu_scene();
    const NodeId b3 = *scene.find_button(3);
    const NodeId b4 = *scene.find_button(4);
    using K = UiEventKind;
    using V = std::vector<UiEvent>;
    CHECK(emit_ui_event(scene, std::nullopt, b3, false) == V{{K::HoverEnter, b3}});
    CHECK(emit_ui_event(scene, b3, b3, true) == V{{K::Select, b3}});
    CHECK(emit_ui_event(scene, b3, std::nullopt, true) == V{{K::HoverExit, b3}, {K::SelectMiss, std::nullopt}});
    CHECK(emit_ui_event(scene, std::nullopt, std::nullopt, false).empty());
    CHECK(emit_ui_event(scene, std::nullopt, std::nullopt, true) == V{{K::SelectMiss, std::nullopt}});
    CHECK(emit_ui_event(scene, b3, b3, false).empty());
    CHECK(emit_ui_event(scene, b3, std::nullopt, false) == V{{K::HoverExit, b3}});
    CHECK(emit_ui_event(scene, std::nullopt, b3, true) == V{{K::HoverEnter, b3}, {K::Select, b3}});
    CHECK(emit_ui_event(scene, b3, b4, false) == V{{K::HoverExit, b3}, {K::HoverEnter, b4}});
    CHECK(emit_ui_event(scene, b3, b4, true) == V{{K::HoverExit, b3}, {K::HoverEnter, b4}, {K::Select, b4}});
    CHECK(emit_ui_event(scene, std::nullopt, scene.root(), true) ==
          V{{K::HoverEnter, scene.root()}, {K::SelectMiss, std::nullopt}});
}

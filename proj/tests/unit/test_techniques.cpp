#include "ftvr/techniques.hpp"
#include "oracles/technique_checks.hpp"

#include <doctest.h>

#include <map>
#include <tuple>

using namespace ftvr;

namespace {

struct Driver {
    TechniqueState state;
    MappingModel model = nominal_mapping_model();
    TechniqueConfig config;
    std::vector<TechniqueAction> log;

    explicit Driver(TechniqueKind kind) : state(kind) { model.mode = default_mapping_mode(kind); }

    std::vector<TechniqueAction> operator()(std::int64_t t, TouchAction a, int finger, int x, int y,
                                            TouchSource src = TouchSource::FrontPad) {
        auto out = step(state, model, TouchEvent{t, a, finger, {x, y}, src}, config);
        log.insert(log.end(), out.begin(), out.end());
        return out;
    }

    int commits() const {
        int n = 0;
        for (const auto& a : log) n += a.kind == ActionKind::Commit;
        return n;
    }
};

constexpr auto Down = TouchAction::Down;
constexpr auto Move = TouchAction::Move;
constexpr auto Up = TouchAction::Up;

}  // namespace

TEST_CASE("technique names round trip") {
    for (TechniqueKind k : all_techniques) CHECK(parse_technique(to_string(k)) == k);
    CHECK_THROWS_AS(parse_technique("pinch"), std::invalid_argument);
    CHECK(default_mapping_mode(TechniqueKind::TwoFingers) == MappingMode::Absolute);
    CHECK(default_mapping_mode(TechniqueKind::DragNTap) == MappingMode::Relative);
}

TEST_CASE("two-fingers: second-finger tap commits once, lifting the dragger afterwards does nothing") {
    Driver d(TechniqueKind::TwoFingers);
    d(0, Down, 0, 1280, 720);
    d(20, Move, 0, 1400, 720);
    d(40, Move, 0, 1480, 720);
    d(60, Down, 1, 1700, 720);
    const auto commit = d(120, Up, 1, 1700, 720);
    REQUIRE(commit.size() == 1);
    CHECK(commit[0].kind == ActionKind::Commit);
    CHECK(commit[0].cursor.theta1_deg == doctest::Approx(5.0));
    CHECK(d(300, Up, 0, 1480, 720).empty());
    CHECK(d.commits() == 1);
}

TEST_CASE("two-fingers commits at the cursor of the tap-down instant") {
    Driver d(TechniqueKind::TwoFingers);
    d(0, Down, 0, 1280, 720);
    d(20, Down, 1, 1600, 720);
    d(40, Move, 0, 1680, 720);
    const auto commit = d(80, Up, 1, 1600, 720);
    REQUIRE(commit.size() == 1);
    CHECK(commit[0].cursor.theta1_deg == 0.0);
}

TEST_CASE("two-fingers: dragger lifted first means no commit") {
    Driver d(TechniqueKind::TwoFingers);
    d(0, Down, 0, 1280, 720);
    d(20, Down, 1, 1600, 720);
    d(40, Up, 0, 1280, 720);
    d(60, Up, 1, 1600, 720);
    CHECK(d.commits() == 0);
    CHECK(abstract_state(d.state) == "idle");
}

TEST_CASE("two-fingers: slow or sliding second finger is not a tap") {
    Driver slow(TechniqueKind::TwoFingers);
    slow(0, Down, 0, 1280, 720);
    slow(10, Down, 1, 1600, 720);
    slow(400, Up, 1, 1600, 720);
    CHECK(slow.commits() == 0);
    Driver slide(TechniqueKind::TwoFingers);
    slide(0, Down, 0, 1280, 720);
    slide(10, Down, 1, 1600, 720);
    slide(30, Move, 1, 1700, 720);
    slide(50, Up, 1, 1700, 720);
    CHECK(slide.commits() == 0);
}

TEST_CASE("drag-n-tap: re-tap inside the window commits at the frozen cursor") {
    Driver d(TechniqueKind::DragNTap);
    d(0, Down, 0, 1000, 700);
    d(30, Move, 0, 1200, 700);
    d(60, Up, 0, 1200, 700);
    const CursorAngles frozen = d.state.cursor;
    CHECK(frozen.theta1_deg == doctest::Approx(5.0));
    CHECK(d(200, Down, 0, 1230, 690).empty());
    const auto commit = d(260, Up, 0, 1230, 690);
    REQUIRE(commit.size() == 1);
    CHECK(commit[0].kind == ActionKind::Commit);
    CHECK(commit[0].cursor == frozen);
}

TEST_CASE("drag-n-tap: expired window gives no commit") {
    Driver d(TechniqueKind::DragNTap);
    d(0, Down, 0, 1000, 700);
    d(30, Move, 0, 1200, 700);
    d(60, Up, 0, 1200, 700);
    d(60 + 401, Down, 0, 1200, 700);
    d(60 + 450, Up, 0, 1200, 700);
    CHECK(d.commits() == 0);
}

TEST_CASE("drag-n-tap: re-tap far from the lift point starts a new drag") {
    Driver d(TechniqueKind::DragNTap);
    d(0, Down, 0, 1000, 700);
    d(60, Up, 0, 1000, 700);
    d(100, Down, 0, 1400, 700);
    CHECK(abstract_state(d.state) == "drag(A)");
    d(150, Up, 0, 1400, 700);
    CHECK(d.commits() == 0);
}

TEST_CASE("single-finger front techniques commit on a short still tap") {
    for (TechniqueKind k : {TechniqueKind::FrontWorld, TechniqueKind::FrontView}) {
        Driver d(k);
        d(0, Down, 0, 1680, 720);
        const auto up = d(80, Up, 0, 1680, 720);
        REQUIRE(up.size() == 1);
        CHECK(up[0].cursor.theta1_deg == doctest::Approx(10.0));
        Driver slow(k);
        slow(0, Down, 0, 1680, 720);
        slow(500, Up, 0, 1680, 720);
        CHECK(slow.commits() == 0);
    }
}

TEST_CASE("side-gaze commits at the view centre from a side-pad tap") {
    Driver d(TechniqueKind::SideGaze);
    CHECK(d(0, Down, 0, 100, 100, TouchSource::FrontPad).empty());
    CHECK(d(50, Up, 0, 100, 100, TouchSource::FrontPad).empty());
    d(100, Down, 0, 1280, 720, TouchSource::SidePad);
    const auto up = d(160, Up, 0, 1280, 720, TouchSource::SidePad);
    REQUIRE(up.size() == 1);
    CHECK(up[0].cursor == CursorAngles{});
}

TEST_CASE("front-gaze ignores the tap position") {
    Driver d(TechniqueKind::FrontGaze);
    d(0, Down, 0, 5, 1400);
    const auto up = d(60, Up, 0, 5, 1400);
    REQUIRE(up.size() == 1);
    CHECK(up[0].cursor == CursorAngles{});
}

TEST_CASE("off-screen touches cancel the pending tap") {
    Driver d(TechniqueKind::FrontWorld);
    d(0, Down, 0, 2500, 720);
    const auto off = d(20, Move, 0, 2600, 720);
    REQUIRE(off.size() == 1);
    CHECK(off[0].kind == ActionKind::OffScreenCancel);
    d(40, Up, 0, 2500, 720);
    CHECK(d.commits() == 0);

    Driver two(TechniqueKind::TwoFingers);
    two(0, Down, 0, 1280, 720);
    const auto miss = two(10, Down, 1, 2600, 720);
    REQUIRE(miss.size() == 1);
    CHECK(miss[0].kind == ActionKind::OffScreenCancel);
}

TEST_CASE("double-tap guard suppresses a second commit inside the debounce window") {
    Driver d(TechniqueKind::FrontGaze);
    d(0, Down, 0, 1280, 720);
    d(50, Up, 0, 1280, 720);
    d(80, Down, 0, 1280, 720);
    d(120, Up, 0, 1280, 720);
    CHECK(d.commits() == 1);
    Driver off(TechniqueKind::FrontGaze);
    off.config.debounce_enabled = false;
    off(0, Down, 0, 1280, 720);
    off(50, Up, 0, 1280, 720);
    off(80, Down, 0, 1280, 720);
    off(120, Up, 0, 1280, 720);
    CHECK(off.commits() == 2);
}

TEST_CASE("transition tables are deterministic and total") {
    for (TechniqueKind k : all_techniques) {
        const TransitionTable t = legal_transitions(k);
        std::map<std::tuple<std::string, TouchAction, char>, int> keys;
        for (const auto& row : t.rows) ++keys[{row.from, row.action, row.finger}];
        for (const auto& [key, n] : keys) CHECK(n == 1);
        CHECK(keys.size() == t.states.size() * 6);
        if (is_gaze(k)) {
            for (const auto& row : t.rows) {
                for (ActionKind a : row.actions) CHECK(a != ActionKind::CursorMoved);
            }
        }
    }
}

TEST_CASE("step matches the transition table on every sequence up to length 6") {
    for (TechniqueKind k : all_techniques) {
        const auto report = oracle::enumerate_against_table(k, 6);
        INFO(to_string(k), ": ", report.first_mismatch);
        CHECK(report.sequences == 55986);
        CHECK(report.mismatches == 0);
    }
}

TEST_CASE("fuzzed invariants hold for every technique") {
    for (TechniqueKind k : all_techniques) {
        const auto report = oracle::fuzz_invariants(k, 50000, 91 + static_cast<int>(k));
        INFO(to_string(k), ": ", report.first_violation);
        CHECK(report.violations == 0);
        CHECK(report.commits > 0);
    }
}

TEST_CASE("head updates produce no technique actions") {
    TechniqueState s(TechniqueKind::SideGaze);
    MappingModel m;
    CHECK(step(s, m, HeadPoseEvent{0, 10.0, 5.0}).empty());
}

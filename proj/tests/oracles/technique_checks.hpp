#pragma once

// Table-equivalence enumeration and fuzzed invariant checks for the
// technique state machines.

#include "ftvr/random.hpp"
#include "ftvr/techniques.hpp"
#include "oracles/oracles.hpp"

#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace oracle {

/// Settings under which the tables hold: still taps on one spot, 10 ms
/// apart, double-tap guard off.
inline ftvr::TechniqueConfig table_config() {
    ftvr::TechniqueConfig c;
    c.debounce_enabled = false;
    return c;
}

inline ftvr::TouchEvent concrete(ftvr::TechniqueKind kind, const SymbolicEvent& e, std::int64_t t_ms) {
    return ftvr::TouchEvent{t_ms, e.action, e.finger == 'A' ? 0 : 1, {1280, 720}, ftvr::designated_pad(kind)};
}

inline std::vector<ftvr::ActionKind> kinds(const std::vector<ftvr::TechniqueAction>& actions) {
    std::vector<ftvr::ActionKind> out;
    for (const auto& a : actions) out.push_back(a.kind);
    return out;
}

struct EnumerationReport {
    std::size_t sequences = 0;
    std::size_t mismatches = 0;
    std::string first_mismatch;
};

/// Every sequence of 1..max_len events over {Down, Move, Up} x {A, B} is run
/// through step() and through the table; states and action kinds must agree
/// after every event.
inline EnumerationReport enumerate_against_table(ftvr::TechniqueKind kind, int max_len) {
    const ftvr::TransitionTable table = ftvr::legal_transitions(kind);
    const std::vector<SymbolicEvent> alphabet = {
        {ftvr::TouchAction::Down, 'A'}, {ftvr::TouchAction::Move, 'A'}, {ftvr::TouchAction::Up, 'A'},
        {ftvr::TouchAction::Down, 'B'}, {ftvr::TouchAction::Move, 'B'}, {ftvr::TouchAction::Up, 'B'}};
    EnumerationReport report;
    for (int len = 1; len <= max_len; ++len) {
        std::vector<int> digits(static_cast<std::size_t>(len), 0);
        while (true) {
            std::vector<SymbolicEvent> seq;
            for (int d : digits) seq.push_back(alphabet[static_cast<std::size_t>(d)]);
            const auto expected = interpret(table, seq);

            ftvr::TechniqueState state(kind);
            ftvr::MappingModel model = ftvr::nominal_mapping_model();
            model.mode = ftvr::default_mapping_mode(kind);
            bool ok = expected.size() == seq.size();
            for (std::size_t i = 0; ok && i < seq.size(); ++i) {
                const auto actions = ftvr::step(state, model, concrete(kind, seq[i], 10 * static_cast<std::int64_t>(i)),
                                                table_config());
                ok = kinds(actions) == expected[i].actions && ftvr::abstract_state(state) == expected[i].state;
            }
            ++report.sequences;
            if (!ok) {
                if (report.mismatches == 0) {
                    std::ostringstream s;
                    for (const auto& e : seq) s << ftvr::to_string(e.action) << '(' << e.finger << ") ";
                    report.first_mismatch = s.str();
                }
                ++report.mismatches;
            }
            int pos = len - 1;
            while (pos >= 0 && ++digits[static_cast<std::size_t>(pos)] == 6) digits[static_cast<std::size_t>(pos--)] = 0;
            if (pos < 0) break;
        }
    }
    return report;
}

/// A random event stream that is legal per finger ((Down Move* Up)*) over
/// fingers 0..2, with on- and off-panel points, small and large motions and
/// irregular timing.
inline std::vector<ftvr::TouchEvent> fuzz_sequence(ftvr::Rng& rng, ftvr::TouchSource pad, int length) {
    std::vector<ftvr::TouchEvent> out;
    std::set<int> down;
    std::map<int, ftvr::TouchPoint> at;
    std::map<int, ftvr::TouchSource> source;
    std::int64_t t = 0;
    for (int i = 0; i < length; ++i) {
        const int finger = rng.below(10) == 0 ? 2 : static_cast<int>(rng.below(2));
        ftvr::TouchEvent e;
        e.finger = finger;
        if (!down.contains(finger)) {
            const auto other = pad == ftvr::TouchSource::FrontPad ? ftvr::TouchSource::SidePad : ftvr::TouchSource::FrontPad;
            source[finger] = rng.below(20) == 0 ? other : pad;
        }
        e.source = source[finger];
        t += static_cast<std::int64_t>(rng.below(4) == 0 ? rng.below(600) : rng.below(120));
        e.t_ms = t;
        if (!down.contains(finger)) {
            e.action = ftvr::TouchAction::Down;
            down.insert(finger);
        } else {
            e.action = rng.below(3) == 0 ? ftvr::TouchAction::Up : ftvr::TouchAction::Move;
            if (e.action == ftvr::TouchAction::Up) down.erase(finger);
        }
        ftvr::TouchPoint p;
        if (e.action != ftvr::TouchAction::Down && at.contains(finger) && rng.below(2) == 0) {
            const int step = rng.below(2) == 0 ? 15 : 200;
            p = {at[finger].x + static_cast<int>(rng.below(2 * step + 1)) - step,
                 at[finger].y + static_cast<int>(rng.below(2 * step + 1)) - step};
        } else if (rng.below(10) == 0) {
            p = {static_cast<int>(rng.below(3000)) - 220, static_cast<int>(rng.below(1800)) - 180};
        } else {
            p = {static_cast<int>(rng.below(2560)), static_cast<int>(rng.below(1440))};
        }
        at[finger] = p;
        e.point = p;
        out.push_back(e);
    }
    return out;
}

struct InvariantReport {
    std::size_t sequences = 0;
    std::size_t commits = 0;
    std::size_t violations = 0;
    std::string first_violation;
};

/// Runs fuzzed sequences through one technique and checks its safety
/// invariants: Two-Fingers commits only while two or more fingers are down
/// on its pad, Drag-n-Tap never commits from the drag phase nor moves the
/// cursor while committing, gaze commits sit at (0, 0), commits respect the
/// double-tap guard, and a rerun gives the same actions.
inline InvariantReport fuzz_invariants(ftvr::TechniqueKind kind, std::size_t sequences, std::uint64_t seed) {
    InvariantReport report;
    ftvr::Rng rng(seed);
    const ftvr::TouchSource pad = ftvr::designated_pad(kind);
    auto fail = [&](const std::string& what) {
        if (report.violations++ == 0) report.first_violation = what;
    };
    for (std::size_t s = 0; s < sequences; ++s) {
        const auto events = fuzz_sequence(rng, pad, 4 + static_cast<int>(rng.below(9)));
        ftvr::TechniqueConfig cfg;
        cfg.debounce_enabled = rng.below(2) == 0;
        ftvr::MappingModel model = ftvr::default_mapping_model();
        model.mode = ftvr::default_mapping_mode(kind);
        ftvr::TechniqueState state(kind);
        ftvr::MappingModel model2 = model;
        ftvr::TechniqueState state2(kind);
        std::set<int> down_on_pad;
        std::optional<std::int64_t> last_commit;
        for (const auto& e : events) {
            const ftvr::Phase before = state.phase;
            const ftvr::CursorAngles cursor_before = state.cursor;
            const std::size_t fingers_before = down_on_pad.size();
            const auto actions = ftvr::step(state, model, e, cfg);
            if (ftvr::step(state2, model2, e, cfg) != actions) fail("non-deterministic");
            if (e.source == pad) {
                if (e.action == ftvr::TouchAction::Down) down_on_pad.insert(e.finger);
                if (e.action == ftvr::TouchAction::Up) down_on_pad.erase(e.finger);
            }
            for (const auto& a : actions) {
                if (a.kind != ftvr::ActionKind::Commit) continue;
                ++report.commits;
                if (cfg.debounce_enabled && last_commit && a.t_ms - *last_commit < cfg.debounce_ms) fail("debounce");
                last_commit = a.t_ms;
                switch (kind) {
                    case ftvr::TechniqueKind::TwoFingers:
                        if (fingers_before < 2) fail("two-fingers commit with fewer than two fingers down");
                        if (e.action != ftvr::TouchAction::Up) fail("two-fingers commit not on a lift");
                        break;
                    case ftvr::TechniqueKind::DragNTap:
                        if (before != ftvr::Phase::Tap) fail("drag-n-tap commit outside the re-tap");
                        if (!(a.cursor == cursor_before)) fail("drag-n-tap commit moved the cursor");
                        break;
                    case ftvr::TechniqueKind::SideGaze:
                    case ftvr::TechniqueKind::FrontGaze:
                        if (!(a.cursor == ftvr::CursorAngles{})) fail("gaze commit off centre");
                        break;
                    default: break;
                }
            }
            if (ftvr::is_gaze(kind) && !(state.cursor == ftvr::CursorAngles{})) fail("gaze cursor moved");
        }
        ++report.sequences;
    }
    return report;
}

}  // namespace oracle

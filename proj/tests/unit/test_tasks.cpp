#include "ftvr/random.hpp"
#include "ftvr/session.hpp"
#include "ftvr/tasks.hpp"
#include "oracles/oracles.hpp"

#include <doctest.h>

#include <set>
#include <sstream>

using namespace ftvr;

namespace {

UiEvent select(const Scene& scene, std::optional<NodeId> id) {
    REQUIRE(id);
    (void)scene;
    return {UiEventKind::Select, id};
}

UiEvent miss() { return {UiEventKind::SelectMiss, std::nullopt}; }

void check_latin(const std::vector<std::vector<int>>& sq) {
    const int n = static_cast<int>(sq.size());
    for (int i = 0; i < n; ++i) {
        std::set<int> row(sq[i].begin(), sq[i].end()), col;
        for (int j = 0; j < n; ++j) col.insert(sq[j][i]);
        CHECK(static_cast<int>(row.size()) == n);
        CHECK(static_cast<int>(col.size()) == n);
        CHECK(*row.begin() == 0);
        CHECK(*row.rbegin() == n - 1);
    }
}

}  // namespace

TEST_CASE("task names round trip") {
    for (TaskKind k : {TaskKind::Binary, TaskKind::Menu15, TaskKind::Keyboard}) CHECK(parse_task(to_string(k)) == k);
    CHECK_THROWS(parse_task("fitts"));
}

TEST_CASE("latin squares") {
    CHECK(latin_square(1) == std::vector<std::vector<int>>{{0}});
    for (int n = 1; n <= 9; ++n) check_latin(latin_square(n));
    for (int n : {2, 4, 6, 8}) {
        const auto pairs = oracle::adjacency_pairs(latin_square(n));
        CHECK(static_cast<int>(pairs.size()) == n * (n - 1));
        for (const auto& [pair, count] : pairs) CHECK(count == 1);
    }
}

TEST_CASE("phrase corpus parsing keeps lowercase letters and spaces") {
    std::istringstream in("Hello World\n  the cat sat  \nnumb3rs here\n\nok-go\n");
    const PhraseSet set = parse_phrase_set(in, "inline");
    CHECK(set.phrases == std::vector<std::string>{"hello world", "the cat sat"});
    CHECK(set.source == "inline");
}

TEST_CASE("phrase sampling") {
    const PhraseSet& corpus = default_phrase_set();
    CHECK(corpus.phrases.size() >= 500);
    const auto a = sample_phrases(corpus, 5, 42);
    const auto b = sample_phrases(corpus, 5, 42);
    CHECK(a == b);
    REQUIRE(a.size() == 5);
    const std::set<std::string> distinct(a.begin(), a.end());
    CHECK(distinct.size() == 5);
    for (const auto& p : a) {
        CHECK(p.size() >= 25);
        CHECK(p.size() <= 28);
        for (const auto& practice : default_practice_phrases()) CHECK(p != practice);
    }
    CHECK(sample_phrases(corpus, 5, 43) != a);
    CHECK_THROWS_AS(sample_phrases(corpus, 5, 1, {200, 300}), InsufficientCorpus);
    CHECK(default_practice_phrases().size() == 2);
}

TEST_CASE("menu target order covers the outer buttons once per session") {
    TaskSpec spec;
    for (std::uint64_t seed : {1, 2, 3, 99}) {
        spec.seed = seed;
        const auto order = menu_target_order(spec);
        REQUIRE(order.size() == 42);
        for (int s = 0; s < 3; ++s) {
            std::multiset<int> got(order.begin() + s * 14, order.begin() + (s + 1) * 14);
            std::multiset<int> want;
            for (int b = 0; b < 15; ++b) {
                if (b != 7) want.insert(b);
            }
            CHECK(got == want);
        }
    }
}

TEST_CASE("menu trial scoring") {
    Scene scene = build_menu_scene();
    TaskSpec spec;
    spec.kind = TaskKind::Menu15;
    TaskRunner runner(spec, "s", 3);
    runner.start(scene);
    const int first = runner.menu_order()[0];
    const int second = runner.menu_order()[1];

    CHECK(runner.goal(scene) == scene.find_button(7));
    CHECK(scene.node(*scene.find_button(7)).color == ColorId::Red);
    CHECK(runner.on_commit(scene, select(scene, scene.find_button(first)), 50).finished.empty());
    runner.on_commit(scene, select(scene, scene.find_button(7)), 100);
    CHECK(scene.node(*scene.find_button(first)).color == ColorId::Red);
    auto fb = runner.on_commit(scene, select(scene, scene.find_button(first)), 1600);
    REQUIRE(fb.finished.size() == 1);
    const TrialRecord clean = fb.finished[0];
    CHECK(clean.correct);
    CHECK(clean.error_commits == 0);
    CHECK(clean.target_id == first);
    CHECK(clean.elapsed_s() == doctest::Approx(1.5));
    CHECK(clean.participant == 3);
    CHECK(scene.node(*scene.find_button(first)).color == ColorId::Green);

    runner.on_commit(scene, select(scene, scene.find_button(7)), 2000);
    const int wrong = second == 0 ? 1 : 0;
    runner.on_commit(scene, select(scene, scene.find_button(wrong)), 2500);
    runner.on_commit(scene, miss(), 2600);
    fb = runner.on_commit(scene, select(scene, scene.find_button(second)), 3000);
    REQUIRE(fb.finished.size() == 1);
    CHECK_FALSE(fb.finished[0].correct);
    CHECK(fb.finished[0].error_commits == 2);
    CHECK(fb.finished[0].t_commit_ms >= fb.finished[0].t_start_ms);

    const auto open = runner.abandon();
    REQUIRE(open);
    CHECK(open->abandoned);
}

TEST_CASE("binary task swaps the red plane on each success") {
    Scene scene = build_binary_scene();
    TaskSpec spec;
    spec.kind = TaskKind::Binary;
    spec.binary_trials = 4;
    TaskRunner runner(spec, "s", 1);
    runner.start(scene);
    std::int64_t t = 0;
    std::vector<TrialRecord> records;
    // Start commit, then alternate.
    auto red = [&] { return *runner.goal(scene); };
    CHECK(scene.node(red()).color == ColorId::Red);
    runner.on_commit(scene, select(scene, red()), t += 500);
    int previous = scene.node(red()).role.label;
    while (!runner.done()) {
        const NodeId target = red();
        CHECK(scene.node(target).role.label == previous);
        const NodeId other = *scene.find_plane(1 - scene.node(target).role.label);
        CHECK(scene.node(other).color == ColorId::Blue);
        if (records.size() == 1) runner.on_commit(scene, select(scene, other), t += 200);
        auto fb = runner.on_commit(scene, select(scene, target), t += 700);
        records.insert(records.end(), fb.finished.begin(), fb.finished.end());
        previous = 1 - previous;
    }
    REQUIRE(records.size() == 4);
    CHECK(records[0].correct);
    CHECK_FALSE(records[1].correct);
    CHECK(records[1].error_commits == 1);
    CHECK(records[2].elapsed_s() == doctest::Approx(0.7));
    CHECK_FALSE(runner.abandon());
}

TEST_CASE("keyboard transcription") {
    Scene scene = build_keyboard_scene(qwerty_layout());
    TaskSpec spec;
    spec.kind = TaskKind::Keyboard;
    spec.keyboard_phrases = 1;
    TaskRunner runner(spec, "s", 1, {"the"});
    runner.start(scene);
    CHECK(scene.node(*scene.find_text("presented")).text == "the");
    std::int64_t t = 1000;
    for (char c : std::string("thx")) {
        CHECK(runner.goal(scene) == (c == 'x' ? scene.find_key('e') : scene.find_key(c)));
        CHECK(runner.on_commit(scene, select(scene, scene.find_key(c)), t += 300).key_click);
    }
    CHECK(runner.goal(scene) == scene.find_key(keys::backspace));
    runner.on_commit(scene, select(scene, scene.find_key(keys::backspace)), t += 300);
    runner.on_commit(scene, miss(), t += 100);
    runner.on_commit(scene, select(scene, scene.find_key('e')), t += 300);
    CHECK(scene.node(*scene.find_text("transcription")).text == "the");
    CHECK(runner.goal(scene) == scene.find_key(keys::done));
    const auto fb = runner.on_commit(scene, select(scene, scene.find_key(keys::done)), t += 300);
    REQUIRE(fb.finished.size() == 1);
    const auto& r = fb.finished[0];
    CHECK(r.correct);
    CHECK(r.transcription == std::string("the"));
    CHECK(r.presented == std::string("the"));
    CHECK(r.t_start_ms == 1300);
    CHECK(r.error_commits == 1);
    CHECK(runner.done());
}

TEST_CASE("keyboard transcription is a fold over key commits") {
    Rng rng(12);
    const Scene proto = build_keyboard_scene(qwerty_layout());
    const std::string alphabet = std::string("abcdefghijklmnopqrstuvwxyz ") + keys::backspace;
    for (int trial = 0; trial < 200; ++trial) {
        Scene scene = proto;
        TaskSpec spec;
        spec.kind = TaskKind::Keyboard;
    spec.keyboard_phrases = 1;
        TaskRunner runner(spec, "s", 1, {"some phrase"});
        runner.start(scene);
        std::string expected;
        for (int k = 0; k < 30; ++k) {
            const char c = alphabet[rng.below(alphabet.size())];
            runner.on_commit(scene, select(scene, scene.find_key(c)), k * 100);
            if (c == keys::backspace) {
                if (!expected.empty()) expected.pop_back();
            } else {
                expected.push_back(c);
            }
        }
        CHECK(runner.transcription() == expected);
    }
}

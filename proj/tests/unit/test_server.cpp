#include "ftvr/server.hpp"
#include "ftvr/simulation.hpp"
#include "oracles/ws_client.hpp"

#include <doctest.h>

#include <filesystem>
#include <thread>

using namespace ftvr;

namespace {

using oracle::play_online;
using oracle::trials_of;

std::string start_json(TaskKind task, TechniqueKind technique, std::uint64_t seed, int participant = 0) {
    StartSession s;
    s.task = task;
    s.technique = technique;
    s.seed = seed;
    s.participant = participant;
    return to_json(s).dump();
}

std::vector<TrialRecord> without_session_id(std::vector<TrialRecord> records) {
    for (auto& r : records) r.session_id.clear();
    return records;
}

}  // namespace

TEST_CASE("channel: start_session opens with the menu scene") {
    SessionChannel channel;
    const auto out = channel.on_message(start_json(TaskKind::Menu15, TechniqueKind::SideGaze, 3));
    REQUIRE(out.size() >= 3);
    CHECK(out[0]["type"] == "scene");
    int buttons = 0;
    for (const auto& n : out[0]["nodes"]) buttons += n["kind"] == "button";
    CHECK(buttons == 15);
    CHECK(out[1]["type"] == "cursor");
    REQUIRE(channel.session());
    CHECK(channel.trace()->header.seed == 3);
}

TEST_CASE("channel: schema and ordering errors") {
    SessionChannel channel;
    auto out = channel.on_message(R"({"type":"head","yaw_deg":0,"pitch_deg":0,"t_ms":0})");
    REQUIRE(out.size() == 1);
    CHECK(out[0]["type"] == "error");
    CHECK(out[0]["code"] == "schema");

    out = channel.on_message("not json");
    CHECK(out[0]["code"] == "schema");
    out = channel.on_message(R"({"type":"start_session","task":"menu15","technique":"side-gaze","mapping_mode":"absolute"})");
    CHECK(out[0]["code"] == "schema");
    CHECK_FALSE(channel.session());

    channel.on_message(start_json(TaskKind::Menu15, TechniqueKind::TwoFingers, 1));
    CHECK(channel.on_message(start_json(TaskKind::Menu15, TechniqueKind::TwoFingers, 1))[0]["code"] == "schema");
    channel.on_message(R"({"type":"touch","action":"down","finger":0,"x":1280,"y":720,"source":"front","t_ms":100})");
    out = channel.on_message(R"({"type":"touch","action":"move","finger":0,"x":1300,"y":720,"source":"front","t_ms":50})");
    REQUIRE(out.size() == 1);
    CHECK(out[0]["code"] == "monotonicity");
    CHECK(channel.trace()->events.size() == 1);
    out = channel.on_message(R"({"type":"touch","action":"move","finger":0,"x":1300,"y":72})");
    CHECK(out[0]["code"] == "schema");

    out = channel.on_message(R"({"type":"end_session"})");
    CHECK(out.back()["type"] == "summary");
    CHECK(channel.closed());
    CHECK(channel.on_message(R"({"type":"end_session"})")[0]["type"] == "error");
    CHECK(channel.on_close().empty());
}

TEST_CASE("channel matches offline replay") {
    SessionConfig cfg;
    cfg.task = TaskKind::Binary;
    cfg.technique = TechniqueKind::DragNTap;
    cfg.seed = 8;
    const auto sim = simulate_participant(cfg, UserModel{}, NoiseModel::from_mean_radial(), 21);
    SessionChannel channel;
    std::vector<json> all = channel.on_message(start_json(cfg.task, cfg.technique, cfg.seed));
    for (const auto& ev : sim.trace.events) {
        const auto out = channel.on_message(to_json(ev).dump());
        all.insert(all.end(), out.begin(), out.end());
    }
    CHECK(trials_of(all) == sim.records);
    CHECK(replay(*channel.trace()).records == sim.records);
}

TEST_CASE("websocket sessions match offline replay") {
    const auto log_dir = std::filesystem::temp_directory_path() / "ftvr_server_test";
    std::filesystem::remove_all(log_dir);
    {
        SessionServer server(0, log_dir.string());
        const std::uint16_t port = server.port();
        CHECK(port != 0);
        std::thread runner([&] { server.run(); });

        for (auto [task, technique] : {std::pair{TaskKind::Menu15, TechniqueKind::TwoFingers},
                                       std::pair{TaskKind::Keyboard, TechniqueKind::SideGaze}}) {
            SessionConfig cfg;
            cfg.task = task;
            cfg.technique = technique;
            cfg.seed = 12;
            cfg.participant = 4;
            const auto sim = simulate_participant(cfg, UserModel{}, NoiseModel::from_mean_radial(), 33);
            const auto offline = replay(sim.trace);
            const auto replies = play_online(port, sim.trace);
            REQUIRE_FALSE(replies.empty());
            CHECK(replies.front()["type"] == "scene");
            CHECK(without_session_id(trials_of(replies)) == without_session_id(offline.records));
            CHECK(replies.back()["type"] == "summary");
        }

        server.stop();
        runner.join();
    }  // the destructor joins the connection threads, which write the logs
    std::size_t logs = 0;
    for (const auto& entry : std::filesystem::directory_iterator(log_dir)) {
        ++logs;
        const auto trace = load_trace(entry.path().string());
        CHECK_FALSE(replay(trace).underflow);
    }
    CHECK(logs == 2);
    std::filesystem::remove_all(log_dir);
}

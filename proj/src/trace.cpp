#include "ftvr/trace.hpp"

#include "ftvr/protocol.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace ftvr {

SchemaError::SchemaError(std::size_t line, const std::string& detail)
    : std::runtime_error("trace line " + std::to_string(line) + ": " + detail), line_(line) {}

namespace {

json header_json(const TraceHeader& h) {
    json j = {{"type", "header"},
              {"task", to_string(h.task)},
              {"technique", to_string(h.technique)},
              {"seed", h.seed},
              {"mapping_mode", h.mapping_mode ? json(to_string(*h.mapping_mode)) : json(nullptr)}};
    if (h.participant != 0) j["participant"] = h.participant;
    if (h.session_id != "s1") j["session_id"] = h.session_id;
    if (!h.phrases.empty()) j["phrases"] = h.phrases;
    return j;
}

TraceHeader header_from_json(const json& j) {
    if (!j.is_object() || j.value("type", "") != "header") throw ProtocolError("first line must be the header");
    // The header shares its fields with start_session.
    json start = j;
    start["type"] = "start_session";
    if (!j.contains("seed")) throw ProtocolError("missing field \"seed\"");
    const auto s = std::get<StartSession>(parse_client_message(start));
    TraceHeader h;
    h.task = s.task;
    h.technique = s.technique;
    h.seed = s.seed;
    h.mapping_mode = s.mapping_mode;
    h.participant = s.participant.value_or(0);
    if (j.contains("session_id")) {
        if (!j["session_id"].is_string()) throw ProtocolError("field \"session_id\" must be a string");
        h.session_id = j["session_id"].get<std::string>();
    }
    if (j.contains("phrases")) {
        if (!j["phrases"].is_array()) throw ProtocolError("field \"phrases\" must be an array");
        for (const auto& p : j["phrases"]) {
            if (!p.is_string()) throw ProtocolError("field \"phrases\" must hold strings");
            h.phrases.push_back(p.get<std::string>());
        }
    }
    return h;
}

}  // namespace

void write_trace(std::ostream& out, const Trace& trace) {
    out << header_json(trace.header).dump() << '\n';
    for (const auto& ev : trace.events) out << to_json(ev).dump() << '\n';
}

std::string trace_to_string(const Trace& trace) {
    std::ostringstream out;
    write_trace(out, trace);
    return out.str();
}

Trace read_trace(std::istream& in) {
    Trace trace;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        try {
            const json j = json::parse(line);
            if (!have_header) {
                trace.header = header_from_json(j);
                have_header = true;
            } else {
                trace.events.push_back(event_from_json(j));
            }
        } catch (const json::exception& e) {
            throw SchemaError(line_no, e.what());
        } catch (const ProtocolError& e) {
            throw SchemaError(line_no, e.what());
        }
    }
    if (!have_header) throw SchemaError(line_no + 1, "missing header");
    return trace;
}

Trace load_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trace: " + path);
    return read_trace(in);
}

SessionConfig session_config(const TraceHeader& header, const MappingModel& mapping) {
    SessionConfig config;
    config.task = header.task;
    config.technique = header.technique;
    config.seed = header.seed;
    config.mapping_mode = header.mapping_mode;
    config.participant = header.participant;
    config.session_id = header.session_id;
    config.phrases = header.phrases;
    if (!header.phrases.empty()) config.keyboard_phrases = static_cast<int>(header.phrases.size());
    config.mapping = mapping;
    return config;
}

ReplayResult replay(const Trace& trace, const MappingModel& mapping) {
    Session session(session_config(trace.header, mapping));
    session.start();
    for (const auto& ev : trace.events) session.handle(ev);
    ReplayResult result;
    result.underflow = !session.done();
    session.finish();
    result.records = session.records();
    result.offscreen_count = session.offscreen_count();
    return result;
}

void write_calibration(std::ostream& out, const std::vector<CalibrationSample>& samples) {
    out << json{{"type", "calibration_header"}, {"samples", samples.size()}}.dump() << '\n';
    for (const auto& s : samples) {
        out << json{{"type", "calibration"},
                    {"theta1_deg", s.target_theta1_deg},
                    {"theta2_deg", s.target_theta2_deg},
                    {"x", s.touch.x},
                    {"y", s.touch.y},
                    {"participant", s.participant_id},
                    {"session", s.session_index}}
                   .dump()
            << '\n';
    }
}

std::vector<CalibrationSample> read_calibration(std::istream& in) {
    std::vector<CalibrationSample> samples;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        try {
            const json j = json::parse(line);
            const std::string type = j.at("type").get<std::string>();
            if (!have_header) {
                if (type != "calibration_header") throw ProtocolError("first line must be the calibration header");
                have_header = true;
                continue;
            }
            if (type != "calibration") throw ProtocolError("unexpected line type \"" + type + "\"");
            CalibrationSample s;
            s.target_theta1_deg = j.at("theta1_deg").get<double>();
            s.target_theta2_deg = j.at("theta2_deg").get<double>();
            if (!j.at("x").is_number_integer() || !j.at("y").is_number_integer()) {
                throw ProtocolError("x and y must be integers");
            }
            s.touch = {j["x"].get<int>(), j["y"].get<int>()};
            s.participant_id = j.value("participant", 0);
            s.session_index = j.value("session", 0);
            samples.push_back(s);
        } catch (const json::exception& e) {
            throw SchemaError(line_no, e.what());
        } catch (const ProtocolError& e) {
            throw SchemaError(line_no, e.what());
        }
    }
    if (!have_header) throw SchemaError(line_no + 1, "missing calibration header");
    return samples;
}

std::vector<CalibrationSample> load_calibration(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open calibration trace: " + path);
    return read_calibration(in);
}

}  // namespace ftvr

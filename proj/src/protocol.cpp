#include "ftvr/protocol.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace ftvr {

namespace {

template <typename T>
T field(const json& j, const char* name) {
    if (!j.is_object() || !j.contains(name)) throw ProtocolError(std::string("missing field \"") + name + "\"");
    try {
        return j.at(name).get<T>();
    } catch (const json::exception&) {
        throw ProtocolError(std::string("field \"") + name + "\" has the wrong type");
    }
}

std::int64_t integer_field(const json& j, const char* name) {
    const json& v = j.contains(name) ? j.at(name) : json();
    if (!v.is_number_integer()) throw ProtocolError(std::string("field \"") + name + "\" must be an integer");
    return v.get<std::int64_t>();
}

double number_field(const json& j, const char* name) {
    const json& v = j.contains(name) ? j.at(name) : json();
    if (!v.is_number()) throw ProtocolError(std::string("field \"") + name + "\" must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ProtocolError(std::string("field \"") + name + "\" must be finite");
    return d;
}

template <typename F>
auto parse_enum(const json& j, const char* name, F parse) {
    const auto s = field<std::string>(j, name);
    try {
        return parse(s);
    } catch (const std::invalid_argument& e) {
        throw ProtocolError(std::string("field \"") + name + "\": " + e.what());
    }
}

json optional_string(const std::optional<std::string>& s) { return s ? json(*s) : json(nullptr); }

json vec_json(const Vec3d& v) { return json::array({v.x(), v.y(), v.z()}); }

}  // namespace

json to_json(const TrialRecord& r) {
    return {{"session_id", r.session_id},
            {"participant", r.participant},
            {"technique", to_string(r.technique)},
            {"task", to_string(r.task)},
            {"trial_index", r.trial_index},
            {"target_id", r.target_id},
            {"t_start_ms", r.t_start_ms},
            {"t_commit_ms", r.t_commit_ms},
            {"correct", r.correct},
            {"error_commits", r.error_commits},
            {"presented", optional_string(r.presented)},
            {"transcription", optional_string(r.transcription)},
            {"abandoned", r.abandoned}};
}

TrialRecord record_from_json(const json& j) {
    TrialRecord r;
    r.session_id = field<std::string>(j, "session_id");
    r.participant = static_cast<int>(integer_field(j, "participant"));
    r.technique = parse_enum(j, "technique", parse_technique);
    r.task = parse_enum(j, "task", parse_task);
    r.trial_index = static_cast<int>(integer_field(j, "trial_index"));
    r.target_id = static_cast<int>(integer_field(j, "target_id"));
    r.t_start_ms = integer_field(j, "t_start_ms");
    r.t_commit_ms = integer_field(j, "t_commit_ms");
    r.correct = field<bool>(j, "correct");
    r.error_commits = static_cast<int>(integer_field(j, "error_commits"));
    if (j.contains("presented") && !j["presented"].is_null()) r.presented = field<std::string>(j, "presented");
    if (j.contains("transcription") && !j["transcription"].is_null()) {
        r.transcription = field<std::string>(j, "transcription");
    }
    if (j.contains("abandoned")) r.abandoned = field<bool>(j, "abandoned");
    return r;
}

json to_json(const TouchEvent& e) {
    return {{"type", "touch"},   {"action", to_string(e.action)}, {"finger", e.finger},
            {"x", e.point.x},    {"y", e.point.y},                {"t_ms", e.t_ms},
            {"source", to_string(e.source)}};
}

json to_json(const HeadPoseEvent& e) {
    return {{"type", "head"}, {"yaw_deg", e.yaw_deg}, {"pitch_deg", e.pitch_deg}, {"t_ms", e.t_ms}};
}

json to_json(const InputEvent& event) {
    return std::visit([](const auto& e) { return to_json(e); }, event);
}

InputEvent event_from_json(const json& j) {
    const auto type = field<std::string>(j, "type");
    if (type == "touch") {
        TouchEvent e;
        e.action = parse_enum(j, "action", parse_touch_action);
        e.finger = static_cast<int>(integer_field(j, "finger"));
        if (e.finger < 0) throw ProtocolError("field \"finger\" must be non-negative");
        e.point.x = static_cast<int>(integer_field(j, "x"));
        e.point.y = static_cast<int>(integer_field(j, "y"));
        e.t_ms = integer_field(j, "t_ms");
        e.source = parse_enum(j, "source", parse_touch_source);
        return e;
    }
    if (type == "head") {
        HeadPoseEvent e;
        e.yaw_deg = number_field(j, "yaw_deg");
        e.pitch_deg = number_field(j, "pitch_deg");
        e.t_ms = integer_field(j, "t_ms");
        return e;
    }
    throw ProtocolError("unknown event type \"" + type + "\"");
}

json to_json(const MappingModel& m) {
    return {{"ax", m.ax},
            {"bx", m.bx},
            {"ay", m.ay},
            {"by", m.by},
            {"r_x", m.r_x},
            {"r_y", m.r_y},
            {"dispersion_px", m.dispersion_px},
            {"mode", to_string(m.mode)},
            {"correction_fraction", m.correction_fraction},
            {"gain", "linear"}};
}

MappingModel mapping_from_json(const json& j) {
    MappingModel m;
    m.ax = number_field(j, "ax");
    m.bx = number_field(j, "bx");
    m.ay = number_field(j, "ay");
    m.by = number_field(j, "by");
    if (m.ax == 0.0 || m.ay == 0.0) throw ProtocolError("mapping slopes must be non-zero");
    if (j.contains("r_x")) m.r_x = number_field(j, "r_x");
    if (j.contains("r_y")) m.r_y = number_field(j, "r_y");
    if (j.contains("dispersion_px")) m.dispersion_px = number_field(j, "dispersion_px");
    if (j.contains("mode")) m.mode = parse_enum(j, "mode", parse_mapping_mode);
    if (j.contains("correction_fraction")) {
        m.correction_fraction = number_field(j, "correction_fraction");
        if (m.correction_fraction < 0.0 || m.correction_fraction > 1.0) {
            throw ProtocolError("correction_fraction must lie in [0, 1]");
        }
    }
    if (j.contains("gain") && field<std::string>(j, "gain") != "linear") throw ProtocolError("unknown gain curve");
    return m;
}

MappingModel load_mapping(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open mapping file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ProtocolError(path + ": " + e.what());
    }
    return mapping_from_json(j);
}

json scene_message(const Scene& scene) {
    json nodes = json::array();
    for (const auto& n : scene.nodes()) {
        json node = {{"id", n.id},
                     {"parent", n.parent ? json(*n.parent) : json(nullptr)},
                     {"name", n.name},
                     {"kind", to_string(n.role.kind)},
                     {"attachment", to_string(n.attachment)},
                     {"color", to_string(n.color)}};
        if (n.role.kind == UiKind::Button || n.role.kind == UiKind::Plane) node["label"] = n.role.label;
        if (n.role.kind == UiKind::Key) node["key"] = key_name(n.role.key);
        if (n.role.kind == UiKind::Text) node["text"] = n.text;
        if (n.mesh.size() == 2) {
            const Isometry3d frame =
                n.attachment == Attachment::ViewFixed ? view_space_transform(scene, n.id) : n.world;
            json corners = json::array();
            for (const Vec3d& v : {n.mesh[0].a, n.mesh[0].b, n.mesh[0].c, n.mesh[1].c}) {
                corners.push_back(vec_json(frame * v));
            }
            node["corners"] = std::move(corners);
        }
        nodes.push_back(std::move(node));
    }
    const Camera& cam = scene.camera();
    return {{"type", "scene"},
            {"head", {{"yaw_deg", cam.head_yaw_deg}, {"pitch_deg", cam.head_pitch_deg}}},
            {"nodes", std::move(nodes)}};
}

json cursor_message(const CursorAngles& c) {
    return {{"type", "cursor"}, {"theta1_deg", c.theta1_deg}, {"theta2_deg", c.theta2_deg}};
}

json ui_event_message(const UiEvent& e, std::int64_t t_ms) {
    return {{"type", "ui_event"},
            {"kind", to_string(e.kind)},
            {"node_id", e.node_id ? json(*e.node_id) : json(nullptr)},
            {"t_ms", t_ms}};
}

json key_click_message(std::int64_t t_ms) { return {{"type", "key_click"}, {"t_ms", t_ms}}; }

json trial_message(const TrialRecord& record) {
    json j = to_json(record);
    j["type"] = "trial";
    return j;
}

json summary_message(const std::vector<TrialRecord>& records) {
    json arr = json::array();
    for (const auto& r : records) arr.push_back(to_json(r));
    return {{"type", "summary"}, {"records", std::move(arr)}};
}

json error_message(const std::string& code, const std::string& detail) {
    return {{"type", "error"}, {"code", code}, {"detail", detail}};
}

json to_json(const StartSession& s) {
    json j = {{"type", "start_session"},
              {"task", to_string(s.task)},
              {"technique", to_string(s.technique)},
              {"mapping_mode", s.mapping_mode ? json(to_string(*s.mapping_mode)) : json(nullptr)},
              {"seed", s.seed}};
    if (s.participant) j["participant"] = *s.participant;
    return j;
}

ClientMessage parse_client_message(const json& j) {
    const auto type = field<std::string>(j, "type");
    if (type == "start_session") {
        StartSession s;
        s.task = parse_enum(j, "task", parse_task);
        s.technique = parse_enum(j, "technique", parse_technique);
        if (j.contains("mapping_mode") && !j["mapping_mode"].is_null()) {
            s.mapping_mode = parse_enum(j, "mapping_mode", parse_mapping_mode);
        }
        if (j.contains("seed")) {
            if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer()) {
                throw ProtocolError("field \"seed\" must be an integer");
            }
            s.seed = j["seed"].get<std::uint64_t>();
        }
        if (j.contains("participant")) s.participant = static_cast<int>(integer_field(j, "participant"));
        return s;
    }
    if (type == "end_session") return EndSession{};
    const InputEvent ev = event_from_json(j);
    if (const auto* t = std::get_if<TouchEvent>(&ev)) return *t;
    return std::get<HeadPoseEvent>(ev);
}

ClientMessage parse_client_message(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ProtocolError(std::string("malformed JSON: ") + e.what());
    }
    return parse_client_message(j);
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(std::move(cur));
    return out;
}

}  // namespace

void write_records_csv(std::ostream& out, const std::vector<TrialRecord>& records) {
    out << records_csv_header << '\n';
    for (const auto& r : records) {
        if (r.abandoned) continue;
        out << csv_field(r.session_id) << ',' << r.participant << ',' << to_string(r.technique) << ','
            << to_string(r.task) << ',' << r.trial_index << ',' << r.target_id << ',' << r.t_start_ms << ','
            << r.t_commit_ms << ',' << (r.correct ? 1 : 0) << ',' << r.error_commits << ','
            << csv_field(r.presented.value_or("")) << ',' << csv_field(r.transcription.value_or("")) << '\n';
    }
}

std::vector<TrialRecord> read_records_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ProtocolError("records CSV: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != records_csv_header) throw ProtocolError("records CSV: unexpected header");
    std::vector<TrialRecord> records;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto f = split_csv(line);
        const std::string where = "records CSV line " + std::to_string(line_no) + ": ";
        if (f.size() != 12) throw ProtocolError(where + "expected 12 fields");
        try {
            TrialRecord r;
            r.session_id = f[0];
            r.participant = std::stoi(f[1]);
            r.technique = parse_technique(f[2]);
            r.task = parse_task(f[3]);
            r.trial_index = std::stoi(f[4]);
            r.target_id = std::stoi(f[5]);
            r.t_start_ms = std::stoll(f[6]);
            r.t_commit_ms = std::stoll(f[7]);
            if (f[8] != "0" && f[8] != "1") throw std::invalid_argument("correct must be 0 or 1");
            r.correct = f[8] == "1";
            r.error_commits = std::stoi(f[9]);
            if (r.task == TaskKind::Keyboard) {
                r.presented = f[10];
                r.transcription = f[11];
            }
            records.push_back(std::move(r));
        } catch (const std::exception& e) {
            throw ProtocolError(where + e.what());
        }
    }
    return records;
}

}  // namespace ftvr

#pragma once

#include "ftvr/input.hpp"
#include "ftvr/mapping.hpp"
#include "ftvr/session.hpp"
#include "ftvr/tasks.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ftvr {

/// A trace line that is not valid JSONL for the trace schema.
class SchemaError : public std::runtime_error {
public:
    SchemaError(std::size_t line, const std::string& detail);
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

struct TraceHeader {
    TaskKind task = TaskKind::Menu15;
    TechniqueKind technique = TechniqueKind::SideGaze;
    std::uint64_t seed = 1;
    std::optional<MappingMode> mapping_mode;
    // Optional fields; written only when they differ from the defaults.
    int participant = 0;
    std::string session_id = "s1";
    std::vector<std::string> phrases;

    friend bool operator==(const TraceHeader&, const TraceHeader&) = default;
};

struct Trace {
    TraceHeader header;
    std::vector<InputEvent> events;
};

void write_trace(std::ostream& out, const Trace& trace);
std::string trace_to_string(const Trace& trace);

/// Throws SchemaError with the 1-based line number of the first bad line.
Trace read_trace(std::istream& in);
Trace load_trace(const std::string& path);

/// Session configuration described by a trace header.
SessionConfig session_config(const TraceHeader& header, const MappingModel& mapping = default_mapping_model());

struct ReplayResult {
    std::vector<TrialRecord> records;  // includes the abandoned trial on underflow
    bool underflow = false;
    int offscreen_count = 0;
};

/// Runs a trace through a fresh session. Throws MonotonicityError; an early
/// end of the stream is reported through `underflow`.
ReplayResult replay(const Trace& trace, const MappingModel& mapping = default_mapping_model());

/// Calibration trace: a header line {"type":"calibration_header"} followed by
/// one {"type":"calibration",...} line per sample.
void write_calibration(std::ostream& out, const std::vector<CalibrationSample>& samples);
std::vector<CalibrationSample> read_calibration(std::istream& in);
std::vector<CalibrationSample> load_calibration(const std::string& path);

}  // namespace ftvr

#pragma once

// FlowRecord is the unit of output for both the simulator and the live
// measurement harness; both write the same JSONL schema:
//   header: {"run": {...config echo..., "started_unix_ms": int}}
//   record: {"client_id", "spawn_s", "complete_s", "fct_s", "bytes", "flows",
//            "status": "ok"|"error", "error"?}

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace streamscore {

struct FlowRecord {
  std::int64_t client_id = 0;
  double spawn_s = 0.0;
  double complete_s = 0.0;
  double fct_s = 0.0;
  std::uint64_t bytes = 0;
  std::int64_t flows = 1;
  bool ok = true;
  std::string error;  // set when !ok
};

nlohmann::json to_json(const FlowRecord& r);

/// Throws std::runtime_error on schema violations.
FlowRecord flow_record_from_json(const nlohmann::json& j);

/// Parsed JSONL transfer log.
struct TransferLog {
  nlohmann::json run = nlohmann::json::object();  // header "run" object
  std::vector<FlowRecord> records;
};

void write_header(std::ostream& out, const nlohmann::json& run);
void write_record(std::ostream& out, const FlowRecord& r);
void write_log(std::ostream& out, const TransferLog& log);

/// Reads a JSONL log in file order. The header line is optional. Blank lines
/// are skipped; malformed lines throw std::runtime_error with the line number.
TransferLog read_log(std::istream& in);
TransferLog read_log_file(const std::string& path);

}  // namespace streamscore

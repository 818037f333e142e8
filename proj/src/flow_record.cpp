#include "streamscore/flow_record.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace streamscore {

using nlohmann::json;

json to_json(const FlowRecord& r) {
  json j = {{"client_id", r.client_id}, {"spawn_s", r.spawn_s},   {"complete_s", r.complete_s},
            {"fct_s", r.fct_s},         {"bytes", r.bytes},       {"flows", r.flows},
            {"status", r.ok ? "ok" : "error"}};
  if (!r.ok) j["error"] = r.error;
  return j;
}

FlowRecord flow_record_from_json(const json& j) {
  if (!j.is_object()) throw std::runtime_error("record is not an object");
  auto need = [&](const char* key) -> const json& {
    auto it = j.find(key);
    if (it == j.end()) throw std::runtime_error(std::string("record missing '") + key + "'");
    return *it;
  };
  FlowRecord r;
  r.client_id = need("client_id").get<std::int64_t>();
  r.spawn_s = need("spawn_s").get<double>();
  r.complete_s = need("complete_s").get<double>();
  r.fct_s = need("fct_s").get<double>();
  r.bytes = need("bytes").get<std::uint64_t>();
  r.flows = need("flows").get<std::int64_t>();
  const auto status = need("status").get<std::string>();
  if (status == "ok") {
    r.ok = true;
  } else if (status == "error") {
    r.ok = false;
    if (auto it = j.find("error"); it != j.end() && it->is_string()) r.error = it->get<std::string>();
  } else {
    throw std::runtime_error("record status must be \"ok\" or \"error\", got \"" + status + "\"");
  }
  if (r.ok && r.complete_s < r.spawn_s) throw std::runtime_error("record completes before it spawns");
  return r;
}

void write_header(std::ostream& out, const json& run) {
  out << json{{"run", run}}.dump() << '\n';
}

void write_record(std::ostream& out, const FlowRecord& r) { out << to_json(r).dump() << '\n'; }

void write_log(std::ostream& out, const TransferLog& log) {
  write_header(out, log.run);
  for (const auto& r : log.records) write_record(out, r);
}

TransferLog read_log(std::istream& in) {
  TransferLog log;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      json j = json::parse(line);
      if (j.is_object() && j.contains("run")) {
        log.run = j["run"];
        continue;
      }
      log.records.push_back(flow_record_from_json(j));
    } catch (const std::exception& e) {
      throw std::runtime_error("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return log;
}

TransferLog read_log_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_log(in);
}

}  // namespace streamscore

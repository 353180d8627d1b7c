#include "mathprep/harness/report.hpp"

#include <cstdio>

#include "mathprep/agents/backend.hpp"

namespace mathprep::harness {

bool is_timing_key(std::string_view key) noexcept {
  return key.rfind("latency", 0) == 0 || key == "wall_clock_s";
}

namespace {

void null_timing(nlohmann::ordered_json& j) {
  if (j.is_array()) {
    for (auto& v : j) null_timing(v);
    return;
  }
  if (!j.is_object()) return;
  for (auto& [key, value] : j.items()) {
    if (is_timing_key(key)) {
      if (value.is_object() && value.contains("value")) {
        value["value"] = nullptr;
      } else if (value.is_array()) {
        for (auto& v : value) v = nullptr;
      } else {
        value = nullptr;
      }
    } else {
      null_timing(value);
    }
  }
}

}  // namespace

nlohmann::ordered_json normalize_report(nlohmann::ordered_json report) {
  null_timing(report);
  return report;
}

std::string report_hash(const nlohmann::ordered_json& report) {
  auto body = normalize_report(report);
  if (body.is_object()) {
    body.erase("report_hash");
    body.erase("normalized");
    if (body.contains("config") && body["config"].is_object()) {
      body["config"].erase("out");
      body["config"].erase("normalize");
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(agents::fnv1a(body.dump())));
  return buf;
}

nlohmann::ordered_json seal_report(nlohmann::ordered_json report, bool normalize) {
  if (normalize) report = normalize_report(std::move(report));
  report["normalized"] = normalize;
  report["report_hash"] = report_hash(report);
  return report;
}

}  // namespace mathprep::harness

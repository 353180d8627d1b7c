#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

namespace mathprep::harness {

/// Keys holding wall-clock measurements anywhere in a report.
bool is_timing_key(std::string_view key) noexcept;

/// Copy with every timing field nulled. Metric objects keep their
/// provenance and lose only the value.
nlohmann::ordered_json normalize_report(nlohmann::ordered_json report);

/// 16 hex digits of FNV-1a 64 over the compact dump of the normalized report.
/// The hash ignores "report_hash", "normalized" and the config's output
/// directory and normalize flag, so it names the experiment, not the run.
std::string report_hash(const nlohmann::ordered_json& report);

/// Sets "normalized" and "report_hash"; with `normalize` the timing fields
/// are nulled in the stored report too.
nlohmann::ordered_json seal_report(nlohmann::ordered_json report, bool normalize);

}  // namespace mathprep::harness

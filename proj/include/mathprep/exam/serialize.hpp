#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "mathprep/exam/blueprint.hpp"
#include "mathprep/exam/types.hpp"

namespace mathprep::exam {

// Exam interchange format (UTF-8 JSON, fixed key order):
//
//   { "exam_id": str, "provenance": "generated"|"ingested"|"fixture",
//     "items": [ { "id": "8_III_3", "topic": str, "section": "I"|"II"|"III",
//                  "level": 1|2|3, "stem": str,
//                  "body": { "kind": "mcq",   "choices": [4 x str], "key": "A".."D" }
//                        | { "kind": "tf",    "statements": [4 x str], "key": [4 x bool] }
//                        | { "kind": "short", "key": number, "round_digits": int },
//                  "solution": str, "explanation": str,
//                  "ratings": object  (optional, carried verbatim) } ] }
//
// Schema errors carry the JSON path of the offending value, e.g.
// "items[3].body.choices".

nlohmann::ordered_json item_to_json(const ExamItem& item);
ExamItem item_from_json(const nlohmann::ordered_json& json, const std::string& path = "item");

nlohmann::ordered_json exam_to_json(const Exam& exam);
Exam exam_from_json(const nlohmann::ordered_json& json);

/// Deterministic: two-space indent, trailing newline.
std::string serialize_exam(const Exam& exam);
/// Throws Error(Schema) with the offending path.
Exam parse_exam(std::string_view bytes);

// Blueprint files: { "profile": {"name": str, "section_totals": [i, ii, iii]},
//                    "topics": [str...],
//                    "cells": [ {"topic": str, "section": "I", "level": 1, "count": int} ] }
struct BlueprintFile {
  BlueprintProfile profile;
  SpecificationMatrix matrix;
};

std::string serialize_blueprint(const BlueprintFile& blueprint);
BlueprintFile parse_blueprint(std::string_view bytes);

}  // namespace mathprep::exam

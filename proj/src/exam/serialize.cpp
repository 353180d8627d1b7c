#include "mathprep/exam/serialize.hpp"

#include <cmath>

#include "mathprep/error.hpp"

namespace mathprep::exam {

using nlohmann::ordered_json;

namespace {

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  fail(ErrorCode::Schema, path + ": " + what);
}

const ordered_json& field(const ordered_json& obj, const std::string& path, const char* name) {
  if (!obj.is_object()) schema_error(path, "expected an object");
  auto it = obj.find(name);
  if (it == obj.end()) schema_error(path + "." + name, "missing required field");
  return *it;
}

std::string string_field(const ordered_json& obj, const std::string& path, const char* name) {
  const auto& value = field(obj, path, name);
  if (!value.is_string()) schema_error(path + "." + name, "expected a string");
  return value.get<std::string>();
}

int int_field(const ordered_json& obj, const std::string& path, const char* name) {
  const auto& value = field(obj, path, name);
  if (!value.is_number_integer()) schema_error(path + "." + name, "expected an integer");
  return value.get<int>();
}

template <typename T, typename F>
std::array<T, 4> array4(const ordered_json& obj, const std::string& path, const char* name,
                        F&& convert) {
  const auto& value = field(obj, path, name);
  const std::string p = path + "." + name;
  if (!value.is_array()) schema_error(p, "expected an array");
  if (value.size() != 4) {
    schema_error(p, "expected exactly 4 entries, got " + std::to_string(value.size()));
  }
  std::array<T, 4> out{};
  for (std::size_t i = 0; i < 4; ++i) out[i] = convert(value[i], p + "[" + std::to_string(i) + "]");
  return out;
}

ordered_json body_to_json(const ItemBody& body) {
  ordered_json out;
  out["kind"] = std::string(body_kind(body));
  if (const auto* mcq = std::get_if<MultipleChoice>(&body)) {
    out["choices"] = mcq->choices;
    out["key"] = std::string(1, static_cast<char>('A' + mcq->key));
  } else if (const auto* tf = std::get_if<TrueFalseGroup>(&body)) {
    out["statements"] = tf->statements;
    out["key"] = tf->key;
  } else {
    const auto& sa = std::get<ShortAnswer>(body);
    out["key"] = sa.key;
    out["round_digits"] = sa.round_digits;
  }
  return out;
}

ItemBody body_from_json(const ordered_json& json, const std::string& path) {
  auto kind = string_field(json, path, "kind");
  auto as_string = [](const ordered_json& v, const std::string& p) {
    if (!v.is_string()) schema_error(p, "expected a string");
    return v.get<std::string>();
  };
  if (kind == "mcq") {
    MultipleChoice mcq;
    mcq.choices = array4<std::string>(json, path, "choices", as_string);
    auto key = string_field(json, path, "key");
    if (key.size() != 1 || key[0] < 'A' || key[0] > 'D') {
      schema_error(path + ".key", "expected one of A, B, C, D");
    }
    mcq.key = key[0] - 'A';
    return mcq;
  }
  if (kind == "tf") {
    TrueFalseGroup tf;
    tf.statements = array4<std::string>(json, path, "statements", as_string);
    tf.key = array4<bool>(json, path, "key", [](const ordered_json& v, const std::string& p) {
      if (!v.is_boolean()) schema_error(p, "expected a boolean");
      return v.get<bool>();
    });
    return tf;
  }
  if (kind == "short") {
    ShortAnswer sa;
    const auto& key = field(json, path, "key");
    if (!key.is_number()) schema_error(path + ".key", "expected a number");
    sa.key = key.get<double>();
    if (!std::isfinite(sa.key)) schema_error(path + ".key", "must be finite");
    if (json.contains("round_digits")) sa.round_digits = int_field(json, path, "round_digits");
    return sa;
  }
  schema_error(path + ".kind", "unknown body kind '" + kind + "'");
}

}  // namespace

ordered_json item_to_json(const ExamItem& item) {
  ordered_json out;
  out["id"] = render(item.id);
  out["topic"] = item.topic;
  out["section"] = std::string(to_string(item.id.section));
  out["level"] = to_int(item.level);
  out["stem"] = item.stem;
  out["body"] = body_to_json(item.body);
  out["solution"] = item.solution;
  out["explanation"] = item.explanation;
  if (!item.ratings_json.empty()) out["ratings"] = ordered_json::parse(item.ratings_json);
  return out;
}

ExamItem item_from_json(const ordered_json& json, const std::string& path) {
  ExamItem item;
  auto id_text = string_field(json, path, "id");
  try {
    item.id = parse_question_id(id_text);
  } catch (const Error& e) {
    schema_error(path + ".id", e.what());
  }
  item.topic = string_field(json, path, "topic");
  auto section_text = string_field(json, path, "section");
  auto section = parse_section(section_text);
  if (!section) schema_error(path + ".section", "unknown section tag '" + section_text + "'");
  if (*section != item.id.section) schema_error(path + ".section", "does not match id " + id_text);
  auto level = level_from_int(int_field(json, path, "level"));
  if (!level) schema_error(path + ".level", "expected 1, 2 or 3");
  item.level = *level;
  item.stem = string_field(json, path, "stem");
  item.body = body_from_json(field(json, path, "body"), path + ".body");
  item.solution = string_field(json, path, "solution");
  item.explanation = string_field(json, path, "explanation");
  if (auto it = json.find("ratings"); it != json.end()) {
    if (!it->is_object()) schema_error(path + ".ratings", "expected an object");
    item.ratings_json = it->dump();
  }
  check_item(item, path);
  return item;
}

ordered_json exam_to_json(const Exam& exam) {
  ordered_json out;
  out["exam_id"] = exam.exam_id;
  out["provenance"] = std::string(to_string(exam.provenance));
  out["items"] = ordered_json::array();
  for (const auto& item : exam.items) out["items"].push_back(item_to_json(item));
  return out;
}

Exam exam_from_json(const ordered_json& json) {
  const std::string root = "$";
  Exam exam;
  if (!json.is_object()) schema_error(root, "expected an object");
  exam.exam_id = string_field(json, root, "exam_id");
  auto prov_text = string_field(json, root, "provenance");
  auto prov = parse_provenance(prov_text);
  if (!prov) schema_error("provenance", "unknown provenance '" + prov_text + "'");
  exam.provenance = *prov;
  const auto& items = field(json, root, "items");
  if (!items.is_array()) schema_error("items", "expected an array");
  for (std::size_t i = 0; i < items.size(); ++i) {
    exam.items.push_back(item_from_json(items[i], "items[" + std::to_string(i) + "]"));
  }
  check_exam(exam);
  return exam;
}

std::string serialize_exam(const Exam& exam) { return exam_to_json(exam).dump(2) + "\n"; }

Exam parse_exam(std::string_view bytes) {
  ordered_json json;
  try {
    json = ordered_json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::Schema, std::string("$: invalid JSON: ") + e.what());
  }
  return exam_from_json(json);
}

std::string serialize_blueprint(const BlueprintFile& blueprint) {
  ordered_json out;
  out["profile"]["name"] = blueprint.profile.name;
  out["profile"]["section_totals"] = blueprint.profile.section_totals;
  out["topics"] = blueprint.matrix.topics();
  out["cells"] = ordered_json::array();
  for (const auto& [key, count] : blueprint.matrix.cells()) {
    ordered_json cell;
    cell["topic"] = key.topic;
    cell["section"] = std::string(to_string(key.section));
    cell["level"] = to_int(key.level);
    cell["count"] = count;
    out["cells"].push_back(std::move(cell));
  }
  return out.dump(2) + "\n";
}

BlueprintFile parse_blueprint(std::string_view bytes) {
  ordered_json json;
  try {
    json = ordered_json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::Schema, std::string("$: invalid JSON: ") + e.what());
  }
  BlueprintFile out;
  if (json.contains("profile")) {
    const auto& p = json["profile"];
    out.profile.name = string_field(p, "profile", "name");
    const auto& totals = field(p, "profile", "section_totals");
    if (!totals.is_array() || totals.size() != 3) {
      schema_error("profile.section_totals", "expected 3 integers");
    }
    for (std::size_t i = 0; i < 3; ++i) {
      if (!totals[i].is_number_integer()) schema_error("profile.section_totals", "expected integers");
      out.profile.section_totals[i] = totals[i].get<int>();
    }
  }
  const auto& topics = field(json, "$", "topics");
  if (!topics.is_array()) schema_error("topics", "expected an array");
  std::vector<std::string> topic_list;
  for (const auto& t : topics) {
    if (!t.is_string()) schema_error("topics", "expected strings");
    topic_list.push_back(t.get<std::string>());
  }
  const auto& cells = field(json, "$", "cells");
  if (!cells.is_array()) schema_error("cells", "expected an array");
  std::map<CellKey, int> cell_map;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const std::string path = "cells[" + std::to_string(i) + "]";
    CellKey key;
    key.topic = string_field(cells[i], path, "topic");
    auto section = parse_section(string_field(cells[i], path, "section"));
    if (!section) schema_error(path + ".section", "unknown section tag");
    key.section = *section;
    auto level = level_from_int(int_field(cells[i], path, "level"));
    if (!level) schema_error(path + ".level", "expected 1, 2 or 3");
    key.level = *level;
    cell_map[key] += int_field(cells[i], path, "count");
  }
  out.matrix = SpecificationMatrix(std::move(topic_list), std::move(cell_map));
  out.matrix.check_profile(out.profile);
  return out;
}

}  // namespace mathprep::exam

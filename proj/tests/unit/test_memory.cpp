#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "fixtures.hpp"

#include "mathprep/error.hpp"
#include "mathprep/memory/case_bank.hpp"
#include "mathprep/memory/case_store.hpp"
#include "mathprep/memory/session_log.hpp"

using namespace mathprep;
using namespace mathprep::memory;

namespace {

Case make_case(const std::string& id, double reward = 1.0, std::int64_t seq = 0) {
  Case c;
  c.case_id = id;
  c.state_text = "state of " + id;
  c.action_text = "action of " + id;
  c.reward = reward;
  c.success = reward > 0.0;
  c.created_seq = seq;
  return c;
}

ErrorCode code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("retain assigns sequence numbers and keeps failures") {
  CaseBank bank;
  CHECK(bank.retain(make_case("a")).created_seq == 1);
  CHECK(bank.retain(make_case("b", 0.0)).created_seq == 2);
  CHECK(bank.retain(make_case("c", -1.0, 10)).created_seq == 10);
  CHECK(bank.next_seq() == 11);
  CHECK(bank.size() == 3);
  CHECK_FALSE(bank.find("b")->success);
  CHECK(bank.index_of("c") == 2u);
  CHECK(bank.find("zzz") == nullptr);
}

TEST_CASE("retain rejects bad cases without changing the bank") {
  CaseBank bank;
  bank.retain(make_case("a", 1.0, 5));
  CHECK(code_of([&] { bank.retain(make_case("a")); }) == ErrorCode::Conflict);
  CHECK(code_of([&] { bank.retain(make_case("b", 1.0, 5)); }) == ErrorCode::Conflict);
  CHECK(code_of([&] { bank.retain(make_case("b", std::numeric_limits<double>::quiet_NaN())); }) ==
        ErrorCode::Domain);
  CHECK(bank.size() == 1);

  CaseBank capped(std::optional<std::size_t>{2});
  capped.retain(make_case("a"));
  capped.retain(make_case("b"));
  CHECK(code_of([&] { capped.retain(make_case("c")); }) == ErrorCode::Capacity);
}

TEST_CASE("functional retain leaves its input untouched") {
  CaseBank original;
  original.retain(make_case("a"));
  const auto grown = retain(original, make_case("b"));
  CHECK(original.size() == 1);
  CHECK(grown.size() == 2);
  CHECK_FALSE(original.contains("b"));
}

TEST_CASE("from_cases validates order and uniqueness") {
  CHECK(CaseBank::from_cases({make_case("a", 1, 1), make_case("b", 1, 3)}).size() == 2);
  CHECK(code_of([] { CaseBank::from_cases({make_case("a", 1, 2), make_case("b", 1, 2)}); }) ==
        ErrorCode::Conflict);
  CHECK(code_of([] { CaseBank::from_cases({make_case("a", 1, 1), make_case("a", 1, 2)}); }) ==
        ErrorCode::Conflict);
}

TEST_CASE("bank lines keep the documented key order") {
  auto c = make_case("k", 0.5, 3);
  c.next_state_text = "after";
  c.annotations = {{"item_id", "4_I_2"}};
  const auto line = case_to_line(c);
  CHECK(line.find("\"case_id\"") < line.find("\"created_seq\""));
  CHECK(line.find("\"created_seq\"") < line.find("\"state\""));
  CHECK(line.find("\"success\"") < line.find("\"annotations\""));
  CHECK(line.find('\n') == std::string::npos);
  CHECK(case_from_line(line) == c);
}

TEST_CASE("load names the malformed line") {
  std::stringstream good;
  good << case_to_line(make_case("a", 1, 1)) << '\n' << "{\"case_id\": 3}\n";
  try {
    load_bank(good);
    FAIL("expected a format error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Format);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  std::stringstream dup;
  dup << case_to_line(make_case("a", 1, 1)) << '\n' << case_to_line(make_case("a", 1, 2)) << '\n';
  CHECK(code_of([&] { load_bank(dup); }) == ErrorCode::Conflict);
}

TEST_CASE("a torn final line can be tolerated") {
  const auto full = case_to_line(make_case("a", 1, 1)) + "\n" + case_to_line(make_case("b", 1, 2));
  const auto torn = full.substr(0, full.size() - 7);
  std::stringstream strict(torn);
  CHECK(code_of([&] { load_bank(strict); }) == ErrorCode::Format);
  std::stringstream lenient(torn);
  LoadOptions options;
  options.tolerate_partial_trailing_line = true;
  const auto r = load_bank(lenient, options);
  CHECK(r.bank.size() == 1);
  CHECK(r.dropped_partial_line);
  CHECK(r.dropped_line_number == 2);
}

TEST_CASE("append-only bank file reloads to the same bank") {
  fixtures::ScratchDir dir("bankfile");
  CaseBank bank;
  {
    CaseBankFile file(dir.path() / "bank.jsonl");
    for (int i = 0; i < 5; ++i) file.append(bank.retain(make_case("c" + std::to_string(i), i % 2)));
  }
  CHECK(load_bank(dir.path() / "bank.jsonl").bank == bank);
}

TEST_CASE("session log enforces the request/subtask/tool hierarchy") {
  SessionLog log;
  CHECK(code_of([&] { log.append({LogKind::Subtask, "s1", "r1", "", "", 1}); }) == ErrorCode::Reference);
  log.append({LogKind::Request, "r1", "", "generate", "", log.tick()});
  log.append({LogKind::Subtask, "s1", "r1", "generate", "done", log.tick()});
  CHECK(code_of([&] { log.append({LogKind::Tool, "t1", "r1", "", "", 3}); }) == ErrorCode::Reference);
  log.append({LogKind::Tool, "t1", "s1", case_to_line(make_case("a", 1, 1)), kRetainOutcome, log.tick()});
  log.append({LogKind::Tool, "t2", "s1", "lookup", "ok", log.tick()});
  CHECK(log.size() == 4);
  CHECK(log.entries_of(LogKind::Tool).size() == 2);

  const auto functional = append_log(log, {LogKind::Subtask, "s2", "r1", "", "", 9});
  CHECK(functional.size() == 5);
  CHECK(log.size() == 4);

  std::stringstream io;
  save_log(log, io);
  const auto loaded = load_log(io);
  CHECK(loaded.entries() == log.entries());
  const auto replayed = replay_bank(loaded);
  REQUIRE(replayed.size() == 1);
  CHECK(replayed.at(0) == make_case("a", 1, 1));
}

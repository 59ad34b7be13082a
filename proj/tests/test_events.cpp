#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "parbo/driver.hpp"
#include "parbo/errors.hpp"
#include "parbo/events.hpp"

using namespace parbo;

namespace {

RunConfig small_run(int m, int evals, std::uint64_t seed) {
  RunConfig cfg;
  cfg.m = m;
  cfg.max_evals = evals;
  cfg.seed = seed;
  cfg.chooser.n_cand = 4;
  cfg.chooser.t_mcmc = 2;
  cfg.chooser.burn_in = 5;
  return cfg;
}

std::string text_of(const RunLog& log) {
  std::ostringstream s;
  write_log(log, s);
  return s.str();
}

}  // namespace

TEST_CASE("non-finite numbers") {
  CHECK(encode_number(INFINITY) == "inf");
  CHECK(encode_number(-INFINITY) == "-inf");
  CHECK(encode_number(NAN) == "nan");
  CHECK(std::isinf(decode_number("-inf")));
  CHECK(std::isnan(decode_number("nan")));
  CHECK(decode_number(0.1) == 0.1);
  CHECK_THROWS(decode_number("1.0"));
}

TEST_CASE("persist and load round trip") {
  RunLog log = run(small_run(3, 10, 4));
  REQUIRE(!log.events.empty());
  // exercise the non-finite path and a failure record
  Event odd;
  odd.kind = EventKind::inference_completed;
  odd.ticket = 999;
  odd.time = 1e300;
  Choice c;
  c.x = Eigen::Vector2d(0.25, 0.75);
  c.provenance = Provenance::poll;
  c.diagnostics.incumbent = -std::numeric_limits<double>::infinity();
  odd.choice = c;
  odd.error = "x";
  log.events.push_back(odd);
  Event failed;
  failed.kind = EventKind::eval_completed;
  failed.ok = false;
  failed.error = "boom";
  log.events.push_back(failed);

  const auto path = (std::filesystem::temp_directory_path() / "parbo_roundtrip.ndjson").string();
  persist(log, path);
  const RunLog back = load_log(path);
  CHECK(back == log);
  CHECK(text_of(back) == text_of(log));
  std::filesystem::remove(path);
}

TEST_CASE("load errors carry line numbers") {
  const RunLog log = run(small_run(2, 4, 1));
  std::string text = text_of(log);

  SUBCASE("schema version") {
    std::string t = text;
    t.replace(t.find("\"v\":1"), 5, "\"v\":2");
    std::istringstream in(t);
    try {
      read_log(in);
      FAIL("expected an error");
    } catch (const LogFormatError& e) {
      CHECK(e.line() == 1);
    }
  }
  SUBCASE("truncated line") {
    std::string t = text.substr(0, text.size() - 10);
    const auto lines = static_cast<std::size_t>(std::count(t.begin(), t.end(), '\n')) + 1;
    std::istringstream in(t);
    try {
      read_log(in);
      FAIL("expected an error");
    } catch (const LogFormatError& e) {
      CHECK(e.line() == lines);
    }
  }
  SUBCASE("missing field") {
    std::string t = text;
    const auto pos = t.find("\"ticket\":0");
    t.replace(pos, 10, "\"tick\":0");
    std::istringstream in(t);
    CHECK_THROWS_AS(read_log(in), LogFormatError);
  }
  SUBCASE("empty input") {
    std::istringstream in("");
    CHECK_THROWS_AS(read_log(in), LogFormatError);
  }
}

TEST_CASE("summary") {
  SUBCASE("empty run has only the header") {
    RunLog empty;
    std::ostringstream s;
    write_summary(empty, s);
    CHECK(s.str() == "index,ticket,time,x_0,x_1,y,provenance,best_so_far\n");
  }
  SUBCASE("twenty evaluations") {
    const RunLog log = run(small_run(4, 20, 2));
    const auto rows = summarize(log);
    CHECK(rows.size() == 20);
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(*rows[i].best_so_far >= *rows[i - 1].best_so_far);
    std::ostringstream s;
    write_summary(log, s);
    const std::string text = s.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == 21);
    // raw coordinates are in the Branin box
    for (const auto& r : rows) {
      CHECK(r.x[0] >= -5.0);
      CHECK(r.x[0] <= 10.0);
    }
  }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>
#include <vector>

#include "pipe_harness.hpp"

// The streaming contract: a decision for line k is emitted before line k+1
// is read. The harness feeds exactly one line at a time over a blocking
// pipe and requires the matching decision before it supplies the next
// line; an implementation that reads ahead (or buffers input before
// deciding) stalls and hits the poll timeout.

namespace {

constexpr int kTimeoutMs = 10000;

std::string cli_path() { return SAST_CLI_PATH; }

}  // namespace

TEST_CASE("decision for line k arrives before line k+1 exists") {
  auto child = pipe_harness::spawn(
      {cli_path(), "stream", "--method", "fixed", "--threshold", "0.01",
       "--input", "p"});
  REQUIRE(child.pid > 0);

  for (int k = 1; k <= 100; ++k) {
    const std::string value = (k % 7 == 0) ? "0.001" : "0.6";
    REQUIRE(pipe_harness::write_line(child, std::to_string(k) + "," + value));
    std::string line;
    const bool got = pipe_harness::read_line(child, line, kTimeoutMs);
    if (!got) {
      pipe_harness::kill_child(child);
      FAIL("no decision for line ", k,
           " while the next line was withheld (read-ahead or stall)");
    }
    REQUIRE(line.rfind(std::to_string(k) + ",", 0) == 0);
    const std::string decision = line.substr(line.rfind(',') + 1);
    CHECK(decision == ((k % 7 == 0) ? "reject" : "accept"));
    // Exactly one decision per line: the output must now be silent.
    CHECK(pipe_harness::output_quiet(child, 20));
  }
  CHECK(pipe_harness::finish(child) == 0);
}

TEST_CASE("data-driven stream stays silent through burn-in") {
  auto child = pipe_harness::spawn(
      {cli_path(), "stream", "--method", "sast-dd", "--burn-in", "30", "--d",
       "60", "--refresh", "10"});
  REQUIRE(child.pid > 0);

  // Burn-in lines produce no output at all.
  for (int k = 1; k <= 30; ++k) {
    REQUIRE(pipe_harness::write_line(
        child, std::to_string(k) + "," + std::to_string(0.1 * (k % 7))));
  }
  CHECK(pipe_harness::output_quiet(child, 200));

  // From the next line on, one decision per line, still in lockstep.
  for (int k = 31; k <= 50; ++k) {
    REQUIRE(pipe_harness::write_line(
        child, std::to_string(k) + "," + std::to_string(0.1 * (k % 7))));
    std::string line;
    if (!pipe_harness::read_line(child, line, kTimeoutMs)) {
      pipe_harness::kill_child(child);
      FAIL("no decision for line ", k);
    }
    REQUIRE(line.rfind(std::to_string(k) + ",", 0) == 0);
  }
  CHECK(pipe_harness::finish(child) == 0);
}

TEST_CASE("unparsable lines yield an error record and the stream continues") {
  auto child = pipe_harness::spawn(
      {cli_path(), "stream", "--method", "lond", "--input", "p"});
  REQUIRE(child.pid > 0);

  std::string line;
  REQUIRE(pipe_harness::write_line(child, "1,0.5"));
  REQUIRE(pipe_harness::read_line(child, line, kTimeoutMs));
  CHECK(line == "1,0.5,0.5,0.0303964,accept");

  REQUIRE(pipe_harness::write_line(child, "this is not a record"));
  REQUIRE(pipe_harness::read_line(child, line, kTimeoutMs));
  CHECK(line == ",,,,error");

  REQUIRE(pipe_harness::write_line(child, "3,junkvalue"));
  REQUIRE(pipe_harness::read_line(child, line, kTimeoutMs));
  CHECK(line == ",,,,error");

  REQUIRE(pipe_harness::write_line(child, "4,0.00001"));
  REQUIRE(pipe_harness::read_line(child, line, kTimeoutMs));
  CHECK(line.rfind("4,0.00001,", 0) == 0);
  CHECK(line.substr(line.rfind(',') + 1) == "reject");

  CHECK(pipe_harness::finish(child) == 0);
}

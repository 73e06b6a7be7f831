#include <doctest.h>

#include <sstream>
#include <string>

#include "laplace_bridge/errors.hpp"
#include "laplace_bridge/records.hpp"

using namespace lbridge;

namespace {

std::size_t parse_error_line(const std::string& text) {
  std::istringstream in(text);
  try {
    read_logit_records(in);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST_CASE("dirichlet records") {
  std::istringstream in(
      "{\"id\": \"a\", \"label\": 2, \"alpha\": [1, 2, 3]}\n"
      "\n"
      "{\"id\": \"b\", \"alpha\": [0.5, 0.5, 9]}\n");
  const auto recs = read_dirichlet_records(in);
  REQUIRE(recs.size() == 2);
  CHECK(recs[0].id == "a");
  CHECK(recs[0].label == 2);
  CHECK_FALSE(recs[1].label.has_value());
  CHECK(recs[1].alpha[2] == 9.0);

  std::istringstream bad("{\"id\": \"z\", \"alpha\": [1, -2]}\n");
  const auto parsed = read_dirichlet_records(bad);
  try {
    parsed[0].params();
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("'z'") != std::string::npos);
  }
}

TEST_CASE("logit records and round trip") {
  std::istringstream in(
      "{\"id\": \"f\", \"label\": 0, \"mean\": [0.1, -0.2], "
      "\"cov\": {\"type\": \"full\", \"data\": [1, 0.25, 0.25, 2]}}\n"
      "{\"id\": \"d\", \"mean\": [1, 2], \"cov\": {\"type\": \"diag\", \"data\": [0.3, 0.4]}}\n"
      "{\"id\": \"k\", \"mean\": [0, 0], "
      "\"cov\": {\"type\": \"kron\", \"scale\": 0.5, \"U\": [2, 0, 0, 4]}}\n");
  const auto recs = read_logit_records(in);
  REQUIRE(recs.size() == 3);
  CHECK(recs[0].gaussian().dense_covariance()(0, 1) == 0.25);
  CHECK(recs[1].gaussian().variances() == Vector{{0.3, 0.4}});
  CHECK(recs[2].gaussian().variances() == Vector{{1.0, 2.0}});

  std::ostringstream out;
  for (const auto& r : recs) write_record(out, r);
  std::istringstream again(out.str());
  const auto back = read_logit_records(again);
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back[i].id == recs[i].id);
    CHECK(back[i].label == recs[i].label);
    CHECK(back[i].mean == recs[i].mean);
    CHECK(back[i].gaussian().dense_covariance() == recs[i].gaussian().dense_covariance());
    CHECK(back[i].cov.index() == recs[i].cov.index());
  }

  DirichletRecord d{"x", 1, Vector{{0.1 + 0.2, 1.0 / 3.0}}};
  std::ostringstream dout;
  write_record(dout, d);
  std::istringstream din(dout.str());
  const auto dback = read_dirichlet_records(din);
  CHECK(dback[0].alpha == d.alpha);
  CHECK(dback[0].label == 1);
}

TEST_CASE("parse errors carry line numbers") {
  const std::string good =
      "{\"id\": \"a\", \"mean\": [0, 0], \"cov\": {\"type\": \"diag\", \"data\": [1, 1]}}\n";
  CHECK(parse_error_line(good + "{not json\n") == 2);
  CHECK(parse_error_line(good + good + "{\"id\": \"b\", \"mean\": [0, 0]}\n") == 3);
  CHECK(parse_error_line("{\"id\": \"a\", \"mean\": [0, 0], "
                         "\"cov\": {\"type\": \"diag\", \"data\": [1]}}\n") == 1);
  CHECK(parse_error_line("{\"id\": \"a\", \"mean\": [0, 0], "
                         "\"cov\": {\"type\": \"band\", \"data\": [1, 1]}}\n") == 1);
  CHECK(parse_error_line(good + "{\"id\": \"c\", \"mean\": [0, 0, 0], "
                                "\"cov\": {\"type\": \"diag\", \"data\": [1, 1, 1]}}\n") == 2);
  CHECK(parse_error_line("{\"id\": \"a\", \"label\": 2, \"mean\": [0, 0], "
                         "\"cov\": {\"type\": \"diag\", \"data\": [1, 1]}}\n") == 1);
  CHECK(parse_error_line("{\"id\": [5], \"mean\": [0, 0], "
                         "\"cov\": {\"type\": \"diag\", \"data\": [1, 1]}}\n") == 1);
  CHECK(parse_error_line("{\"id\": \"a\", \"mean\": [0], "
                         "\"cov\": {\"type\": \"diag\", \"data\": [1]}}\n") == 1);

  std::istringstream bad("{\"id\": \"a\", \"alpha\": [1, \"x\"]}\n");
  CHECK_THROWS_AS(read_dirichlet_records(bad), ParseError);
  CHECK_THROWS_AS(read_logit_file("/nonexistent/path.jsonl"), ParseError);
}

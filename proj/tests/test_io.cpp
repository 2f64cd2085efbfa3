#include <doctest.h>

#include <chrono>
#include <fstream>
#include <sstream>

#include "skewirt/errors.hpp"
#include "skewirt/io.hpp"
#include "skewirt/synthgen.hpp"
#include "temp_dir.hpp"

using namespace skewirt;
using testutil::TempDir;

namespace {

ResponseMatrix parse(const std::string& text) {
  std::istringstream in(text);
  return io::parse_responses(in, "test.csv");
}

std::string data_error(const std::string& text) {
  try {
    parse(text);
  } catch (const DataError& e) {
    return e.what();
  }
  return "";
}

DrawStore small_store(std::size_t n_draws, std::uint32_t chain = 1) {
  const auto s = preset("all-asymmetric-40", 25, 3);
  const auto data = generate(s);
  McmcConfig m;
  m.iterations = 20 + 2 * n_draws;
  m.burnin = 20;
  m.thin = 2;
  m.chains = 1;
  m.seed = 77;
  return run_chain(data.responses, PriorConfig{}, TuningConfig{}, m, ModelKind::three_param, {}, chain);
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("responses parse") {
  const auto r = parse("id,q1,q2\ns1,0,1\ns2,1,1\n");
  CHECK(r.n_items() == 2);
  CHECK(r.n_subjects() == 2);
  CHECK(r.item_ids == std::vector<std::string>{"q1", "q2"});
  CHECK(r.subject_ids == std::vector<std::string>{"s1", "s2"});
  CHECK(r.y(0, 0) == 0);
  CHECK(r.y(1, 0) == 1);
  CHECK(r.y(0, 1) == 1);
  CHECK(r.y(1, 1) == 1);

  const auto t = parse("id\tq1\tq2\r\ns1\t0\t1\r\n");
  CHECK(t.n_subjects() == 1);
  CHECK(t.y(1, 0) == 1);
  CHECK(parse("id;a\nx;1\n").y(0, 0) == 1);
}

TEST_CASE("responses errors name row and column") {
  CHECK(data_error("id,q1,q2\ns1,0,NA\n").find("row 2, column 3") != std::string::npos);
  CHECK(data_error("id,q1,q2\ns1,0,NA\n").find("NA") != std::string::npos);
  CHECK(data_error("id,q1,q2\ns1,0,2\n").find("row 2, column 3") != std::string::npos);
  CHECK(data_error("id,q1,q2\ns1,0,1.0\n").find("row 2, column 3") != std::string::npos);
  CHECK(data_error("id,q1,q2\ns1,0,\n").find("row 2, column 3") != std::string::npos);
  CHECK(data_error("id,q1,q2\ns1,0,1\ns2,0\n").find("row 3") != std::string::npos);
  CHECK(data_error("id,q1,q2\ns1,0,1,1\n").find("row 2") != std::string::npos);
  CHECK(data_error("id,q1,q1\ns1,0,1\n").find("row 1, column 3") != std::string::npos);
  CHECK(data_error("id,q1,q2\ns1,0,1\ns1,1,1\n").find("row 3, column 1") != std::string::npos);
  CHECK(!data_error("").empty());
  CHECK(!data_error("id,q1\n").empty());
  CHECK_THROWS_AS(io::read_responses("/nonexistent/responses.csv"), DataError);
}

TEST_CASE("responses round trip and full-scale parse time") {
  const auto data = generate(preset("all-symmetric-40", 10000, 9));
  std::ostringstream out;
  io::write_responses(out, data.responses);
  const std::string text = out.str();
  const auto t0 = std::chrono::steady_clock::now();
  const auto back = parse(text);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  MESSAGE("40 x 10000 parse: " << secs << " s");
  CHECK(secs < 2.0);
  CHECK(back == data.responses);
}

TEST_CASE("draws round trip exactly") {
  const auto store = small_store(10);
  REQUIRE(store.draws.size() == 10);
  std::stringstream buf;
  io::write_draws(buf, store);
  const auto back = io::parse_draws(buf, "mem");
  CHECK(back == store);
  CHECK(back.config_echo == store.config_echo);
  CHECK(back.seed == 77);

  TempDir dir;
  io::write_draws(io::draws_path(dir.path(), 1), store);
  CHECK(io::read_draws(io::draws_path(dir.path(), 1)) == store);
}

TEST_CASE("draws errors") {
  const auto store = small_store(4);
  std::ostringstream out;
  io::write_draws(out, store);
  const std::string text = out.str();

  std::string bumped = text;
  bumped.replace(bumped.find("skewirt-draws 1"), 15, "skewirt-draws 9");
  std::istringstream v(bumped);
  CHECK_THROWS_AS(io::parse_draws(v), DataError);

  // Drop the last row entirely, then cut one mid-row.
  std::string short_rows = text.substr(0, text.rfind('\n', text.size() - 2) + 1);
  std::istringstream t1(short_rows);
  CHECK_THROWS_AS(io::parse_draws(t1), DataError);
  std::istringstream t2(text.substr(0, text.size() - 40));
  CHECK_THROWS_AS(io::parse_draws(t2), DataError);
  std::istringstream t3(text.substr(0, text.find("\niteration\t") + 1));
  CHECK_THROWS_AS(io::parse_draws(t3), DataError);
  std::istringstream t4(text + text.substr(text.rfind('\n', text.size() - 2) + 1));
  CHECK_THROWS_AS(io::parse_draws(t4), DataError);
  CHECK_THROWS_AS(io::read_draws("/nonexistent/chain-1.draws"), DataError);
}

TEST_CASE("chains merge by chain id") {
  TempDir dir;
  const auto c2 = small_store(3, 2);
  const auto c1 = small_store(3, 1);
  io::write_draws(dir / "b.draws", c1);
  io::write_draws(dir / "a.draws", c2);
  const auto all = io::read_draws_dir(dir.path());
  REQUIRE(all.size() == 2);
  CHECK(all[0].chain == 1);
  CHECK(all[1].chain == 2);
  CHECK(all[0] == c1);

  io::write_draws(dir / "c.draws", c1);
  CHECK_THROWS_AS(io::read_draws_dir(dir.path()), DataError);
  TempDir empty;
  CHECK_THROWS_AS(io::read_draws_dir(empty.path()), DataError);

  // The chain column must agree with the header.
  std::ostringstream out;
  io::write_draws(out, c1);
  std::string text = out.str();
  const auto row = text.find('\n', text.find("\niteration\t") + 1) + 1;
  const auto tab = text.find('\t', row);
  text.replace(tab + 1, 1, "7");
  std::istringstream in(text);
  CHECK_THROWS_AS(io::parse_draws(in), DataError);
}

TEST_CASE("draw file size at study scale") {
  // 2000 draws x 40 items: measured on J = 1000 and extrapolated linearly in
  // the number of columns.
  const auto s = preset("all-asymmetric-40", 1000, 3);
  const auto data = generate(s);
  McmcConfig m;
  m.iterations = 40;
  m.burnin = 0;
  m.thin = 1;
  m.chains = 1;
  const auto store = run_chain(data.responses, PriorConfig{}, TuningConfig{}, m, ModelKind::two_param);
  std::ostringstream out;
  io::write_draws(out, store);
  const double per_row = static_cast<double>(out.str().size()) / 40.0;
  const double bytes = per_row * 2000.0;
  MESSAGE("2000-draw, 40-item, J=1000 store: " << bytes / 1e6 << " MB");
  CHECK(bytes < 100e6);
}

TEST_CASE("fixed guessing file") {
  const std::vector<std::string> ids{"q1", "q2"};
  std::istringstream ok("item,c\nq2,0.1\nq1,0.25\n");
  CHECK(io::parse_fixed_c(ok, ids) == std::vector<double>{0.25, 0.1});
  std::istringstream noheader("q1,0\nq2,0.5\n");
  CHECK(io::parse_fixed_c(noheader, ids) == std::vector<double>{0.0, 0.5});
  for (const char* bad : {"item,c\nq1,0.2\n", "item,c\nq1,0.2\nq2,1.0\n", "item,c\nq1,0.2\nq2,x\n",
                          "item,c\nq1,0.2\nq2,0.1\nq1,0.3\n", "item,c\nq1,0.2\nq3,0.1\n", "item,c\nq1,0.2\nq2,-0.1\n"}) {
    std::istringstream in(bad);
    CAPTURE(bad);
    CHECK_THROWS_AS(io::parse_fixed_c(in, ids), DataError);
  }
}

TEST_CASE("truth round trip") {
  auto s = preset("all-asymmetric-40", 50, 12);
  s.true_c[3] = 0.2;
  const auto data = generate(s);
  TempDir dir;
  io::write_truth(dir.path(), s, data);
  const auto t = io::read_truth(dir.path());
  CHECK(t.scenario.true_a == s.true_a);
  CHECK(t.scenario.true_b == s.true_b);
  CHECK(t.scenario.true_c == s.true_c);
  CHECK(t.scenario.true_gamma == s.true_gamma);
  CHECK(t.scenario.n_subjects == 50);
  CHECK(t.scenario.seed == 12);
  CHECK(t.theta == data.theta);
}

TEST_CASE("summary table") {
  ItemSummary it;
  it.item_id = "q1";
  it.post_mean_a = 1.25;
  it.z_probs = {0.5, 0.25, 0.25};
  it.classification = Component::symmetric;
  std::ostringstream out;
  io::write_summary(out, std::vector<ItemSummary>{it});
  const std::string text = out.str();
  CHECK(text.rfind("item,a,b,c,Z0,Z1,Z2,gamma,class,flag,", 0) == 0);
  CHECK(text.find("q1,1.25,") != std::string::npos);
}

}  // TEST_SUITE

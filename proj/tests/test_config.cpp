#include <doctest.h>

#include "config.hpp"
#include "ionbath/errors.hpp"
#include "output.hpp"

using namespace ionbath;
using namespace ionbath::cli;

TEST_CASE("defaults and sections") {
  Config c;
  CHECK(c.get_int("chain.n_ions") == 50);
  c.load_text("[chain]\nn_ions = 12  # inline\n# comment\ndefect_distance=2\n[coupling]\ngamma = 3.5\n");
  CHECK(c.get_int("chain.n_ions") == 12);
  CHECK(c.get_double("coupling.gamma") == 3.5);
  const ChainSpec s = chain_spec(c);
  CHECK(s.n_ions == 12);
  CHECK(s.defect_distance == 2);
}

TEST_CASE("unknown keys are rejected with their name") {
  Config c;
  try {
    c.load_text("[chain]\nn_ion = 3\n");
    FAIL("expected rejection");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("chain.n_ion") != std::string::npos);
    CHECK(is_input_error(e.kind()));
  }
  CHECK_THROWS_AS(c.apply_override("bogus.key=1"), Error);
  CHECK_THROWS_AS(c.apply_override("chain.n_ions"), Error);
}

TEST_CASE("overrides and typed values") {
  Config c;
  c.apply_override("scan.values=0.5, 1.0,1.5");
  const auto v = c.get_list("scan.values");
  REQUIRE(v.size() == 3);
  CHECK(v[2] == 1.5);
  c.apply_override("chain.n_ions=abc");
  CHECK_THROWS_AS(c.get_int("chain.n_ions"), Error);
  c.apply_override("chain.n_ions=12");
  c.apply_override("tuning.parity=even");
  CHECK(scenario(c).tuning.parity == Parity::even);
  c.apply_override("tuning.parity=sideways");
  CHECK_THROWS_AS(scenario(c), Error);
}

TEST_CASE("numbers are written with twelve significant digits") {
  CHECK(fmt(1.0 / 3.0) == "0.333333333333");
  CHECK(fmt(0.0) == "0");
  CHECK(fmt(std::nan("")) == "nan");
}

TEST_CASE("scenario hash depends on configuration and seed") {
  Config a, b;
  b.apply_override("chain.n_ions=51");
  RunContext ca{"evolve", ".", Format::csv, 1, 1, &a};
  RunContext cb{"evolve", ".", Format::csv, 1, 1, &b};
  CHECK(scenario_hash(ca) != scenario_hash(cb));
  CHECK(scenario_hash(ca).size() == 16);
  RunContext cs = ca;
  cs.seed = 2;
  CHECK(scenario_hash(ca) != scenario_hash(cs));
  RunContext cj = ca;
  cj.jobs = 4;
  CHECK(scenario_hash(ca) == scenario_hash(cj));
}

#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ldsnoma/random.hpp"
#include "ldsnoma/scenario.hpp"
#include "ldsnoma/units.hpp"

using ldsnoma::make_drop;
using ldsnoma::RandomStream;
using ldsnoma::Scenario;
using ldsnoma::UeRecord;

TEST_CASE("db/linear conversions round-trip") {
  CHECK(ldsnoma::db_to_linear(0.0) == 1.0);
  CHECK(ldsnoma::db_to_linear(10.0) == doctest::Approx(10.0));
  CHECK(ldsnoma::linear_to_db(100.0) == doctest::Approx(20.0));
  CHECK(ldsnoma::linear_to_db(ldsnoma::db_to_linear(-87.3)) ==
        doctest::Approx(-87.3).epsilon(1e-12));
}

TEST_CASE("make_drop reproduces the evaluation settings") {
  const Scenario scn = make_drop(50, 100, 2, RandomStream(3));
  CHECK(scn.num_subchannels == 50);
  CHECK(scn.num_ues() == 100);
  CHECK(scn.noise_power == ldsnoma::db_to_linear(-120.0));
  CHECK(scn.noise_power == doctest::Approx(1e-12).epsilon(1e-14));
  for (const UeRecord& ue : scn.ues) {
    CHECK(ue.power_budget == 1.0);
    CHECK(ue.sparsity == 2);
    CHECK(ue.pathloss_gain >= 1e-15);
    CHECK(ue.pathloss_gain <= 1e-6);
  }
}

TEST_CASE("make_drop minimal instance") {
  const Scenario scn = make_drop(1, 1, 1, RandomStream(3));
  CHECK(scn.ues[0].sparsity == 1);
  CHECK(scn.ues[0].power_budget == 1.0);
  CHECK(scn.noise_power == doctest::Approx(1e-12).epsilon(1e-14));
}

TEST_CASE("make_drop is a pure function of (F, K, d, seed)") {
  const Scenario a = make_drop(50, 100, 2, RandomStream(7));
  const Scenario b = make_drop(50, 100, 2, RandomStream(7));
  REQUIRE(a.num_ues() == b.num_ues());
  for (int k = 0; k < a.num_ues(); ++k)
    CHECK(a.ues[k].pathloss_gain == b.ues[k].pathloss_gain);

  const Scenario c = make_drop(50, 100, 2, RandomStream(8));
  int differing = 0;
  for (int k = 0; k < a.num_ues(); ++k)
    if (a.ues[k].pathloss_gain != c.ues[k].pathloss_gain) ++differing;
  CHECK(differing == a.num_ues());
}

TEST_CASE("make_drop rejects invalid dimensions with diagnostics") {
  CHECK_THROWS_AS(make_drop(0, 1, 1, RandomStream(1)), std::invalid_argument);
  CHECK_THROWS_AS(make_drop(1, 0, 1, RandomStream(1)), std::invalid_argument);
  CHECK_THROWS_AS(make_drop(4, 2, 5, RandomStream(1)), std::invalid_argument);
  CHECK_THROWS_AS(make_drop(4, 2, 0, RandomStream(1)), std::invalid_argument);
  CHECK_THROWS_WITH_AS(make_drop(4, 2, 5, RandomStream(1)),
                       doctest::Contains("d=5"), std::invalid_argument);
}

TEST_CASE("validate reports every violated field") {
  Scenario scn;
  scn.num_subchannels = 0;
  scn.noise_power = -1.0;
  CHECK_THROWS_AS(scn.validate(), std::invalid_argument);

  scn = make_drop(4, 2, 2, RandomStream(1));
  scn.ues[1].sparsity = 9;
  scn.ues[0].power_budget = 0.0;
  try {
    scn.validate();
    FAIL("expected invalid_argument");
  } catch (const std::invalid_argument& e) {
    const std::string what = e.what();
    CHECK(what.find("UE 0") != std::string::npos);
    CHECK(what.find("UE 1") != std::string::npos);
  }
}

TEST_CASE("scenario text round-trip preserves the instance") {
  const Scenario scn = make_drop(6, 4, 2, RandomStream(5));
  std::stringstream buf;
  ldsnoma::save_scenario(scn, buf);
  const Scenario back = ldsnoma::load_scenario(buf);
  CHECK(back.num_subchannels == scn.num_subchannels);
  CHECK(back.num_ues() == scn.num_ues());
  CHECK(back.noise_power == doctest::Approx(scn.noise_power).epsilon(1e-14));
  for (int k = 0; k < scn.num_ues(); ++k) {
    CHECK(back.ues[k].pathloss_gain ==
          doctest::Approx(scn.ues[k].pathloss_gain).epsilon(1e-14));
    CHECK(back.ues[k].power_budget == scn.ues[k].power_budget);
    CHECK(back.ues[k].sparsity == scn.ues[k].sparsity);
  }
}

TEST_CASE("scenario loader rejects malformed documents") {
  const auto load = [](const std::string& text) {
    std::istringstream in(text);
    return ldsnoma::load_scenario(in);
  };
  CHECK_THROWS_WITH_AS(
      load("F = 2\nK = 1\nsigma2_dBW = -120\npathloss_dB = -80\npower_W = 1\n"
           "sparsity = 1\nbogus = 3\n"),
      doctest::Contains("bogus"), std::invalid_argument);
  // K says two UEs but the arrays list one.
  CHECK_THROWS_AS(
      load("F = 2\nK = 2\nsigma2_dBW = -120\npathloss_dB = -80\npower_W = 1\n"
           "sparsity = 1\n"),
      std::invalid_argument);
  // Missing required key.
  CHECK_THROWS_AS(load("F = 2\nK = 0\n"), std::invalid_argument);
}

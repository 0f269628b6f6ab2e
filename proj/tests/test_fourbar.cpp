#include <gtest/gtest.h>

#include <chrono>
#include <random>

#include "myohand/fourbar.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace myohand;
using testing_support::uniform;
using namespace oracles;

namespace {

const TridigitalGeometry& reference() { return testing_support::default_project().geometry; }

}  // namespace

TEST(Fourbar, ClosureMatchesBisectionOracleAndResidualIsTiny) {
  std::mt19937_64 rng(21);
  int solved = 0;
  for (int i = 0; i < 40; ++i) {
    const TridigitalGeometry g = random_geometry(rng);
    for (int k = 0; k < 10; ++k) {
      const double tf = uniform(rng, -180, 180);
      const auto phi = solve_closure(g, deg2rad(tf), g.branch);
      const auto want = closure_oracle(g, tf);
      if (!phi) continue;
      ++solved;
      const double tt = solve_fourbar(g, tf);
      EXPECT_LT(closure_residual(g, tf, tt), 1e-9);
      if (want) EXPECT_NEAR(wrap_deg(tt - *want), 0.0, 1e-7) << "theta_f=" << tf;
    }
  }
  EXPECT_GT(solved, 100);
}

TEST(Fourbar, UnreachableClosureReported) {
  TridigitalGeometry g = reference();
  g.l_r = 200.0;  // rod far longer than anything it can span
  try {
    solve_fourbar(g, 40.0);
    FAIL();
  } catch (const MechanismError& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnreachableClosure);
  }
  EXPECT_FALSE(is_feasible(g));
  EXPECT_TRUE(is_feasible(reference()));
}

TEST(Fourbar, VirtualWorkAgainstFiniteDifferences) {
  std::mt19937_64 rng(99);
  const DriveParameters drive{6000.0, 150.0};
  const auto t0 = std::chrono::steady_clock::now();
  int geometries = 0, states = 0;
  while (geometries < 100) {
    const TridigitalGeometry g = random_geometry(rng);
    int here = 0;
    for (int attempt = 0; attempt < 200 && here < 10; ++attempt) {
      const double tf = uniform(rng, -180, 180);
      const double h = 1e-4;
      const auto tp = solve_closure(g, deg2rad(tf + h), g.branch);
      const auto tm = solve_closure(g, deg2rad(tf - h), g.branch);
      if (!tp || !tm) continue;
      const double dp = opening_oracle(g, tf + h, rad2deg(*tp));
      const double dm = opening_oracle(g, tf - h, rad2deg(*tm));
      const double fd = (dp - dm) / deg2rad(2 * h);
      if (std::abs(fd) < 1.0 || dm < 1.0) continue;  // keep away from singular and contact states
      double force;
      try {
        force = grip_force(g, {tf, 0.0, GripMode::Opposed, 0.0}, drive);
      } catch (const MechanismError&) {
        continue;
      }
      EXPECT_NEAR(force * std::abs(fd) / drive.tau_in, 1.0, 1e-6) << "theta_f=" << tf;
      ++here;
    }
    if (here == 10) {
      ++geometries;
      states += here;
    }
  }
  EXPECT_EQ(states, 1000);
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 10.0);
}

TEST(Fourbar, ApertureRateMatchesOracleOpening) {
  const TridigitalGeometry& g = reference();
  for (double tf = 45.0; tf <= 95.0; tf += 5.0) {
    const ApertureRate ar = aperture_rate(g, tf, GripMode::Opposed);
    const auto tt = closure_oracle(g, tf);
    ASSERT_TRUE(tt);
    EXPECT_NEAR(ar.opening, opening_oracle(g, tf, *tt), 1e-7);
  }
}

TEST(Fourbar, GripForceSingularBelowThreshold) {
  const TridigitalGeometry& g = reference();
  FourbarOptions opt;
  opt.eps_arm = 1e9;
  try {
    grip_force(g, {60.0, 0.0, GripMode::Opposed, 0.0}, {6000.0, 150.0}, opt);
    FAIL();
  } catch (const MechanismError& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularConfiguration);
  }
}

TEST(Fourbar, LateralGripNeedsAnAxis) {
  try {
    opening_distance(reference(), {60.0, 50.0, GripMode::Lateral, 90.0});
    FAIL();
  } catch (const MechanismError& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvariantViolation);
  }
}

// Contact of the reference linkage, from a dense scan of the oracle opening.
TEST(Fourbar, ContactConfigurationFrozen) {
  const TridigitalGeometry& g = reference();
  double best_tf = 0, best = 1e9;
  for (double tf = 30.0; tf <= 60.0; tf += 0.01) {
    const auto tt = closure_oracle(g, tf);
    if (!tt) continue;
    const double d = opening_oracle(g, tf, *tt);
    if (d < best) {
      best = d;
      best_tf = tf;
    }
  }
  // oracle values, frozen
  EXPECT_NEAR(best_tf, 43.04, 0.01);
  EXPECT_NEAR(best, 0.384, 0.001);
  const auto c = find_contact(g);
  ASSERT_TRUE(c);
  EXPECT_NEAR(c->theta_f, 43.0432, 1e-3);
  EXPECT_NEAR(c->opening, best, 1e-4);
}

TEST(Fourbar, ReferenceCalibrationWithinTolerances) {
  const auto& p = testing_support::default_project();
  const Calibration c = calibrate_stroke(p.geometry, 110.0, 0.37, 150.0, p.fourbar);
  EXPECT_NEAR(c.stroke().extent(), 55.5, 5.0);
  EXPECT_LT(c.theta_closed, c.theta_open);  // closing decreases theta_f
  EXPECT_NEAR(c.contact_residual, 0.384, 1e-3);
  // the shipped project records the same calibration
  EXPECT_NEAR(p.calibration.result.theta_open, c.theta_open, 1e-9);
  EXPECT_NEAR(p.calibration.result.theta_closed, c.theta_closed, 1e-9);

  const ForceCurve curve = force_curve(p.geometry, p.drive, c.stroke(), 0.5, p.fourbar);
  double max_open = 0;
  for (const auto& s : curve.samples) max_open = std::max(max_open, s.opening);
  EXPECT_GE(max_open, 100.0);
  EXPECT_LE(max_open, 120.0);
  const double time = closing_time(c.stroke().extent(), 150.0);
  EXPECT_GE(time, 0.34);
  EXPECT_LE(time, 0.40);
  const double var = force_variation(curve);
  EXPECT_GE(var, 0.15);
  EXPECT_LE(var, 0.35);
}

TEST(Fourbar, CalibrationRejectsNonPositiveSpeed) {
  try {
    calibrate_stroke(reference(), 110.0, 0.37, 0.0);
    FAIL();
  } catch (const MechanismError& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonPositiveSpeed);
  }
}

TEST(Fourbar, StrokeSamplingCounts) {
  EXPECT_EQ(stroke_samples({10.0, 20.0}, 1.0).size(), 11u);
  EXPECT_EQ(stroke_samples({10.0, 20.5}, 1.0).size(), 12u);
  const auto two = stroke_samples({10.0, 20.0}, 50.0);
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(two.front(), 10.0);
  EXPECT_EQ(two.back(), 20.0);
  EXPECT_THROW(stroke_samples({10.0, 10.0}, 1.0), MechanismError);
  EXPECT_THROW(stroke_samples({10.0, 20.0}, 0.0), MechanismError);
}

TEST(Fourbar, ContactSamplesFlaggedNotDropped) {
  const auto& p = testing_support::default_project();
  const ForceCurve curve = force_curve(p.geometry, p.drive, p.calibration.result.stroke(), 1.0, p.fourbar);
  ASSERT_FALSE(curve.samples.empty());
  EXPECT_TRUE(curve.samples.front().singular);
  EXPECT_EQ(curve.samples.front().reason, "contact");
  for (std::size_t i = 1; i < curve.samples.size(); ++i) EXPECT_FALSE(curve.samples[i].singular);
}

TEST(Fourbar, ForceVariationAllSingular) {
  ForceCurve c;
  c.samples.push_back({});
  c.samples.back().singular = true;
  try {
    force_variation(c);
    FAIL();
  } catch (const MechanismError& e) {
    EXPECT_EQ(e.code(), ErrorCode::AllSingular);
  }
}

TEST(Fourbar, InvariantsNamed) {
  TridigitalGeometry g = reference();
  g.l_r = -1.0;
  try {
    validate(g);
    FAIL();
  } catch (const MechanismError& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvariantViolation);
    EXPECT_NE(std::string(e.what()).find("l_r > 0"), std::string::npos);
  }
}

#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include "flexport/model.hpp"
#include "support/fixtures.hpp"

using namespace flexport;

namespace {

using Big = boost::multiprecision::cpp_dec_float_50;

double annuity_oracle(double investment, double lifetime, double wacc, double fom) {
  const Big inv(investment), r(wacc), n(lifetime);
  Big factor = r == 0 ? Big(1) / n : r / (Big(1) - boost::multiprecision::pow(Big(1) + r, -n));
  return static_cast<double>(inv * factor + inv * Big(fom));
}

bool has_violation(const ValidationReport& rep, const std::string& component, const std::string& text) {
  for (const auto& v : rep.violations)
    if (v.component.find(component) != std::string::npos && v.message.find(text) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST(Annuity, ElectrolysisInvestmentMatchesHighPrecision) {
  const double got = annuitize(450.0, 30.0, 0.10, 0.02);
  EXPECT_NEAR(got, annuity_oracle(450.0, 30.0, 0.10, 0.02), 1e-11);
  EXPECT_NEAR(got, 56.74, 0.005);
}

TEST(Annuity, ZeroInvestmentCostsNothing) { EXPECT_EQ(annuitize(0.0, 20.0, 0.076, 0.02), 0.0); }

TEST(Annuity, OneYearWithoutInterestRepaysInFull) { EXPECT_DOUBLE_EQ(annuitize(100.0, 1.0, 0.0, 0.0), 100.0); }

TEST(Annuity, GridAgainstHighPrecision) {
  for (double inv : {1.0, 450.0, 2.5e6})
    for (double n : {1.0, 7.0, 25.0, 40.0})
      for (double r : {0.0, 0.01, 0.076, 0.2})
        for (double fom : {0.0, 0.015})
          EXPECT_NEAR(annuitize(inv, n, r, fom), annuity_oracle(inv, n, r, fom), 1e-12 * inv * 10.0)
              << inv << ' ' << n << ' ' << r << ' ' << fom;
}

TEST(Annuity, RejectsOutOfRangeInputs) {
  EXPECT_THROW((void)annuitize(-1.0, 10.0, 0.05, 0.0), std::invalid_argument);
  EXPECT_THROW((void)annuitize(1.0, 0.5, 0.05, 0.0), std::invalid_argument);
  EXPECT_THROW((void)annuitize(1.0, 10.0, -0.01, 0.0), std::invalid_argument);
  EXPECT_THROW((void)annuitize(1.0, 10.0, 0.05, -0.1), std::invalid_argument);
  EXPECT_THROW((void)annuitize(kInf, 10.0, 0.05, 0.0), std::invalid_argument);
}

TEST(Validate, WellFormedTwoBusNetworkIsClean) {
  NetworkData d = fixtures::electrolysis_port(4, 30.0);
  d.loads = {fixtures::load("demand", "el", {1, 2, 3, 4})};
  const ValidationReport rep = validate_network(d);
  EXPECT_TRUE(rep.ok()) << rep.to_string();
  EXPECT_NO_THROW(Network{d});
}

TEST(Validate, AvailabilityAboveOneIsFlagged) {
  NetworkData d = fixtures::single_bus(3, 30.0, 5.0);
  d.generators[0].availability[1] = 1.2;
  const ValidationReport rep = validate_network(d);
  EXPECT_TRUE(has_violation(rep, "gen", "profile out of [0,1]")) << rep.to_string();
  EXPECT_THROW(Network{d}, ValidationError);
}

TEST(Validate, LinkToMissingBusIsDangling) {
  NetworkData d = fixtures::single_bus(2, 30.0, 5.0);
  d.links = {fixtures::link("line", "el", "nowhere", 1.0, 10.0)};
  const ValidationReport rep = validate_network(d);
  EXPECT_TRUE(has_violation(rep, "line", "dangling reference")) << rep.to_string();
}

TEST(Validate, ReportsEveryViolation) {
  NetworkData d = fixtures::single_bus(2, 30.0, 5.0);
  d.generators[0].carrier = "coal";
  d.loads[0].profile = {1.0};
  d.buses.push_back(d.buses[0]);
  const ValidationReport rep = validate_network(d);
  EXPECT_TRUE(has_violation(rep, "gen", "dangling reference to carrier"));
  EXPECT_TRUE(has_violation(rep, "demand", "expected 2"));
  EXPECT_GE(rep.violations.size(), 3u);
  try {
    Network n{d};
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.report().violations.size(), rep.violations.size());
  }
}

TEST(Validate, ElectrolyzerMustMakeHydrogen) {
  NetworkData d = fixtures::electrolysis_port(2, 30.0);
  d.links[0].to_bus = "el";
  d.buses.push_back({"el2", "electricity", false});
  d.links[0].to_bus = "el2";
  EXPECT_TRUE(has_violation(validate_network(d), "electrolyzer", "hydrogen"));
}

TEST(Buffer, CapacityIsTauTimesVolume) {
  EXPECT_DOUBLE_EQ(buffer_capacity({{"p"}, 8760.0, tau::daily}), 24.0);
  EXPECT_DOUBLE_EQ(buffer_capacity({{"p"}, 8760.0, tau::flexible}), 8760.0);
  EXPECT_NEAR(buffer_capacity({{"p"}, 50e6, tau::weekly}), 961.54e3, 5.0);
  EXPECT_THROW((void)buffer_capacity({{"p"}, 8760.0, 0.0}), std::invalid_argument);
  EXPECT_THROW((void)buffer_capacity({{"p"}, -1.0, 1.0}), std::invalid_argument);
  EXPECT_THROW((void)buffer_capacity({{}, 1.0, 1.0}), std::invalid_argument);
}

TEST(Tau, LabelsRoundTrip) {
  for (const char* name : {"flexible", "weekly", "daily", "stable"}) EXPECT_EQ(tau_label(parse_tau(name)), name);
  EXPECT_DOUBLE_EQ(parse_tau("0.5"), 0.5);
  EXPECT_EQ(tau_label(0.5), "0.5");
  EXPECT_DOUBLE_EQ(tau::weekly, 1.0 / 52.0);
  EXPECT_THROW((void)parse_tau("hourly"), std::invalid_argument);
  EXPECT_THROW((void)parse_tau("1.5"), std::invalid_argument);
}

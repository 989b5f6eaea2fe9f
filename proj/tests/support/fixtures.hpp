#pragma once

// Small hand-built systems shared by the unit tests.

#include <string>
#include <vector>

#include "flexport/model.hpp"

namespace fixtures {

using namespace flexport;

inline NetworkData empty_system(std::size_t snapshots, double weight = 1.0) {
  NetworkData d;
  d.name = "FIXTURE";
  d.snapshots.count = snapshots;
  d.snapshots.weight = weight;
  d.snapshots.month.assign(snapshots, 1);
  d.carriers = {{"electricity", 0.0, false}, {"hydrogen", 0.0, false}, {"solar", 0.0, true},
                {"gas", 0.2, false}};
  return d;
}

inline Generator generator(std::string id, std::string bus, std::string carrier, double p, double mc,
                           std::size_t snapshots) {
  Generator g;
  g.id = std::move(id);
  g.bus = std::move(bus);
  g.carrier = std::move(carrier);
  g.p_existing = p;
  g.marginal_cost = mc;
  g.availability.assign(snapshots, 1.0);
  return g;
}

inline Load load(std::string id, std::string bus, std::vector<double> profile) {
  Load l;
  l.id = std::move(id);
  l.bus = std::move(bus);
  l.profile = std::move(profile);
  l.sector = "electricity";
  return l;
}

inline Link link(std::string id, std::string from, std::string to, double eff, double p) {
  Link l;
  l.id = std::move(id);
  l.from_bus = std::move(from);
  l.to_bus = std::move(to);
  l.efficiency = eff;
  l.p_existing = p;
  return l;
}

/// One bus, one generator at `mc`, constant load.
inline NetworkData single_bus(std::size_t snapshots, double mc, double demand, double weight = 1.0) {
  NetworkData d = empty_system(snapshots, weight);
  d.buses = {{"el", "electricity", false}};
  d.generators = {generator("gen", "el", "electricity", 100.0, mc, snapshots)};
  d.loads = {load("demand", "el", std::vector<double>(snapshots, demand))};
  return d;
}

/// Electricity bus with an uncapacitated generator at `mc` feeding an
/// uncapacitated electrolyzer into a hydrogen export port.
inline NetworkData electrolysis_port(std::size_t snapshots, double mc, double efficiency = 0.68,
                                     double weight = 1.0) {
  NetworkData d = empty_system(snapshots, weight);
  d.buses = {{"el", "electricity", false}, {"h2", "hydrogen", true}};
  d.generators = {generator("gen", "el", "electricity", 1e5, mc, snapshots)};
  Link e = link("electrolyzer", "el", "h2", efficiency, kInf);
  e.electrolyzer = true;
  e.tech_class = "electrolysis";
  d.links = {e};
  return d;
}

/// Twelve monthly snapshots, one per month.
inline void monthly(NetworkData& d) {
  d.snapshots.count = 12;
  d.snapshots.month.resize(12);
  for (int m = 0; m < 12; ++m) d.snapshots.month[m] = m + 1;
}

}  // namespace fixtures

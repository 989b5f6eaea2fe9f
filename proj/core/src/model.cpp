#include "flexport/model.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace flexport {
namespace {

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

class Checker {
 public:
  explicit Checker(ValidationReport& report) : report_(report) {}

  void add(std::string component, std::string message) {
    report_.violations.push_back({std::move(component), std::move(message)});
  }

  void require(bool cond, const std::string& component, const std::string& message) {
    if (!cond) add(component, message);
  }

 private:
  ValidationReport& report_;
};

std::string label(std::string_view kind, std::string_view id) {
  return std::string(kind) + " '" + std::string(id) + "'";
}

}  // namespace

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (const auto& v : violations) os << v.component << ": " << v.message << '\n';
  return os.str();
}

ValidationError::ValidationError(ValidationReport report)
    : std::runtime_error("invalid network:\n" + report.to_string()), report_(std::move(report)) {}

ValidationReport validate_network(const NetworkData& net) {
  ValidationReport report;
  Checker check(report);

  std::unordered_map<std::string, const Carrier*> carriers;
  for (const auto& c : net.carriers) {
    const auto who = label("carrier", c.name);
    check.require(!c.name.empty(), who, "empty name");
    check.require(carriers.emplace(c.name, &c).second, who, "duplicate carrier name");
    check.require(finite_nonneg(c.co2_factor), who, "co2_factor must be finite and >= 0");
  }

  const auto& snaps = net.snapshots;
  const std::size_t T = snaps.count;
  check.require(T >= 1, "snapshots", "count must be >= 1");
  check.require(std::isfinite(snaps.weight) && snaps.weight > 0.0, "snapshots",
                "weight must be finite and > 0");
  check.require(snaps.horizon_hours() <= 8784.0 + 1e-9, "snapshots",
                "horizon exceeds one year");
  if (snaps.month.size() != T) {
    check.add("snapshots", "month index has " + std::to_string(snaps.month.size()) +
                               " entries, expected " + std::to_string(T));
  } else {
    for (std::size_t t = 0; t < T; ++t) {
      const int mo = snaps.month[t];
      if (mo < 1 || mo > 12) {
        check.add("snapshots", "month index out of 1..12 at snapshot " + std::to_string(t));
        break;
      }
      if (t > 0 && mo < snaps.month[t - 1]) {
        check.add("snapshots", "month index decreases at snapshot " + std::to_string(t));
        break;
      }
    }
  }

  std::unordered_map<std::string, const Bus*> buses;
  for (const auto& b : net.buses) {
    const auto who = label("bus", b.id);
    check.require(!b.id.empty(), who, "empty id");
    check.require(buses.emplace(b.id, &b).second, who, "duplicate bus id");
    if (!carriers.count(b.carrier))
      check.add(who, "dangling reference to carrier '" + b.carrier + "'");
    if (b.export_port)
      check.require(b.carrier == kHydrogen, who, "export port must be a hydrogen bus");
  }

  std::unordered_set<std::string> ids;
  auto unique_id = [&](const std::string& who, const std::string& id) {
    check.require(!id.empty(), who, "empty id");
    check.require(ids.insert(id).second, who, "duplicate component id");
  };
  auto bus_ref = [&](const std::string& who, const std::string& id) -> const Bus* {
    auto it = buses.find(id);
    if (it == buses.end()) {
      check.add(who, "dangling reference to bus '" + id + "'");
      return nullptr;
    }
    return it->second;
  };
  auto profile = [&](const std::string& who, const std::vector<double>& values,
                     std::string_view what, double lo, double hi) {
    if (values.size() != T) {
      check.add(who, std::string(what) + " profile has " + std::to_string(values.size()) +
                         " entries, expected " + std::to_string(T));
      return;
    }
    for (std::size_t t = 0; t < T; ++t) {
      if (!std::isfinite(values[t]) || values[t] < lo || values[t] > hi) {
        const std::string range = hi == 1.0 ? "[0,1]" : "[0,inf)";
        check.add(who, std::string(what) + " profile out of " + range + " at snapshot " +
                           std::to_string(t));
        return;
      }
    }
  };
  auto costs = [&](const std::string& who, double capex, double marginal) {
    check.require(finite_nonneg(capex), who, "capex_annual must be finite and >= 0");
    check.require(finite_nonneg(marginal), who, "marginal_cost must be finite and >= 0");
  };

  for (const auto& g : net.generators) {
    const auto who = label("generator", g.id);
    unique_id(who, g.id);
    bus_ref(who, g.bus);
    if (!carriers.count(g.carrier))
      check.add(who, "dangling reference to carrier '" + g.carrier + "'");
    check.require(finite_nonneg(g.p_existing), who, "p_existing must be finite and >= 0");
    check.require(!std::isnan(g.p_max_build) && g.p_max_build >= 0.0, who,
                  "p_max_build must be >= 0");
    check.require(std::isfinite(g.efficiency) && g.efficiency > 0.0 && g.efficiency <= 1.0, who,
                  "efficiency must lie in (0,1]");
    costs(who, g.capex_annual, g.marginal_cost);
    profile(who, g.availability, "availability", 0.0, 1.0);
  }

  for (const auto& l : net.links) {
    const auto who = label("link", l.id);
    unique_id(who, l.id);
    const Bus* from = bus_ref(who, l.from_bus);
    const Bus* to = bus_ref(who, l.to_bus);
    check.require(l.from_bus != l.to_bus, who, "from_bus and to_bus must differ");
    check.require(std::isfinite(l.efficiency) && l.efficiency > 0.0 && l.efficiency <= 1.0, who,
                  "efficiency must lie in (0,1]");
    check.require(!std::isnan(l.p_existing) && l.p_existing >= 0.0, who, "p_existing must be >= 0");
    check.require(!(l.extendable && std::isinf(l.p_existing)), who,
                  "extendable link needs finite p_existing");
    check.require(!std::isnan(l.p_max_build) && l.p_max_build >= 0.0, who,
                  "p_max_build must be >= 0");
    costs(who, l.capex_annual, l.marginal_cost);
    if (l.electrolyzer && from && to)
      check.require(from->carrier == kElectricity && to->carrier == kHydrogen, who,
                    "electrolyzer must convert electricity to hydrogen");
  }

  for (const auto& s : net.stores) {
    const auto who = label("store", s.id);
    unique_id(who, s.id);
    bus_ref(who, s.bus);
    check.require(finite_nonneg(s.e_existing), who, "e_existing must be finite and >= 0");
    check.require(!std::isnan(s.e_max_build) && s.e_max_build >= 0.0, who,
                  "e_max_build must be >= 0");
    costs(who, s.capex_annual, 0.0);
    if (s.fictional)
      check.require(s.capex_annual == 0.0 && !s.extendable, who,
                    "fictional store must be free and not extendable");
  }

  for (const auto& d : net.loads) {
    const auto who = label("load", d.id);
    unique_id(who, d.id);
    bus_ref(who, d.bus);
    profile(who, d.profile, "load", 0.0, kInf);
  }
  return report;
}

Network::Network(NetworkData data) : data_(std::move(data)) {
  ValidationReport report = validate_network(data_);
  if (!report.ok()) throw ValidationError(std::move(report));

  auto bus_idx = [this](const std::string& id) { return *find_bus(id); };
  for (const auto& b : data_.buses) bus_carrier_.push_back(*find_carrier(b.carrier));
  for (const auto& g : data_.generators) {
    gen_bus_.push_back(bus_idx(g.bus));
    gen_carrier_.push_back(*find_carrier(g.carrier));
  }
  for (const auto& l : data_.links) {
    link_from_.push_back(bus_idx(l.from_bus));
    link_to_.push_back(bus_idx(l.to_bus));
  }
  for (const auto& s : data_.stores) store_bus_.push_back(bus_idx(s.bus));
  for (const auto& d : data_.loads) load_bus_.push_back(bus_idx(d.bus));
}

const Carrier& Network::generator_carrier(std::size_t g) const {
  return data_.carriers[gen_carrier_[g]];
}

const Carrier& Network::bus_carrier(std::size_t b) const {
  return data_.carriers[bus_carrier_[b]];
}

namespace {
template <typename T, typename Key>
std::optional<std::size_t> find_by(const std::vector<T>& items, std::string_view id, Key key) {
  for (std::size_t i = 0; i < items.size(); ++i)
    if (key(items[i]) == id) return i;
  return std::nullopt;
}
}  // namespace

std::optional<std::size_t> Network::find_bus(std::string_view id) const {
  return find_by(data_.buses, id, [](const Bus& b) -> const std::string& { return b.id; });
}
std::optional<std::size_t> Network::find_generator(std::string_view id) const {
  return find_by(data_.generators, id, [](const Generator& g) -> const std::string& { return g.id; });
}
std::optional<std::size_t> Network::find_link(std::string_view id) const {
  return find_by(data_.links, id, [](const Link& l) -> const std::string& { return l.id; });
}
std::optional<std::size_t> Network::find_store(std::string_view id) const {
  return find_by(data_.stores, id, [](const Store& s) -> const std::string& { return s.id; });
}
std::optional<std::size_t> Network::find_carrier(std::string_view name) const {
  return find_by(data_.carriers, name, [](const Carrier& c) -> const std::string& { return c.name; });
}

double annuitize(double investment, double lifetime, double wacc, double fom) {
  if (!std::isfinite(investment) || !std::isfinite(lifetime) || !std::isfinite(wacc) ||
      !std::isfinite(fom))
    throw std::invalid_argument("annuitize: inputs must be finite");
  if (investment < 0.0) throw std::invalid_argument("annuitize: investment must be >= 0");
  if (lifetime < 1.0) throw std::invalid_argument("annuitize: lifetime must be >= 1 year");
  if (wacc < 0.0) throw std::invalid_argument("annuitize: wacc must be >= 0");
  if (fom < 0.0) throw std::invalid_argument("annuitize: fom must be >= 0");
  const double factor =
      wacc == 0.0 ? 1.0 / lifetime : wacc / -std::expm1(-lifetime * std::log1p(wacc));
  return investment * factor + investment * fom;
}

double parse_tau(std::string_view text) {
  if (text == "flexible") return tau::flexible;
  if (text == "weekly") return tau::weekly;
  if (text == "daily") return tau::daily;
  if (text == "stable") return tau::stable;
  double v = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw std::invalid_argument("unknown tau '" + std::string(text) + "'");
  if (!(v > 0.0 && v <= 1.0)) throw std::invalid_argument("tau must lie in (0,1]");
  return v;
}

std::string tau_label(double value) {
  if (value == tau::flexible) return "flexible";
  if (value == tau::weekly) return "weekly";
  if (value == tau::daily) return "daily";
  if (value == tau::stable) return "stable";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return buf;
}

void ExportSpec::check() const {
  if (!(tau > 0.0 && tau <= 1.0)) throw std::invalid_argument("export tau must lie in (0,1]");
  if (!(volume_q > 0.0) || !std::isfinite(volume_q))
    throw std::invalid_argument("export volume must be positive");
  if (ports.empty()) throw std::invalid_argument("export needs at least one port");
}

double buffer_capacity(const ExportSpec& spec) {
  spec.check();
  return spec.tau * spec.volume_q;
}

}  // namespace flexport

#include "flexport/system_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace flexport {
namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::stringstream ss;
  ss << file.rdbuf();
  return ss.str();
}

double scale_to_mw(const KvTable& t, std::string_view key, const std::string& unit) {
  if (unit == "EUR/kW" || unit == "EUR/kWh") return 1000.0;
  if (unit == "EUR/MW" || unit == "EUR/MWh") return 1.0;
  t.fail_at(key, "unsupported unit '" + unit + "'");
}

const TechnologyParams* technology_of(const KvTable& t, const TechnologyTable& techs) {
  if (!t.has("technology")) return nullptr;
  const std::string name = t.get_string("technology");
  auto it = techs.find(name);
  if (it == techs.end()) t.fail_at("technology", "unknown technology '" + name + "'");
  return &it->second;
}

// capex_annual key, else the technology's annualized cost, else zero.
double capex_of(const KvTable& t, const TechnologyParams* tech, double wacc) {
  if (t.has("capex_annual")) return t.get_number("capex_annual");
  if (!tech) return 0.0;
  try {
    return tech->capex_annual(wacc);
  } catch (const std::invalid_argument& e) {
    t.fail_at("technology", e.what());
  }
}

std::vector<double> profile_for(const KvTable& t, const std::string& kind, const std::string& id,
                                const ProfileTable* table, std::string_view constant_key, std::size_t T,
                                bool required) {
  const auto* column = table ? table->find(id) : nullptr;
  if (column && t.has(constant_key))
    t.fail_at(constant_key, kind + " '" + id + "' has both a profile column and '" + std::string(constant_key) + "'");
  if (column) {
    if (table->rows != T)
      throw std::runtime_error(table->source + ": profile of " + kind + " '" + id + "' has " +
                               std::to_string(table->rows) + " rows, expected " + std::to_string(T));
    return *column;
  }
  if (t.has(constant_key)) return std::vector<double>(T, t.get_number(constant_key));
  if (required)
    t.fail(kind + " '" + id + "' has no profile column and no '" + std::string(constant_key) + "'");
  return std::vector<double>(T, 1.0);
}

}  // namespace

double TechnologyParams::capex_annual(double scenario_wacc) const {
  return annuitize(investment, lifetime, wacc.value_or(scenario_wacc), fom_fraction) + fom_absolute;
}

TechnologyTable parse_technologies(const KvDocument& doc) {
  doc.reject_unknown_tables({}, {"technology"});
  doc.root().reject_unused();
  TechnologyTable out;
  for (const KvTable* t : doc.array("technology")) {
    TechnologyParams p;
    p.name = t->get_string("name");
    const double scale = scale_to_mw(*t, "investment_unit", t->get_string("investment_unit", "EUR/MW"));
    p.investment = t->get_number("investment", 0.0) * scale;
    p.lifetime = t->get_number("lifetime", 1.0);
    const double fom = t->get_number("fom", 0.0);
    const std::string fom_unit = t->get_string("fom_unit", "%/year");
    if (fom_unit == "%/year")
      p.fom_fraction = fom / 100.0;
    else if (fom_unit == "EUR/kW/year")
      p.fom_absolute = fom * 1000.0;
    else if (fom_unit == "EUR/MW/year")
      p.fom_absolute = fom;
    else
      t->fail_at("fom_unit", "unsupported unit '" + fom_unit + "'");
    p.vom = t->get_number("vom", 0.0);
    p.efficiency = t->get_number("efficiency", 1.0);
    if (t->has("wacc")) p.wacc = t->get_number("wacc");
    // Documented in the table but not used by the formulation.
    (void)t->has("efficiency_heat");
    (void)t->has("note");
    t->reject_unused();
    if (!(p.lifetime >= 1.0)) t->fail_at("lifetime", "lifetime must be >= 1");
    if (!out.emplace(p.name, p).second) t->fail_at("name", "duplicate technology '" + p.name + "'");
  }
  return out;
}

TechnologyTable load_technologies(const std::filesystem::path& path) {
  return parse_technologies(KvDocument::load(path));
}

const std::vector<double>* ProfileTable::find(std::string_view column) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == column) return &values[i];
  return nullptr;
}

ProfileTable parse_profile_csv(std::string_view text, const std::string& source) {
  ProfileTable table;
  table.source = source;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool header = true;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;

    std::vector<std::pair<std::string_view, std::size_t>> fields;  // text, column
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = line.find(',', start);
      const std::size_t stop = comma == std::string_view::npos ? line.size() : comma;
      std::string_view f = line.substr(start, stop - start);
      std::size_t col = start + 1;
      while (!f.empty() && f.front() == ' ') {
        f.remove_prefix(1);
        ++col;
      }
      while (!f.empty() && f.back() == ' ') f.remove_suffix(1);
      fields.emplace_back(f, col);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }

    if (header) {
      if (fields.size() < 1 || fields[0].first != "snapshot")
        throw ParseError(source, line_no, 1, "first header column must be 'snapshot'");
      for (std::size_t i = 1; i < fields.size(); ++i) {
        if (fields[i].first.empty()) throw ParseError(source, line_no, fields[i].second, "empty column name");
        for (const auto& c : table.columns)
          if (c == fields[i].first)
            throw ParseError(source, line_no, fields[i].second,
                             "duplicate column '" + std::string(fields[i].first) + "'");
        table.columns.emplace_back(fields[i].first);
      }
      table.values.resize(table.columns.size());
      header = false;
      continue;
    }
    if (fields.size() != table.columns.size() + 1)
      throw ParseError(source, line_no, 1,
                       "expected " + std::to_string(table.columns.size() + 1) + " fields, found " +
                           std::to_string(fields.size()));
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const auto [f, col] = fields[i];
      double v = 0.0;
      auto res = std::from_chars(f.data(), f.data() + f.size(), v);
      if (f.empty() || res.ec != std::errc() || res.ptr != f.data() + f.size())
        throw ParseError(source, line_no, col, "invalid number '" + std::string(f) + "'");
      if (i == 0) {
        if (v != static_cast<double>(table.rows))
          throw ParseError(source, line_no, col, "snapshot index must be " + std::to_string(table.rows));
      } else {
        table.values[i - 1].push_back(v);
      }
    }
    ++table.rows;
  }
  if (header) throw ParseError(source, 1, 1, "missing header");
  return table;
}

ProfileTable read_profile_csv(const std::filesystem::path& path) {
  return parse_profile_csv(read_file(path), path.string());
}

NetworkData load_system_data(const std::filesystem::path& system_file, const SystemOptions& options) {
  const KvDocument doc = KvDocument::load(system_file);
  doc.reject_unknown_tables({"system"}, {"carrier", "bus", "generator", "link", "store", "load"});
  doc.root().reject_unused();
  const KvTable* sys = doc.table("system");
  if (!sys) throw ParseError(doc.source(), 1, 1, "missing [system] table");

  const std::filesystem::path base = system_file.parent_path();
  const std::filesystem::path series = options.timeseries_dir.value_or(base);
  NetworkData net;
  net.name = sys->get_string("name", "system");
  const double file_wacc = sys->get_number("wacc", 0.0);
  const double wacc = options.wacc.value_or(file_wacc);
  if (!(wacc >= 0.0) || !std::isfinite(wacc)) {
    if (options.wacc) throw std::invalid_argument("wacc must be finite and >= 0");
    sys->fail_at("wacc", "wacc must be finite and >= 0");
  }
  TechnologyTable techs;
  if (sys->has("technologies")) techs = load_technologies(base / sys->get_string("technologies"));

  const ProfileTable snaps = read_profile_csv(series / sys->get_string("snapshots"));
  const auto* month = snaps.find("month");
  if (!month || snaps.columns.size() != 1)
    throw std::runtime_error(snaps.source + ": expected columns 'snapshot,month'");
  net.snapshots.count = snaps.rows;
  net.snapshots.weight = sys->get_number("weight", 1.0);
  for (double m : *month) net.snapshots.month.push_back(static_cast<int>(m));
  const std::size_t T = snaps.rows;

  std::optional<ProfileTable> avail, loads;
  if (sys->has("availability")) avail = read_profile_csv(series / sys->get_string("availability"));
  if (sys->has("loads")) loads = read_profile_csv(series / sys->get_string("loads"));
  sys->reject_unused();

  for (const KvTable* t : doc.array("carrier")) {
    Carrier c;
    c.name = t->get_string("name");
    c.co2_factor = t->get_number("co2_factor", 0.0);
    c.renewable = t->get_bool("renewable", false);
    t->reject_unused();
    net.carriers.push_back(std::move(c));
  }
  for (const KvTable* t : doc.array("bus")) {
    Bus b;
    b.id = t->get_string("id");
    b.carrier = t->get_string("carrier");
    b.export_port = t->get_bool("export_port", false);
    t->reject_unused();
    net.buses.push_back(std::move(b));
  }
  for (const KvTable* t : doc.array("generator")) {
    Generator g;
    const TechnologyParams* tech = technology_of(*t, techs);
    g.id = t->get_string("id");
    g.bus = t->get_string("bus");
    g.carrier = t->get_string("carrier");
    g.p_existing = t->get_number("p_existing", 0.0);
    g.extendable = t->get_bool("extendable", false);
    g.p_max_build = t->get_number("p_max_build", kInf);
    g.capex_annual = capex_of(*t, tech, wacc);
    g.efficiency = t->get_number("efficiency", tech ? tech->efficiency : 1.0);
    const double fuel = t->get_number("fuel_cost", 0.0);
    g.marginal_cost = t->get_number("marginal_cost", (tech ? tech->vom : 0.0) + fuel / g.efficiency);
    g.tech_class = t->get_string("tech_class", tech ? tech->name : g.carrier);
    g.availability = profile_for(*t, "generator", g.id, avail ? &*avail : nullptr, "availability", T, false);
    t->reject_unused();
    net.generators.push_back(std::move(g));
  }
  for (const KvTable* t : doc.array("link")) {
    Link l;
    const TechnologyParams* tech = technology_of(*t, techs);
    l.id = t->get_string("id");
    l.from_bus = t->get_string("from");
    l.to_bus = t->get_string("to");
    l.efficiency = t->get_number("efficiency", tech ? tech->efficiency : 1.0);
    l.p_existing = t->get_number("p_existing", 0.0);
    l.extendable = t->get_bool("extendable", false);
    l.p_max_build = t->get_number("p_max_build", kInf);
    l.capex_annual = capex_of(*t, tech, wacc);
    l.marginal_cost = t->get_number("marginal_cost", tech ? tech->vom : 0.0);
    l.electrolyzer = t->get_bool("electrolyzer", false);
    l.tech_class = t->get_string("tech_class", tech ? tech->name : "link");
    t->reject_unused();
    net.links.push_back(std::move(l));
  }
  for (const KvTable* t : doc.array("store")) {
    Store s;
    const TechnologyParams* tech = technology_of(*t, techs);
    s.id = t->get_string("id");
    s.bus = t->get_string("bus");
    s.e_existing = t->get_number("e_existing", 0.0);
    s.extendable = t->get_bool("extendable", false);
    s.e_max_build = t->get_number("e_max_build", kInf);
    s.capex_annual = capex_of(*t, tech, wacc);
    s.cyclic = t->get_bool("cyclic", true);
    s.tech_class = t->get_string("tech_class", tech ? tech->name : "store");
    t->reject_unused();
    net.stores.push_back(std::move(s));
  }
  for (const KvTable* t : doc.array("load")) {
    Load d;
    d.id = t->get_string("id");
    d.bus = t->get_string("bus");
    d.sector = t->get_string("sector", "");
    d.profile = profile_for(*t, "load", d.id, loads ? &*loads : nullptr, "p_set", T, true);
    t->reject_unused();
    net.loads.push_back(std::move(d));
  }

  auto check_columns = [&](const std::optional<ProfileTable>& table, const char* kind, auto&& known) {
    if (!table) return;
    for (const auto& c : table->columns)
      if (!known(c))
        throw std::runtime_error(table->source + ": column '" + c + "' matches no " + kind);
  };
  check_columns(avail, "generator", [&](const std::string& id) {
    for (const auto& g : net.generators)
      if (g.id == id) return true;
    return false;
  });
  check_columns(loads, "load", [&](const std::string& id) {
    for (const auto& d : net.loads)
      if (d.id == id) return true;
    return false;
  });
  return net;
}

Network load_system(const std::filesystem::path& system_file, const SystemOptions& options) {
  return Network(load_system_data(system_file, options));
}

}  // namespace flexport

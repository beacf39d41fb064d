#include "crudesched/instance_io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

namespace crudesched {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

class NameTable {
 public:
  NameTable(std::string kind, const std::vector<std::string>& names) : kind_(std::move(kind)) {
    for (Index i = 0; i < names.size(); ++i) {
      if (!index_.emplace(names[i], i).second) {
        throw ParseError(fmt::format("duplicate {} name '{}'", kind_, names[i]));
      }
    }
  }

  Index at(const std::string& name, const std::string& where) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw ParseError(fmt::format("{}: unknown {} '{}'", where, kind_, name));
    return it->second;
  }

 private:
  std::string kind_;
  std::map<std::string, Index> index_;
};

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) throw ParseError(fmt::format("{}: missing key '{}'", where, key));
  return obj.at(key);
}

template <typename T>
T get(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw ParseError(fmt::format("{}.{}: unexpected value type", where, key));
  }
}

Bounds get_bounds(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw ParseError(fmt::format("{}: expected a [lo, hi] number pair", where));
  }
  return Bounds{v[0].get<double>(), v[1].get<double>()};
}

std::vector<std::string> names_of(const json& arr, const std::string& where) {
  if (!arr.is_array()) throw ParseError(fmt::format("{}: expected an array", where));
  std::vector<std::string> out;
  for (Index i = 0; i < arr.size(); ++i) out.push_back(get<std::string>(arr[i], "name", fmt::format("{}[{}]", where, i)));
  return out;
}

std::vector<std::string> string_list(const json& arr, const std::string& where) {
  try {
    return arr.get<std::vector<std::string>>();
  } catch (const json::exception&) {
    throw ParseError(fmt::format("{}: expected an array of strings", where));
  }
}

Instance from_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("instance: top-level value must be an object");
  const int version = get<int>(doc, "format_version", "instance");
  if (version != kInstanceFormatVersion) {
    throw ParseError(fmt::format("instance.format_version: unsupported version {}", version));
  }

  Instance inst;
  inst.name = doc.value("name", std::string{});
  inst.horizon = get<Index>(doc, "horizon", "instance");
  inst.berth_count = get<Index>(doc, "berths", "instance");
  inst.changeover_cost = get<double>(doc, "omega", "instance");
  inst.property_names = string_list(require(doc, "properties", "instance"), "properties");
  inst.product_names = string_list(require(doc, "products", "instance"), "products");

  const NameTable products("product", inst.product_names);
  inst.residue_product = products.at(get<std::string>(doc, "residue_product", "instance"), "residue_product");

  const json& crudes = require(doc, "crudes", "instance");
  const json& tanks = require(doc, "tanks", "instance");
  const json& cdus = require(doc, "cdus", "instance");
  const json& residues = require(doc, "residues", "instance");
  const json vessels = doc.value("vessels", json::array());

  const NameTable crude_names("crude", names_of(crudes, "crudes"));
  const NameTable tank_names("tank", names_of(tanks, "tanks"));
  const NameTable cdu_names("cdu", names_of(cdus, "cdus"));
  const NameTable residue_names("residue", names_of(residues, "residues"));
  names_of(vessels, "vessels");

  for (Index c = 0; c < crudes.size(); ++c) {
    const std::string where = fmt::format("crudes[{}]", c);
    CrudeType crude;
    crude.name = get<std::string>(crudes[c], "name", where);
    crude.properties = get<std::vector<double>>(crudes[c], "properties", where);
    crude.yields = get<std::vector<std::vector<double>>>(crudes[c], "yields", where);
    inst.crudes.push_back(std::move(crude));
  }
  const Index C = inst.crudes.size();

  for (Index v = 0; v < vessels.size(); ++v) {
    const std::string where = fmt::format("vessels[{}]", v);
    Vessel vessel;
    vessel.name = get<std::string>(vessels[v], "name", where);
    const auto arrival = get<Index>(vessels[v], "arrival_period", where);
    if (arrival < 1) throw ParseError(where + ".arrival_period: periods are numbered from 1");
    vessel.arrival_period = arrival - 1;
    const json& cargo = require(vessels[v], "cargo", where);
    if (!cargo.is_array()) throw ParseError(where + ".cargo: expected an array of parcels");
    for (Index p = 0; p < cargo.size(); ++p) {
      const std::string pw = fmt::format("{}.cargo[{}]", where, p);
      vessel.cargo.push_back(
          Parcel{crude_names.at(get<std::string>(cargo[p], "crude", pw), pw), get<double>(cargo[p], "mass", pw)});
    }
    if (vessels[v].contains("unload_rate")) vessel.unload_rate = get<double>(vessels[v], "unload_rate", where);
    inst.vessels.push_back(std::move(vessel));
  }

  for (Index t = 0; t < tanks.size(); ++t) {
    const std::string where = fmt::format("tanks[{}]", t);
    Tank tank;
    tank.name = get<std::string>(tanks[t], "name", where);
    tank.capacity = get_bounds(require(tanks[t], "capacity", where), where + ".capacity");
    tank.initial.assign(C, 0.0);
    const json initial = tanks[t].value("initial", json::object());
    if (!initial.is_object()) throw ParseError(where + ".initial: expected an object of crude masses");
    for (const auto& [crude, mass] : initial.items()) {
      if (!mass.is_number()) throw ParseError(fmt::format("{}.initial.{}: expected a number", where, crude));
      tank.initial[crude_names.at(crude, where + ".initial")] += mass.get<double>();
    }
    inst.tanks.push_back(std::move(tank));
  }

  for (Index u = 0; u < cdus.size(); ++u) {
    const std::string where = fmt::format("cdus[{}]", u);
    CduSpec cdu;
    cdu.name = get<std::string>(cdus[u], "name", where);
    cdu.feed = get_bounds(require(cdus[u], "feed", where), where + ".feed");
    cdu.max_charging_tanks = get<Index>(cdus[u], "max_tanks", where);
    const json& pb = require(cdus[u], "property_bounds", where);
    if (!pb.is_array()) throw ParseError(where + ".property_bounds: expected an array");
    for (Index k = 0; k < pb.size(); ++k) cdu.property_bounds.push_back(get_bounds(pb[k], fmt::format("{}.property_bounds[{}]", where, k)));
    const json& ob = require(cdus[u], "product_bounds", where);
    if (!ob.is_array()) throw ParseError(where + ".product_bounds: expected an array");
    for (Index s = 0; s < ob.size(); ++s) cdu.product_bounds.push_back(get_bounds(ob[s], fmt::format("{}.product_bounds[{}]", where, s)));
    inst.cdus.push_back(std::move(cdu));
  }

  for (Index r = 0; r < residues.size(); ++r) {
    const std::string where = fmt::format("residues[{}]", r);
    ResidueSpec res;
    res.name = get<std::string>(residues[r], "name", where);
    for (const auto& c : string_list(require(residues[r], "crudes", where), where + ".crudes")) {
      res.allowed_crudes.push_back(crude_names.at(c, where + ".crudes"));
    }
    std::sort(res.allowed_crudes.begin(), res.allowed_crudes.end());
    res.allowed_crudes.erase(std::unique(res.allowed_crudes.begin(), res.allowed_crudes.end()), res.allowed_crudes.end());
    res.inventory = get_bounds(require(residues[r], "inventory", where), where + ".inventory");
    res.initial_inventory = get<double>(residues[r], "initial", where);
    const json& cons = require(residues[r], "consumption", where);
    if (cons.is_number()) {
      res.consumption.assign(inst.horizon, cons.get<double>());
    } else {
      res.consumption = get<std::vector<double>>(residues[r], "consumption", where);
    }
    inst.residues.push_back(std::move(res));
  }

  inst.initial_connections.resize(inst.cdus.size());
  if (doc.contains("initial_connections")) {
    const json& conns = doc.at("initial_connections");
    if (!conns.is_array()) throw ParseError("initial_connections: expected an array");
    for (Index i = 0; i < conns.size(); ++i) {
      const std::string where = fmt::format("initial_connections[{}]", i);
      const Index u = cdu_names.at(get<std::string>(conns[i], "cdu", where), where);
      InitialConnection conn;
      for (const auto& t : string_list(conns[i].value("tanks", json::array()), where + ".tanks")) {
        conn.tanks.push_back(tank_names.at(t, where + ".tanks"));
      }
      std::sort(conn.tanks.begin(), conn.tanks.end());
      conn.tanks.erase(std::unique(conn.tanks.begin(), conn.tanks.end()), conn.tanks.end());
      if (conns[i].contains("mode") && !conns[i].at("mode").is_null()) {
        conn.mode = residue_names.at(get<std::string>(conns[i], "mode", where), where + ".mode");
      }
      inst.initial_connections[u] = std::move(conn);
    }
  }

  finalize_instance(inst);
  return inst;
}

ordered_json bounds_json(const Bounds& b) { return ordered_json::array({b.lo, b.hi}); }

}  // namespace

Instance parse_instance(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(fmt::format("instance: syntax error: {}", e.what()));
  }
  return from_json(doc);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(fmt::format("cannot open '{}'", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  out << text;
}

Instance load_instance(const std::filesystem::path& path) { return parse_instance(read_text_file(path)); }

std::string instance_to_json(const Instance& inst) {
  ordered_json doc;
  doc["format_version"] = kInstanceFormatVersion;
  doc["name"] = inst.name;
  doc["horizon"] = inst.horizon;
  doc["berths"] = inst.berth_count;
  doc["omega"] = inst.changeover_cost;
  doc["properties"] = inst.property_names;
  doc["products"] = inst.product_names;
  doc["residue_product"] = inst.product_names.at(inst.residue_product);

  auto& crudes = doc["crudes"] = ordered_json::array();
  for (const auto& c : inst.crudes) {
    crudes.push_back(ordered_json{{"name", c.name}, {"properties", c.properties}, {"yields", c.yields}});
  }
  auto& vessels = doc["vessels"] = ordered_json::array();
  for (const auto& v : inst.vessels) {
    ordered_json vj{{"name", v.name}, {"arrival_period", v.arrival_period + 1}};
    auto& cargo = vj["cargo"] = ordered_json::array();
    for (const auto& p : v.cargo) cargo.push_back(ordered_json{{"crude", inst.crudes[p.crude].name}, {"mass", p.mass}});
    if (v.unload_rate < kUnlimited) vj["unload_rate"] = v.unload_rate;
    vessels.push_back(std::move(vj));
  }
  auto& tanks = doc["tanks"] = ordered_json::array();
  for (const auto& t : inst.tanks) {
    ordered_json initial = ordered_json::object();
    for (Index c = 0; c < t.initial.size(); ++c) {
      if (t.initial[c] > 0.0) initial[inst.crudes[c].name] = t.initial[c];
    }
    tanks.push_back(ordered_json{{"name", t.name}, {"capacity", bounds_json(t.capacity)}, {"initial", initial}});
  }
  auto& cdus = doc["cdus"] = ordered_json::array();
  for (const auto& u : inst.cdus) {
    ordered_json pb = ordered_json::array();
    for (const auto& b : u.property_bounds) pb.push_back(bounds_json(b));
    ordered_json ob = ordered_json::array();
    for (const auto& b : u.product_bounds) ob.push_back(bounds_json(b));
    cdus.push_back(ordered_json{{"name", u.name},
                                {"feed", bounds_json(u.feed)},
                                {"max_tanks", u.max_charging_tanks},
                                {"property_bounds", pb},
                                {"product_bounds", ob}});
  }
  auto& residues = doc["residues"] = ordered_json::array();
  for (const auto& r : inst.residues) {
    std::vector<std::string> names;
    for (Index c : r.allowed_crudes) names.push_back(inst.crudes[c].name);
    residues.push_back(ordered_json{{"name", r.name},
                                    {"crudes", names},
                                    {"inventory", bounds_json(r.inventory)},
                                    {"initial", r.initial_inventory},
                                    {"consumption", r.consumption}});
  }
  ordered_json conns = ordered_json::array();
  for (Index u = 0; u < inst.initial_connections.size(); ++u) {
    const auto& conn = inst.initial_connections[u];
    if (!conn) continue;
    std::vector<std::string> names;
    for (Index t : conn->tanks) names.push_back(inst.tanks[t].name);
    ordered_json cj{{"cdu", inst.cdus[u].name}, {"tanks", names}};
    if (conn->mode) cj["mode"] = inst.residues[*conn->mode].name;
    conns.push_back(std::move(cj));
  }
  if (!conns.empty()) doc["initial_connections"] = conns;
  return doc.dump(2) + "\n";
}

void save_instance(const Instance& instance, const std::filesystem::path& path) {
  write_text_file(path, instance_to_json(instance));
}

namespace {

std::vector<std::string> entity_names(const auto& items) {
  std::vector<std::string> out;
  for (const auto& x : items) out.push_back(x.name);
  return out;
}

ReceiveDecision tank_amount(const json& j, const NameTable& tanks, const std::string& where) {
  return {tanks.at(get<std::string>(j, "tank", where), where), get<double>(j, "amount", where)};
}

}  // namespace

Schedule parse_schedule(const std::string& text, const Instance& instance) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(fmt::format("schedule: syntax error: {}", e.what()));
  }
  const NameTable vessels("vessel", entity_names(instance.vessels));
  const NameTable tanks("tank", entity_names(instance.tanks));
  const NameTable cdus("cdu", entity_names(instance.cdus));
  const json& periods = require(doc, "periods", "schedule");
  if (!periods.is_array() || periods.size() != instance.horizon) {
    throw ParseError(fmt::format("schedule.periods: expected an array of {} periods", instance.horizon));
  }
  Schedule schedule(instance.horizon);
  for (Index n = 0; n < periods.size(); ++n) {
    const std::string where = fmt::format("schedule.periods[{}]", n);
    PeriodDecision& pd = schedule[n];
    pd.charging.resize(instance.cdu_count());
    const json& p = periods[n];
    if (p.contains("receive")) {
      for (Index i = 0; i < p["receive"].size(); ++i) {
        const json& r = p["receive"][i];
        const std::string rw = fmt::format("{}.receive[{}]", where, i);
        VesselDecision vd{vessels.at(get<std::string>(r, "vessel", rw), rw), {}};
        for (const json& t : require(r, "tanks", rw)) vd.tanks.push_back(tank_amount(t, tanks, rw));
        pd.receiving.push_back(std::move(vd));
      }
    }
    if (p.contains("charge")) {
      for (Index i = 0; i < p["charge"].size(); ++i) {
        const json& c = p["charge"][i];
        const std::string cw = fmt::format("{}.charge[{}]", where, i);
        const Index u = cdus.at(get<std::string>(c, "cdu", cw), cw);
        for (const json& t : require(c, "tanks", cw)) {
          const auto ta = tank_amount(t, tanks, cw);
          pd.charging[u].charges.push_back({ta.tank, ta.amount});
        }
      }
    }
  }
  return schedule;
}

Schedule load_schedule(const std::filesystem::path& path, const Instance& instance) {
  return parse_schedule(read_text_file(path), instance);
}

std::string schedule_to_json(const Schedule& schedule, const Instance& instance) {
  ordered_json periods = ordered_json::array();
  for (Index n = 0; n < schedule.size(); ++n) {
    ordered_json p{{"period", n + 1}};
    ordered_json receive = ordered_json::array();
    for (const auto& vd : schedule[n].receiving) {
      ordered_json ts = ordered_json::array();
      for (const auto& r : vd.tanks) ts.push_back(ordered_json{{"tank", instance.tanks[r.tank].name}, {"amount", r.amount}});
      receive.push_back(ordered_json{{"vessel", instance.vessels[vd.vessel].name}, {"tanks", ts}});
    }
    ordered_json charge = ordered_json::array();
    for (Index u = 0; u < schedule[n].charging.size(); ++u) {
      const auto& charges = schedule[n].charging[u].charges;
      if (charges.empty()) continue;
      ordered_json ts = ordered_json::array();
      for (const auto& c : charges) ts.push_back(ordered_json{{"tank", instance.tanks[c.tank].name}, {"amount", c.amount}});
      charge.push_back(ordered_json{{"cdu", instance.cdus[u].name}, {"tanks", ts}});
    }
    p["receive"] = receive;
    p["charge"] = charge;
    periods.push_back(std::move(p));
  }
  ordered_json doc{{"periods", periods}};
  return doc.dump(2) + "\n";
}

std::string schedule_to_csv(const Schedule& schedule, const Instance& instance) {
  std::string out = "period,action,unit,tank,amount\n";
  for (Index n = 0; n < schedule.size(); ++n) {
    for (const auto& vd : schedule[n].receiving) {
      for (const auto& r : vd.tanks) {
        out += fmt::format("{},receive,{},{},{}\n", n + 1, instance.vessels[vd.vessel].name, instance.tanks[r.tank].name,
                           r.amount);
      }
    }
    for (Index u = 0; u < schedule[n].charging.size(); ++u) {
      for (const auto& c : schedule[n].charging[u].charges) {
        out += fmt::format("{},charge,{},{},{}\n", n + 1, instance.cdus[u].name, instance.tanks[c.tank].name, c.amount);
      }
    }
  }
  return out;
}

}  // namespace crudesched

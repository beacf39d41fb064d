#include "crudesched/export.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>
#include <json.hpp>

#include "crudesched/instance_io.hpp"

namespace crudesched {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

void row(std::string& out, Index period, std::string_view kind, std::string_view entity, std::string_view key,
         double value) {
  out += fmt::format("{},{},{},{},{}\n", period, kind, entity, key, value);
}

void state_rows(std::string& out, const Instance& inst, Index period, const std::vector<double>& vessels,
                const std::vector<double>& tanks) {
  const Index C = inst.crude_count();
  for (Index v = 0; v < inst.vessel_count(); ++v) {
    double total = 0.0;
    for (Index c = 0; c < C; ++c) {
      total += vessels[v * C + c];
      if (vessels[v * C + c] > 0.0) row(out, period, "vessel", inst.vessels[v].name, inst.crudes[c].name, vessels[v * C + c]);
    }
    row(out, period, "vessel", inst.vessels[v].name, "total", total);
  }
  for (Index t = 0; t < inst.tank_count(); ++t) {
    double total = 0.0;
    for (Index c = 0; c < C; ++c) {
      total += tanks[t * C + c];
      if (tanks[t * C + c] > 0.0) row(out, period, "tank", inst.tanks[t].name, inst.crudes[c].name, tanks[t * C + c]);
    }
    row(out, period, "tank", inst.tanks[t].name, "total", total);
  }
}

ordered_json fitness_json(const Fitness& f) {
  return ordered_json{{"cvn", f.cvn}, {"cv", f.cv}, {"objective", f.objective}};
}

ordered_json stats_json(const AggregateStats& s) {
  ordered_json j{{"runs", s.runs}, {"feasible_runs", s.feasible_runs}, {"feasible_rate", s.feasible_rate}};
  j["mean"] = s.mean ? ordered_json(*s.mean) : ordered_json(nullptr);
  j["std"] = s.std_dev ? ordered_json(*s.std_dev) : ordered_json(nullptr);
  return j;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

}  // namespace

std::string trajectory_csv(const Instance& inst, const Trajectory& traj) {
  const Index C = inst.crude_count();
  const Index K = inst.property_count();
  const Index S = inst.product_count();
  const Index R = inst.residue_count();
  std::string out = "period,kind,entity,key,value\n";
  state_rows(out, inst, 0, traj.initial_vessel_inventory, traj.initial_tank_contents);
  for (Index r = 0; r < R; ++r) row(out, 0, "residue", inst.residues[r].name, "inventory", traj.initial_residue_inventory[r]);

  for (Index n = 0; n < traj.periods.size(); ++n) {
    const PeriodRecord& rec = traj.periods[n];
    const Index p = n + 1;
    for (const auto& f : rec.unloads) {
      row(out, p, "unload", fmt::format("{}>{}", inst.vessels[f.vessel].name, inst.tanks[f.tank].name),
          inst.crudes[f.crude].name, f.mass);
    }
    for (const auto& f : rec.charges) {
      const std::string entity = fmt::format("{}>{}", inst.tanks[f.tank].name, inst.cdus[f.cdu].name);
      for (Index c = 0; c < C; ++c) {
        if (f.by_crude[c] > 0.0) row(out, p, "charge", entity, inst.crudes[c].name, f.by_crude[c]);
      }
      row(out, p, "charge", entity, "total", f.total);
    }
    state_rows(out, inst, p, rec.vessel_inventory, rec.tank_contents);
    for (Index u = 0; u < inst.cdu_count(); ++u) {
      const std::string& name = inst.cdus[u].name;
      row(out, p, "cdu", name, "feed", rec.cdu_feed[u]);
      if (rec.cdu_feed[u] > 0.0) {
        for (Index k = 0; k < K; ++k) row(out, p, "cdu", name, inst.property_names[k], rec.feed_properties[u * K + k]);
      }
      for (Index s = 0; s < S; ++s) row(out, p, "cdu", name, inst.product_names[s], rec.product_outputs[u * S + s]);
      if (rec.residue_mode[u]) {
        out += fmt::format("{},mode,{},{},1\n", p, name, inst.residues[*rec.residue_mode[u]].name);
      }
      row(out, p, "changeover", name, "flag", rec.changeover[u] ? 1.0 : 0.0);
    }
    for (Index r = 0; r < R; ++r) row(out, p, "residue", inst.residues[r].name, "inventory", rec.residue_inventory[r]);
  }
  return out;
}

std::string trajectory_json(const Instance& inst, const Trajectory& traj) {
  const std::string csv = trajectory_csv(inst, traj);
  ordered_json rows = ordered_json::array();
  std::size_t pos = csv.find('\n') + 1;
  while (pos < csv.size()) {
    const std::size_t eol = csv.find('\n', pos);
    std::vector<std::string> f;
    std::size_t a = pos;
    for (int i = 0; i < 4; ++i) {
      const std::size_t b = csv.find(',', a);
      f.push_back(csv.substr(a, b - a));
      a = b + 1;
    }
    const double value = std::stod(csv.substr(a, eol - a));
    rows.push_back(ordered_json{{"period", std::stoul(f[0])}, {"kind", f[1]}, {"entity", f[2]}, {"key", f[3]}, {"value", value}});
    pos = eol + 1;
  }
  return ordered_json{{"rows", rows}}.dump(2) + "\n";
}

std::string trace_csv(const std::vector<TraceRow>& trace) {
  std::string out = "stage,generation,best_cvn,best_cv,best_objective,evaluations\n";
  for (const auto& r : trace) {
    out += fmt::format("{},{},{},{},{},{}\n", r.stage, r.point.generation, r.point.best.cvn, r.point.best.cv,
                       r.point.best.objective, r.point.evaluations);
  }
  return out;
}

std::string report_json(const Instance& inst, const RunReport& report, const Trajectory& traj) {
  ordered_json doc;
  doc["instance"] = inst.name;
  doc["variant"] = variant_name(report.variant);
  doc["seed"] = report.seed;
  doc["feasible"] = report.feasible();
  doc["fitness"] = fitness_json(report.fitness);
  doc["changeovers"] = traj.changeovers;
  doc["evaluations"] = ordered_json{{"global", report.global_evaluations}, {"local", report.local_evaluations}};
  doc["local_stage_ran"] = report.local_stage_ran;
  ordered_json viol = ordered_json::array();
  for (const auto& v : traj.violations) {
    viol.push_back(ordered_json{{"kind", constraint_name(v.kind)},
                                {"period", v.period + 1},
                                {"entity", v.entity},
                                {"detail", v.detail},
                                {"magnitude", v.magnitude},
                                {"normalized", v.normalized}});
  }
  doc["violations"] = viol;
  doc["genome"] = report.best;
  return doc.dump(2) + "\n";
}

GanttChart gantt_from_trajectory(const Instance& inst, const Trajectory& traj) {
  GanttChart chart;
  chart.periods = traj.periods.size();
  for (const auto& t : inst.tanks) chart.tanks.push_back(t.name);
  for (const auto& u : inst.cdus) chart.cdus.push_back(u.name);

  // Extends the last bar on the same row when it ends in the previous period.
  const auto add = [&](std::string row_name, std::string label, std::string kind, Index period, double mass) {
    for (auto it = chart.bars.rbegin(); it != chart.bars.rend(); ++it) {
      if (it->row == row_name && it->kind == kind && it->label == label && it->end + 1 == period) {
        it->end = period;
        it->mass += mass;
        return;
      }
    }
    chart.bars.push_back({std::move(row_name), std::move(label), std::move(kind), period, period, mass});
  };

  for (Index n = 0; n < traj.periods.size(); ++n) {
    const PeriodRecord& rec = traj.periods[n];
    const Index p = n + 1;
    std::map<std::pair<Index, Index>, double> received;
    for (const auto& f : rec.unloads) received[{f.tank, f.vessel}] += f.mass;
    for (const auto& [key, mass] : received) add(inst.tanks[key.first].name, inst.vessels[key.second].name, "receive", p, mass);
    for (const auto& f : rec.charges) {
      if (f.total > 0.0) add(inst.tanks[f.tank].name, inst.cdus[f.cdu].name, "charge", p, f.total);
    }
    for (Index u = 0; u < inst.cdu_count(); ++u) {
      if (rec.residue_mode[u]) add(inst.cdus[u].name, inst.residues[*rec.residue_mode[u]].name, "mode", p, rec.cdu_feed[u]);
      if (rec.changeover[u]) chart.changeovers.push_back({inst.cdus[u].name, p});
    }
  }
  return chart;
}

std::string gantt_to_json(const GanttChart& chart) {
  ordered_json doc;
  doc["periods"] = chart.periods;
  doc["tanks"] = chart.tanks;
  doc["cdus"] = chart.cdus;
  ordered_json bars = ordered_json::array();
  for (const auto& b : chart.bars) {
    bars.push_back(ordered_json{{"row", b.row},
                                {"label", b.label},
                                {"kind", b.kind},
                                {"start", b.start},
                                {"end", b.end},
                                {"mass", b.mass}});
  }
  doc["bars"] = bars;
  ordered_json marks = ordered_json::array();
  for (const auto& m : chart.changeovers) marks.push_back(ordered_json{{"cdu", m.cdu}, {"period", m.period}});
  doc["changeovers"] = marks;
  return doc.dump(2) + "\n";
}

GanttChart parse_gantt(const std::string& text) {
  GanttChart chart;
  try {
    const json doc = json::parse(text);
    chart.periods = doc.at("periods").get<Index>();
    chart.tanks = doc.at("tanks").get<std::vector<std::string>>();
    chart.cdus = doc.at("cdus").get<std::vector<std::string>>();
    for (const auto& b : doc.at("bars")) {
      GanttChart::Bar bar{b.at("row").get<std::string>(), b.at("label").get<std::string>(),
                          b.at("kind").get<std::string>(), b.at("start").get<Index>(),
                          b.at("end").get<Index>(),     b.at("mass").get<double>()};
      if (bar.start < 1 || bar.end < bar.start || bar.end > chart.periods) {
        throw ParseError(fmt::format("gantt: bar on row '{}' spans [{}, {}] outside 1..{}", bar.row, bar.start,
                                     bar.end, chart.periods));
      }
      chart.bars.push_back(std::move(bar));
    }
    for (const auto& m : doc.at("changeovers")) {
      chart.changeovers.push_back({m.at("cdu").get<std::string>(), m.at("period").get<Index>()});
    }
  } catch (const json::exception& e) {
    throw ParseError(fmt::format("gantt: {}", e.what()));
  }
  return chart;
}

std::string render_gantt_svg(const GanttChart& chart) {
  constexpr int kLeft = 90;
  constexpr int kTop = 30;
  constexpr int kCell = 70;
  constexpr int kRow = 26;
  static constexpr const char* kPalette[] = {"#4e79a7", "#f28e2b", "#59a14f", "#b07aa1", "#76b7b2", "#edc948"};

  std::vector<std::string> rows = chart.tanks;
  rows.insert(rows.end(), chart.cdus.begin(), chart.cdus.end());
  std::map<std::string, int> row_of;
  for (Index i = 0; i < rows.size(); ++i) row_of.emplace(rows[i], static_cast<int>(i));
  std::map<std::string, int> cdu_color;
  for (Index i = 0; i < chart.cdus.size(); ++i) cdu_color.emplace(chart.cdus[i], static_cast<int>(i % 6));

  const int width = kLeft + static_cast<int>(chart.periods) * kCell + 20;
  const int height = kTop + static_cast<int>(rows.size()) * kRow + 20;
  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\" "
      "font-family=\"sans-serif\" font-size=\"11\">\n",
      width, height, width, height);
  out += fmt::format("<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>\n", width, height);

  // Axes: period columns and row labels.
  for (Index n = 0; n <= chart.periods; ++n) {
    const int x = kLeft + static_cast<int>(n) * kCell;
    out += fmt::format("<line class=\"grid\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#ccc\"/>\n", x, kTop, x,
                       kTop + static_cast<int>(rows.size()) * kRow);
    if (n < chart.periods) {
      out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">P{}</text>\n", x + kCell / 2, kTop - 8, n + 1);
    }
  }
  for (Index i = 0; i < rows.size(); ++i) {
    const int y = kTop + static_cast<int>(i) * kRow;
    out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n", kLeft - 6, y + kRow / 2 + 4,
                       xml_escape(rows[i]));
    out += fmt::format("<line class=\"grid\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#eee\"/>\n", kLeft,
                       y + kRow, width - 20, y + kRow);
  }

  for (const auto& b : chart.bars) {
    const auto it = row_of.find(b.row);
    if (it == row_of.end() || b.start < 1) continue;
    const int x = kLeft + static_cast<int>(b.start - 1) * kCell + 2;
    const int w = static_cast<int>(b.end - b.start + 1) * kCell - 4;
    const int y = kTop + it->second * kRow + 4;
    std::string fill = "#999";
    if (b.kind == "receive") {
      fill = "#e15759";
    } else if (auto c = cdu_color.find(b.label); b.kind == "charge" && c != cdu_color.end()) {
      fill = kPalette[c->second];
    } else if (b.kind == "mode") {
      fill = "#bab0ac";
    }
    out += fmt::format("<rect class=\"{}\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>\n",
                       xml_escape(b.kind), x, y, w, kRow - 8, fill);
    out += fmt::format("<text x=\"{}\" y=\"{}\" fill=\"white\">{} {}</text>\n", x + 4, y + kRow / 2 + 1,
                       xml_escape(b.label), fmt::format("{:.4g}", b.mass));
  }

  for (const auto& m : chart.changeovers) {
    const auto it = row_of.find(m.cdu);
    if (it == row_of.end() || m.period < 1) continue;
    const int x = kLeft + static_cast<int>(m.period - 1) * kCell;
    const int y = kTop + it->second * kRow;
    out += fmt::format(
        "<path class=\"changeover\" d=\"M {} {} L {} {} L {} {} Z\" fill=\"black\"><title>{} P{}</title></path>\n",
        x - 5, y + 1, x + 5, y + 1, x, y + 9, xml_escape(m.cdu), m.period);
  }
  out += "</svg>\n";
  return out;
}

std::string bench_table_csv(const std::vector<BenchRow>& rows) {
  std::string out = "variant,runs,feasible_runs,fr,mean,std\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{},{}\n", r.variant, r.stats.runs, r.stats.feasible_runs, r.stats.feasible_rate,
                       r.stats.mean ? fmt::format("{}", *r.stats.mean) : std::string(),
                       r.stats.std_dev ? fmt::format("{}", *r.stats.std_dev) : std::string());
  }
  return out;
}

std::string bench_table_json(const std::vector<BenchRow>& rows, const std::vector<RunReport>& runs) {
  ordered_json doc;
  ordered_json summary = ordered_json::array();
  for (const auto& r : rows) {
    ordered_json j{{"variant", r.variant}};
    j.update(stats_json(r.stats));
    summary.push_back(std::move(j));
  }
  doc["summary"] = summary;
  ordered_json list = ordered_json::array();
  for (const auto& r : runs) {
    list.push_back(ordered_json{{"variant", variant_name(r.variant)},
                                {"seed", r.seed},
                                {"feasible", r.feasible()},
                                {"fitness", fitness_json(r.fitness)}});
  }
  doc["runs"] = list;
  return doc.dump(2) + "\n";
}

}  // namespace crudesched

#include "handreq/report.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <json.hpp>
#include <set>

#include "handreq/error.hpp"

namespace handreq {
namespace {

using nlohmann::json;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  return s.substr(first, s.find_last_not_of(" \t\r\n") - first + 1);
}

// Splits one CSV record; double-quoted cells may contain commas and "" escapes.
std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        out.back() += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.emplace_back();
    } else {
      out.back() += ch;
    }
  }
  for (auto& cell : out) cell = std::string(trim(cell));
  return out;
}

std::string quote(const std::string& cell) {
  if (cell.find_first_of(",\"") == std::string::npos) return cell;
  std::string out = "\"";
  for (char ch : cell) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return out + "\"";
}

json parse_json(std::string_view text, std::string_view what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("{} is not valid JSON: {}", what, e.what()));
  }
}

void absorb(JointSummaries& into, const TaskResult& r) {
  for (std::size_t j = 0; j < 3; ++j) {
    into[j].max_torque = std::max(into[j].max_torque, r.joints[j].peak_torque);
    into[j].max_bandwidth_hz = std::max(into[j].max_bandwidth_hz, r.joints[j].bandwidth_hz);
    ++into[j].tasks;
  }
}

std::string size_label(const TaskResult& r) {
  return r.handle_size == HandleSize::Custom ? format_number(r.radius) : std::string(to_string(r.handle_size));
}

}  // namespace

std::string_view to_string(Direction d) { return d == Direction::AtLeast ? ">=" : "<="; }

Direction parse_direction(std::string_view s) {
  if (s == ">=" || s == "at_least") return Direction::AtLeast;
  if (s == "<=" || s == "at_most") return Direction::AtMost;
  throw ConfigError(fmt::format("unknown comparison direction '{}'", s));
}

void RequirementsProfile::validate() const {
  std::set<std::string_view> seen;
  for (const auto& r : requirements)
    if (!seen.insert(r.metric).second) throw ConfigError(fmt::format("duplicate metric '{}' in profile", r.metric));
}

int DesignReport::passes() const {
  return static_cast<int>(std::count_if(metrics.begin(), metrics.end(), [](const auto& m) { return m.pass; }));
}

int DesignReport::failures() const { return static_cast<int>(metrics.size()) - passes(); }

DesignReport compare(const RequirementsProfile& profile, const Measurements& achieved) {
  profile.validate();
  DesignReport report;
  for (const auto& req : profile.requirements) {
    const auto it = achieved.find(req.metric);
    if (it == achieved.end()) throw ConfigError(fmt::format("no achieved value for metric '{}'", req.metric));
    const double v = it->second.value;
    const bool pass = req.direction == Direction::AtLeast ? v >= req.desired : v <= req.desired;
    report.metrics.push_back({req, it->second, pass});
  }
  return report;
}

RequirementsProfile parse_profile(std::string_view text) {
  const json doc = parse_json(text, "requirements profile");
  RequirementsProfile profile;
  try {
    profile.name = doc.value("name", std::string{});
    for (const auto& rec : doc.at("requirements")) {
      Requirement r;
      r.metric = rec.at("metric").get<std::string>();
      r.label = rec.value("label", r.metric);
      r.desired = rec.at("desired").get<double>();
      r.unit = rec.value("unit", std::string{});
      r.direction = parse_direction(rec.at("direction").get<std::string>());
      r.note = rec.value("note", std::string{});
      if (rec.contains("derive")) {
        const auto& d = rec.at("derive");
        const auto q = d.at("quantity").get<std::string>();
        if (q == "peak_torque")
          r.quantity = DerivedQuantity::PeakTorque;
        else if (q == "bandwidth")
          r.quantity = DerivedQuantity::Bandwidth;
        else
          throw ConfigError(fmt::format("metric '{}': unknown derived quantity '{}'", r.metric, q));
        r.joint = parse_joint(d.at("joint").get<std::string>());
      }
      profile.requirements.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("malformed requirements profile: {}", e.what()));
  }
  profile.validate();
  return profile;
}

RequirementsProfile load_profile(const std::filesystem::path& path) { return parse_profile(read_file(path)); }

Measurements parse_measurements(std::string_view text) {
  const json doc = parse_json(text, "measurement file");
  Measurements out;
  try {
    const auto& values = doc.contains("achieved") ? doc.at("achieved") : doc;
    for (const auto& [key, val] : values.items()) {
      Measurement m;
      if (val.is_number()) {
        m.value = val.get<double>();
      } else {
        m.value = val.at("value").get<double>();
        m.uncertainty = val.value("uncertainty", 0.0);
      }
      out.emplace(key, m);
    }
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("malformed measurement file: {}", e.what()));
  }
  return out;
}

Measurements load_measurements(const std::filesystem::path& path) { return parse_measurements(read_file(path)); }

std::string report_csv(const DesignReport& report) {
  std::string out = "metric,desired,achieved,unit,direction,pass\n";
  for (const auto& m : report.metrics)
    out += fmt::format("{},{},{},{},{},{}\n", m.requirement.metric, format_number(m.requirement.desired),
                       format_number(m.achieved.value), m.requirement.unit, to_string(m.requirement.direction),
                       m.pass ? "pass" : "fail");
  return out;
}

std::string report_table(const DesignReport& report) {
  std::size_t width = std::string_view("Functional requirement").size();
  std::vector<std::string> labels;
  for (const auto& m : report.metrics) {
    auto label = m.requirement.label;
    if (!m.requirement.unit.empty()) label += fmt::format(" ({})", m.requirement.unit);
    if (!m.requirement.note.empty()) label += " " + m.requirement.note;
    width = std::max(width, label.size());
    labels.push_back(std::move(label));
  }
  std::string out = fmt::format("{:<{}}  {:>10}  {:>16}  {}\n", "Functional requirement", width, "Desired", "Achieved",
                                "Pass");
  for (std::size_t i = 0; i < report.metrics.size(); ++i) {
    const auto& m = report.metrics[i];
    auto achieved = format_number(m.achieved.value);
    if (m.achieved.uncertainty > 0.0) achieved += " +/- " + format_number(m.achieved.uncertainty);
    out += fmt::format("{:<{}}  {:>7} {}  {:>16}  {}\n", labels[i], width, format_number(m.requirement.desired),
                       to_string(m.requirement.direction), achieved, m.pass ? "yes" : "NO");
  }
  out += fmt::format("{} passed, {} failed\n", report.passes(), report.failures());
  return out;
}

SuiteSummary summarize_tasks(std::span<const TaskResult> results) {
  if (results.empty()) throw ConfigError("cannot summarize an empty task list");
  SuiteSummary s;
  for (const auto& r : results) {
    absorb(s.overall, r);
    absorb(s.by_size[r.handle_size], r);
    absorb(s.by_palm[r.palm], r);
    s.infeasible_steps += r.infeasible_steps;
  }
  s.tasks = results.size();
  return s;
}

RequirementsProfile derive_profile(const RequirementsProfile& profile, const SuiteSummary& summary) {
  RequirementsProfile out = profile;
  for (auto& r : out.requirements) {
    const auto& j = summary.overall[static_cast<std::size_t>(r.joint)];
    if (r.quantity == DerivedQuantity::PeakTorque) r.desired = j.max_torque;
    if (r.quantity == DerivedQuantity::Bandwidth) r.desired = j.max_bandwidth_hz;
  }
  return out;
}

std::string suite_csv(std::span<const TaskResult> results, std::string_view comment) {
  std::vector<const TaskResult*> order;
  for (const auto& r : results) order.push_back(&r);
  std::stable_sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->name < b->name; });
  std::string out;
  if (!comment.empty()) out += fmt::format("# {}\n", comment);
  out += "task,joint,peak_torque_Nm,bandwidth_Hz,handle_size,palm,infeasible_steps\n";
  for (const auto* r : order) {
    for (auto j : kJoints) {
      const auto& o = r->joints[static_cast<std::size_t>(j)];
      out += fmt::format("{},{},{},{},{},{},{}\n", quote(r->name), to_string(j), format_number(o.peak_torque),
                         o.bandwidth_passed ? format_number(o.bandwidth_hz) : std::string("none"), size_label(*r),
                         r->palm ? 1 : 0, r->infeasible_steps);
    }
  }
  return out;
}

std::vector<TaskResult> parse_suite_csv(std::string_view text, const std::string& source) {
  std::vector<TaskResult> out;
  bool have_header = false;
  std::size_t line_no = 0;
  auto number = [&](std::string_view cell, std::string_view column) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc{} || ptr != cell.data() + cell.size())
      throw ParseError(fmt::format("{}:{}: column '{}' has non-numeric value '{}'", source, line_no, column, cell),
                       line_no, std::string(column));
    return v;
  };
  const std::vector<std::string> expected = {"task",       "joint", "peak_torque_Nm",  "bandwidth_Hz",
                                                  "handle_size", "palm",  "infeasible_steps"};
  for (std::size_t pos = 0; pos < text.size();) {
    const auto end = text.find('\n', pos);
    const auto line = trim(text.substr(pos, end == std::string_view::npos ? end : end - pos));
    pos = end == std::string_view::npos ? text.size() : end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto cells = split(line);
    if (!have_header) {
      if (cells != expected) throw ParseError(fmt::format("{}: unexpected suite CSV header", source), line_no, "");
      have_header = true;
      continue;
    }
    if (cells.size() != expected.size())
      throw ParseError(fmt::format("{}:{}: expected {} cells", source, line_no, expected.size()), line_no, "");
    if (out.empty() || out.back().name != cells[0]) {
      TaskResult r;
      r.name = cells[0];
      const std::string& size = cells[4];
      if (!size.empty() && (std::isdigit(static_cast<unsigned char>(size[0])) || size[0] == '.')) {
        r.handle_size = HandleSize::Custom;
        r.radius = number(cells[4], "handle_size");
      } else {
        r.handle_size = parse_handle_size(size);
        r.radius = handle_radius(r.handle_size);
      }
      r.palm = cells[5] == "1";
      r.infeasible_steps = static_cast<std::size_t>(number(cells[6], "infeasible_steps"));
      out.push_back(std::move(r));
    }
    auto& o = out.back().joints[static_cast<std::size_t>(parse_joint(cells[1]))];
    o.peak_torque = number(cells[2], "peak_torque_Nm");
    o.bandwidth_passed = cells[3] != "none";
    o.bandwidth_hz = o.bandwidth_passed ? number(cells[3], "bandwidth_Hz") : 0.0;
  }
  if (!have_header) throw ParseError(fmt::format("{}: no header line", source), 0, "");
  return out;
}

std::string summary_table(const SuiteSummary& s) {
  std::string out = fmt::format("{} tasks, {} infeasible timesteps\n", s.tasks, s.infeasible_steps);
  auto rows = [&](std::string_view group, const JointSummaries& js) {
    for (auto j : kJoints) {
      const auto& v = js[static_cast<std::size_t>(j)];
      out += fmt::format("{:<10} {:<6} {:>10.4f} {:>10.2f}\n", group, to_string(j), v.max_torque, v.max_bandwidth_hz);
    }
  };
  out += fmt::format("{:<10} {:<6} {:>10} {:>10}\n", "group", "joint", "torque_Nm", "bw_Hz");
  rows("all", s.overall);
  for (const auto& [size, js] : s.by_size) rows(to_string(size), js);
  for (const auto& [palm, js] : s.by_palm) rows(palm ? "palm" : "no-palm", js);
  return out;
}

}  // namespace handreq

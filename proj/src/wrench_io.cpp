#include "handreq/wrench_io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "handreq/error.hpp"

namespace handreq {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<double> parse_double(std::string_view cell) {
  if (cell.empty()) return std::nullopt;
  if (cell.front() == '+') cell.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc{} || ptr != cell.data() + cell.size()) return std::nullopt;
  return v;
}

constexpr std::array<std::string_view, 7> kWrenchColumns = {"t", "Fx", "Fy", "Fz", "Tx", "Ty", "Tz"};

}  // namespace

std::string_view to_string(HandleSize s) {
  switch (s) {
    case HandleSize::Small: return "small";
    case HandleSize::Medium: return "medium";
    case HandleSize::Large: return "large";
    case HandleSize::Custom: return "custom";
  }
  return "custom";
}

std::string_view to_string(GraspType g) {
  switch (g) {
    case GraspType::MPinch: return "M-Pinch";
    case GraspType::LPinch: return "L-Pinch";
    case GraspType::Tripod1: return "Tripod1";
    case GraspType::Tripod2: return "Tripod2";
    case GraspType::Tripod3: return "Tripod3";
  }
  return "?";
}

HandleSize parse_handle_size(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "small") return HandleSize::Small;
  if (lower == "medium") return HandleSize::Medium;
  if (lower == "large") return HandleSize::Large;
  throw ConfigError(fmt::format("unknown handle size '{}'", s));
}

GraspType parse_grasp_type(std::string_view s) {
  for (auto g : {GraspType::MPinch, GraspType::LPinch, GraspType::Tripod1, GraspType::Tripod2, GraspType::Tripod3})
    if (to_string(g) == s) return g;
  throw ConfigError(fmt::format("unknown grasp '{}'", s));
}

double handle_radius(HandleSize s) {
  switch (s) {
    case HandleSize::Small: return 0.008;
    case HandleSize::Medium: return 0.015;
    case HandleSize::Large: return 0.022;
    case HandleSize::Custom: break;
  }
  throw ConfigError("custom handle size has no predefined radius");
}

const std::vector<double>& CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return columns[i];
  throw ParseError(fmt::format("missing column '{}'", name), 0, std::string(name));
}

CsvTable parse_csv(std::string_view text, const std::vector<std::string>& required, const std::string& source) {
  CsvTable table;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool have_header = false;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    std::string_view line = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto cells = split_commas(line);
    if (!have_header) {
      for (auto c : cells) table.header.emplace_back(c);
      for (const auto& name : required)
        if (std::find(table.header.begin(), table.header.end(), name) == table.header.end())
          throw ParseError(fmt::format("{}: missing column '{}'", source, name), line_no, name);
      table.columns.resize(table.header.size());
      have_header = true;
      continue;
    }
    if (cells.size() != table.header.size())
      throw ParseError(fmt::format("{}:{}: expected {} cells, found {}", source, line_no, table.header.size(),
                                   cells.size()),
                       line_no, "");
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto v = parse_double(cells[c]);
      if (!v || !std::isfinite(*v))
        throw ParseError(fmt::format("{}:{}: column '{}' has non-numeric value '{}'", source, line_no,
                                     table.header[c], cells[c]),
                         line_no, table.header[c]);
      table.columns[c].push_back(*v);
    }
    table.line_numbers.push_back(line_no);
  }
  if (!have_header) throw ParseError(fmt::format("{}: no header line", source), 0, "");
  return table;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError(fmt::format("cannot write '{}'", tmp.string()));
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw ConfigError(fmt::format("short write to '{}'", tmp.string()));
  }
  std::filesystem::rename(tmp, path);
}

CsvTable read_csv(const std::filesystem::path& path, const std::vector<std::string>& required) {
  return parse_csv(read_file(path), required, path.string());
}

double uniform_sample_rate(const CsvTable& table, std::string_view time_column) {
  const auto& t = table.column(time_column);
  const auto line = [&](std::size_t k) { return table.line_numbers.at(k); };
  if (t.size() < 2) throw ParseError("trajectory needs at least 2 samples", t.empty() ? 0 : line(0), "t");
  for (std::size_t k = 1; k < t.size(); ++k)
    if (!(t[k] > t[k - 1]))
      throw ParseError(fmt::format("row at line {}: time is not strictly increasing", line(k)), line(k),
                       std::string(time_column));
  const double dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
  for (std::size_t k = 0; k < t.size(); ++k)
    if (std::abs(t[k] - (t.front() + static_cast<double>(k) * dt)) > 1e-9)
      throw ParseError(fmt::format("row at line {}: sampling is not uniform", line(k)), line(k),
                       std::string(time_column));
  return 1.0 / dt;
}

WrenchTrajectory parse_trajectory(std::string_view text, const std::string& source) {
  const std::vector<std::string> required(kWrenchColumns.begin(), kWrenchColumns.end());
  const auto table = parse_csv(text, required, source);
  WrenchTrajectory traj;
  traj.sample_rate = uniform_sample_rate(table);
  traj.start_time = table.column("t").front();
  const auto& fx = table.column("Fx");
  const auto& fy = table.column("Fy");
  const auto& fz = table.column("Fz");
  const auto& tx = table.column("Tx");
  const auto& ty = table.column("Ty");
  const auto& tz = table.column("Tz");
  traj.samples.reserve(table.rows());
  for (std::size_t k = 0; k < table.rows(); ++k)
    traj.samples.push_back(Wrench::from(fx[k], fy[k], fz[k], tx[k], ty[k], tz[k]));
  return traj;
}

WrenchTrajectory load_trajectory(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ConfigError(fmt::format("trajectory file '{}' not found", path.string()));
  return parse_trajectory(read_file(path), path.string());
}

std::string format_number(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

std::string format_trajectory(const WrenchTrajectory& traj, std::string_view comment) {
  std::string out;
  if (!comment.empty()) out += fmt::format("# {}\n", comment);
  out += "t,Fx,Fy,Fz,Tx,Ty,Tz\n";
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const auto& w = traj.samples[k];
    out += fmt::format("{},{},{},{},{},{},{}\n", format_number(traj.time(k)), format_number(w.force.x()),
                       format_number(w.force.y()), format_number(w.force.z()), format_number(w.torque.x()),
                       format_number(w.torque.y()), format_number(w.torque.z()));
  }
  return out;
}

void save_trajectory(const WrenchTrajectory& traj, const std::filesystem::path& path, std::string_view comment) {
  write_file_atomic(path, format_trajectory(traj, comment));
}

TaskSuite parse_task_suite(std::string_view text, const std::filesystem::path& base_dir) {
  TaskSuite suite;
  if (trim(text).empty()) {
    suite.warnings.emplace_back("task suite is empty");
    return suite;
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(fmt::format("task suite is not valid JSON: {}", e.what()));
  }
  const auto& list = doc.is_object() ? doc.value("tasks", nlohmann::json::array()) : doc;
  if (!list.is_array()) throw ConfigError("task suite must be a list of task records");
  if (list.empty()) suite.warnings.emplace_back("task suite is empty");
  for (const auto& rec : list) {
    try {
      TaskConfig task;
      task.name = rec.at("name").get<std::string>();
      const auto& size = rec.at("handle_size");
      if (size.is_number()) {
        task.handle_size = HandleSize::Custom;
        task.radius = size.get<double>();
        if (!(task.radius > 0.0)) throw ConfigError(fmt::format("task '{}': radius must be positive", task.name));
      } else {
        task.handle_size = parse_handle_size(size.get<std::string>());
        task.radius = handle_radius(task.handle_size);
      }
      task.grasp = parse_grasp_type(rec.at("grasp").get<std::string>());
      task.palm = rec.at("palm").get<bool>();
      task.friction_mu = rec.value("mu", 0.6);
      if (!(task.friction_mu > 0.0 && task.friction_mu <= 2.5))
        throw ConfigError(fmt::format("task '{}': mu must lie in (0, 2.5]", task.name));
      const std::filesystem::path traj = rec.value("trajectory", std::string{});
      task.trajectory_path = traj.empty() || traj.is_absolute() ? traj : base_dir / traj;
      suite.tasks.push_back(std::move(task));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(fmt::format("malformed task record {}: {}", rec.dump(), e.what()));
    }
  }
  return suite;
}

TaskSuite load_task_suite(const std::filesystem::path& path) {
  return parse_task_suite(read_file(path), path.parent_path());
}

}  // namespace handreq

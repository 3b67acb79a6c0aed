#include "handreq/synthetic.hpp"

#include <fmt/format.h>

#include <cmath>
#include <json.hpp>
#include <numbers>
#include <random>

#include "handreq/error.hpp"

namespace handreq {
namespace {

struct TaskRow {
  const char* name;
  HandleSize size;
  GraspType grasp;
  bool palm;
};

using enum HandleSize;
using enum GraspType;

constexpr TaskRow kEverydayTasks[] = {
    {"stir with spatula", Large, LPinch, true},
    {"sprinkle, shake pepper", Medium, Tripod1, true},
    {"spread/oil", Small, MPinch, false},
    {"vertical cut", Large, LPinch, true},
    {"use spoon to pick up", Small, Tripod3, false},
    {"pizza wheel", Medium, Tripod2, true},
    {"use black brush", Medium, MPinch, true},
    {"spear object using fork", Small, LPinch, true},
    {"stir water using spoon", Small, MPinch, true},
    {"fasten screw with screwdriver", Medium, MPinch, true},
    {"loosen screw with screwdriver", Medium, MPinch, true},
    {"unlock lock with key", Small, Tripod1, false},
    {"fasten nut with wrench", Medium, LPinch, true},
    {"use paint brush to dip and spread", Medium, MPinch, true},
    {"use hammer to hammer in nail", Large, LPinch, true},
    {"brush teeth", Medium, MPinch, true},
    {"use file to file wooden thing", Medium, LPinch, true},
    {"comb hair", Medium, LPinch, true},
    {"scrape substance from surface", Large, LPinch, true},
    {"peel cucumber/potato", Medium, LPinch, true},
    {"slice cucumber", Medium, LPinch, true},
    {"flip bread", Medium, Tripod3, false},
    {"use spoon to scoop and pour", Medium, MPinch, true},
    {"shave object", Medium, LPinch, true},
    {"use roller to roll out dough", Large, MPinch, true},
    {"loosen nut with wrench", Medium, LPinch, true},
    {"scoop and pour with measuring spoon/cup", Medium, MPinch, true},
    {"insert peg into pegboard", Small, Tripod1, false},
    {"brush powder accross grey tray", Small, MPinch, true},
    {"insert straw through to-go cup lid", Small, MPinch, true},
};

Eigen::Vector3d random_direction(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::Vector3d v;
  do v = Eigen::Vector3d(g(rng), g(rng), g(rng));
  while (v.norm() < 1e-6);
  return v.normalized();
}

Wrench random_wrench(std::mt19937_64& rng, double force_lo, double force_hi, double torque_lo, double torque_hi) {
  std::uniform_real_distribution<double> f(force_lo, force_hi), t(torque_lo, torque_hi);
  const double fm = f(rng), tm = t(rng);
  return {fm * random_direction(rng), tm * random_direction(rng)};
}

void write_trajectories(const std::filesystem::path& dir, std::vector<TaskConfig>& tasks,
                        const std::vector<SyntheticSpec>& specs, std::uint64_t seed) {
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const auto rel = std::filesystem::path("trajectories") / (slugify(tasks[i].name) + ".csv");
    save_trajectory(synthesize(specs[i]), dir / rel,
                    fmt::format("synthetic {} trajectory for '{}' seed={}", to_string(specs[i].shape), tasks[i].name,
                                seed));
    tasks[i].trajectory_path = dir / rel;
  }
}

}  // namespace

std::string_view to_string(SignalShape s) {
  switch (s) {
    case SignalShape::Constant: return "constant";
    case SignalShape::Ramp: return "ramp";
    case SignalShape::Sinusoid: return "sinusoid";
    case SignalShape::NoiseSpiked: return "noise-spiked";
  }
  return "?";
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

std::string slugify(std::string_view name) {
  std::string out;
  for (unsigned char ch : name) {
    if (std::isalnum(ch))
      out += static_cast<char>(std::tolower(ch));
    else if (!out.empty() && out.back() != '_')
      out += '_';
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out.empty() ? std::string("task") : out;
}

WrenchTrajectory synthesize(const SyntheticSpec& spec) {
  if (!(spec.sample_rate > 0.0 && spec.duration_s > 0.0)) throw DomainError("duration and sample rate must be positive");
  const auto n = static_cast<std::size_t>(std::llround(spec.duration_s * spec.sample_rate));
  if (n < 2) throw DomainError("synthetic trajectory needs at least two samples");
  WrenchTrajectory traj;
  traj.sample_rate = spec.sample_rate;
  traj.samples.reserve(n);

  const auto base = spec.base.stacked();
  const auto amp = spec.amplitude.stacked();
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / spec.sample_rate;
    Eigen::Matrix<double, 6, 1> w = base;
    switch (spec.shape) {
      case SignalShape::Constant: break;
      case SignalShape::Ramp: w += amp * (t / spec.duration_s); break;
      case SignalShape::Sinusoid:
      case SignalShape::NoiseSpiked:
        for (int c = 0; c < 6; ++c) w[c] += amp[c] * std::sin(two_pi * spec.frequency_hz * t + c * std::numbers::pi / 3);
        break;
    }
    if (spec.shape == SignalShape::NoiseSpiked) {
      for (int c = 0; c < 6; ++c) w[c] += spec.noise_fraction * std::abs(amp[c]) * noise(rng);
      if (unit(rng) < spec.spike_probability) {
        const int c = static_cast<int>(unit(rng) * 6.0) % 6;
        w[c] += (unit(rng) < 0.5 ? -1.0 : 1.0) * spec.spike_fraction * std::abs(amp[c]);
      }
    }
    if (t < spec.fade_in_s) w *= 0.5 * (1.0 - std::cos(std::numbers::pi * t / spec.fade_in_s));
    traj.samples.push_back({w.head<3>(), w.tail<3>()});
  }
  return traj;
}

std::vector<TaskConfig> everyday_tasks() {
  std::vector<TaskConfig> out;
  for (const auto& row : kEverydayTasks) {
    TaskConfig t;
    t.name = row.name;
    t.handle_size = row.size;
    t.radius = handle_radius(row.size);
    t.grasp = row.grasp;
    t.palm = row.palm;
    out.push_back(std::move(t));
  }
  return out;
}

std::string format_task_suite(const std::vector<TaskConfig>& tasks, const std::filesystem::path& relative_to) {
  nlohmann::ordered_json list = nlohmann::ordered_json::array();
  for (const auto& t : tasks) {
    nlohmann::ordered_json rec;
    rec["name"] = t.name;
    if (t.handle_size == HandleSize::Custom)
      rec["handle_size"] = t.radius;
    else
      rec["handle_size"] = std::string(to_string(t.handle_size));
    rec["grasp"] = std::string(to_string(t.grasp));
    rec["palm"] = t.palm;
    rec["mu"] = t.friction_mu;
    rec["trajectory"] = t.trajectory_path.empty()
                            ? std::string()
                            : t.trajectory_path.lexically_relative(relative_to).generic_string();
    list.push_back(std::move(rec));
  }
  nlohmann::ordered_json doc;
  doc["tasks"] = std::move(list);
  return doc.dump(2) + "\n";
}

std::vector<TaskConfig> write_everyday_suite(const std::filesystem::path& dir, std::uint64_t seed,
                                             std::string_view suite_file, double duration_s, double sample_rate) {
  auto tasks = everyday_tasks();
  std::vector<SyntheticSpec> specs;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    std::mt19937_64 rng(derive_seed(seed, i));
    std::uniform_real_distribution<double> freq(0.2, 0.8);
    SyntheticSpec s;
    s.shape = SignalShape::Sinusoid;
    s.base = random_wrench(rng, 1.0, 3.0, 0.005, 0.02);
    s.amplitude = random_wrench(rng, 0.5, 2.0, 0.003, 0.015);
    s.frequency_hz = freq(rng);
    s.duration_s = duration_s;
    s.sample_rate = sample_rate;
    s.fade_in_s = 0.8;
    s.seed = derive_seed(seed, i + 1000);
    specs.push_back(s);
  }
  write_trajectories(dir, tasks, specs, seed);
  write_file_atomic(dir / suite_file, format_task_suite(tasks, dir));
  return tasks;
}

std::vector<TaskConfig> write_feasibility_suite(const std::filesystem::path& dir, std::uint64_t seed,
                                                std::string_view suite_file) {
  constexpr TaskRow rows[] = {
      {"constant medium m-pinch palm", Medium, MPinch, true},
      {"constant small tripod3", Small, Tripod3, false},
      {"ramp large l-pinch palm", Large, LPinch, true},
      {"ramp small m-pinch", Small, MPinch, false},
      {"sinusoid medium tripod1 palm", Medium, Tripod1, true},
      {"sinusoid medium tripod2 palm", Medium, Tripod2, true},
      {"sinusoid small tripod1", Small, Tripod1, false},
      {"noise-spiked medium l-pinch palm", Medium, LPinch, true},
      {"noise-spiked medium tripod3", Medium, Tripod3, false},
      {"noise-spiked large m-pinch palm", Large, MPinch, true},
  };
  constexpr SignalShape shapes[] = {SignalShape::Constant,    SignalShape::Constant, SignalShape::Ramp,
                                    SignalShape::Ramp,        SignalShape::Sinusoid, SignalShape::Sinusoid,
                                    SignalShape::Sinusoid,    SignalShape::NoiseSpiked, SignalShape::NoiseSpiked,
                                    SignalShape::NoiseSpiked};
  std::vector<TaskConfig> tasks;
  std::vector<SyntheticSpec> specs;
  for (std::size_t i = 0; i < std::size(rows); ++i) {
    TaskConfig t;
    t.name = rows[i].name;
    t.handle_size = rows[i].size;
    t.radius = handle_radius(rows[i].size);
    t.grasp = rows[i].grasp;
    t.palm = rows[i].palm;
    tasks.push_back(std::move(t));

    std::mt19937_64 rng(derive_seed(seed, i));
    std::uniform_real_distribution<double> freq(0.5, 2.0);
    SyntheticSpec s;
    s.shape = shapes[i];
    s.base = random_wrench(rng, 1.0, 4.0, 0.005, 0.03);
    s.amplitude = random_wrench(rng, 0.5, 3.0, 0.003, 0.02);
    s.frequency_hz = freq(rng);
    s.duration_s = 1.0;
    s.sample_rate = 100.0;
    s.seed = derive_seed(seed, i + 1000);
    specs.push_back(s);
  }
  write_trajectories(dir, tasks, specs, seed);
  write_file_atomic(dir / suite_file, format_task_suite(tasks, dir));
  return tasks;
}

}  // namespace handreq

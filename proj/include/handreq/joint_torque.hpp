#pragma once

#include <array>
#include <string_view>
#include <vector>

namespace handreq {

/// Joint types of the model finger, in contact-Jacobian column order.
enum class Joint { MCP_Z = 0, MCP_X = 1, PIP = 2 };

inline constexpr std::array<Joint, 3> kJoints = {Joint::MCP_Z, Joint::MCP_X, Joint::PIP};

constexpr std::string_view to_string(Joint j) {
  switch (j) {
    case Joint::MCP_Z: return "MCP-Z";
    case Joint::MCP_X: return "MCP-X";
    case Joint::PIP: return "PIP";
  }
  return "?";
}

Joint parse_joint(std::string_view s);

struct JointTorqueTrajectory {
  double sample_rate = 0.0;  // Hz
  Joint joint = Joint::PIP;
  int finger_index = 0;
  std::vector<double> values;  // N m

  void validate() const;
};

}  // namespace handreq

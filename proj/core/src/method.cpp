#include "slpos/method.hpp"

#include "slpos/errors.hpp"

namespace slpos {

std::string to_string(PositioningMethod method) {
  switch (method) {
    case PositioningMethod::ToaMultilat: return "toa";
    case PositioningMethod::RttSingle: return "rtt-single";
    case PositioningMethod::RttDouble: return "rtt-double";
    case PositioningMethod::Tdoa: return "tdoa";
    case PositioningMethod::AoaTriangulation: return "aoa";
    case PositioningMethod::HybridRttAoa: return "hybrid";
  }
  throw UsageError("unknown positioning method");
}

PositioningMethod method_from_string(std::string_view name) {
  if (name == "toa") return PositioningMethod::ToaMultilat;
  if (name == "rtt-single") return PositioningMethod::RttSingle;
  if (name == "rtt-double") return PositioningMethod::RttDouble;
  if (name == "tdoa") return PositioningMethod::Tdoa;
  if (name == "aoa") return PositioningMethod::AoaTriangulation;
  if (name == "hybrid") return PositioningMethod::HybridRttAoa;
  throw ConfigurationError("unknown method: " + std::string(name));
}

int min_anchors(PositioningMethod method, bool three_d) {
  switch (method) {
    case PositioningMethod::HybridRttAoa:
      return 1;
    case PositioningMethod::Tdoa:
      // 3 transmitting anchors, 4 UEs in total
      return three_d ? 4 : 3;
    default:
      return three_d ? 4 : 3;
  }
}

}  // namespace slpos

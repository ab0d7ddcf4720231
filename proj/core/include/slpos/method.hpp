#pragma once

#include <string>
#include <string_view>

namespace slpos {

// Positioning method simulated end to end. ToaMultilat treats one-way ToA as
// a range (valid only under network synchronization, which is exactly what
// the sync-error experiments stress). RTT flavors are split because their
// clock-drift behavior differs by orders of magnitude.
enum class PositioningMethod {
  ToaMultilat,
  RttSingle,
  RttDouble,
  Tdoa,
  AoaTriangulation,
  HybridRttAoa,
};

std::string to_string(PositioningMethod method);
PositioningMethod method_from_string(std::string_view name);

// Minimum anchors the method needs for a fix of the given dimensionality
// (2-D unless three_d is set).
int min_anchors(PositioningMethod method, bool three_d);

}  // namespace slpos

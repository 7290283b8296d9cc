#pragma once

#include "sforge/geometry.hpp"

#include <functional>
#include <string_view>
#include <vector>

namespace sforge {

// Inputs arrive in catalog port order, one item per scalar port and a whole list per list port.
// Outputs come back in catalog port order.
using Kernel = std::function<std::vector<GeomValue>(const std::vector<GeomValue>&)>;

const Kernel* find_kernel(std::string_view canonical_name);
std::vector<std::string_view> kernel_names();

}  // namespace sforge

#pragma once

namespace rlnc {
inline constexpr const char* kVersionString = "0.1.0";
}

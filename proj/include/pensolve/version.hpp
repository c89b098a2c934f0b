#pragma once

#define PENSOLVE_VERSION_MAJOR 0
#define PENSOLVE_VERSION_MINOR 1
#define PENSOLVE_VERSION_PATCH 0

namespace pensolve {
inline constexpr const char* version_string() { return "0.1.0"; }
}

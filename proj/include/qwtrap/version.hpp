#pragma once

#define QWTRAP_VERSION "0.1.0"

namespace qwtrap {

inline const char* version() { return QWTRAP_VERSION; }

} // namespace qwtrap

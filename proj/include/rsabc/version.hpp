#pragma once

#define RSABC_VERSION_MAJOR 0
#define RSABC_VERSION_MINOR 1
#define RSABC_VERSION_PATCH 0
#define RSABC_VERSION_STRING "0.1.0"

namespace rsabc {
inline const char* version() { return RSABC_VERSION_STRING; }
}  // namespace rsabc

#pragma once

namespace risk_sieve {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace risk_sieve

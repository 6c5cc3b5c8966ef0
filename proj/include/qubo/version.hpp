#pragma once

namespace qubo {

inline constexpr const char* version = "0.1.0";

}  // namespace qubo

#pragma once
// Small helpers shared by the test translation units.

#include <functional>
#include <optional>

#include "wavetail/common.hpp"

namespace testutil {

// Runs f and reports the typed failure code it throws, if any.
template <class F>
std::optional<wavetail::errc> thrown_code(F&& f) {
  try {
    f();
  } catch (const wavetail::failure& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace testutil

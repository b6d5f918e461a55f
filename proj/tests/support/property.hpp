#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include <gtest/gtest.h>

#include "generators.hpp"

namespace sphot::testing {

// Runs `body` on `count` generated cases; failures report the case seed.
inline void for_all(int count, std::uint64_t seed, const std::function<void(Gen&)>& body) {
  for (int k = 0; k < count; ++k) {
    const std::uint64_t case_seed = seed * 1000003ULL + static_cast<std::uint64_t>(k);
    Gen g(case_seed);
    SCOPED_TRACE("case seed " + std::to_string(case_seed));
    body(g);
    if (::testing::Test::HasFatalFailure()) return;
  }
}

}  // namespace sphot::testing

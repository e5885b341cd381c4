#pragma once

#include <gtest/gtest.h>

#include <functional>
#include <string>

#include "assin/error.hpp"

// Runs f and checks it throws assin::Error of the given category whose
// message contains `needle`.
inline void expect_category(assin::ErrorCategory cat, const std::function<void()>& f,
                            const std::string& needle = "") {
  try {
    f();
    ADD_FAILURE() << "no exception";
  } catch (const assin::Error& e) {
    EXPECT_EQ(e.category(), cat) << e.what();
    if (!needle.empty()) {
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
  }
}

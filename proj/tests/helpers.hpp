#ifndef MFSPEC_TESTS_HELPERS_HPP
#define MFSPEC_TESTS_HELPERS_HPP

#include <doctest.h>

#include <functional>

#include "mfspec/error.hpp"

// Error code raised by f; fails the test when nothing is thrown.
inline mfspec::ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const mfspec::Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return mfspec::ErrorCode::InvalidArgument;
}

#endif  // MFSPEC_TESTS_HELPERS_HPP

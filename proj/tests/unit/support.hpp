#pragma once

#include <doctest.h>

#include <functional>

#include "sinv/error.hpp"

// Error code thrown by f; fails the test if nothing is thrown.
inline sinv::ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const sinv::Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return sinv::ErrorCode::InvalidArgument;
}

#pragma once

#include <doctest.h>

#include "permqubo/error.hpp"

// Asserts that expr throws permqubo::Error of the given kind.
#define CHECK_ERROR_KIND(expr, expected_kind)                                  \
  do {                                                                         \
    bool threw_ = false;                                                       \
    try {                                                                      \
      (void)(expr);                                                            \
    } catch (const permqubo::Error& e_) {                                      \
      threw_ = true;                                                           \
      CHECK_MESSAGE(e_.kind() == (expected_kind), e_.what());                  \
    }                                                                          \
    CHECK_MESSAGE(threw_, "expected permqubo::Error from " #expr);             \
  } while (0)

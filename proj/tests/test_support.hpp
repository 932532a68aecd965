#pragma once

#include "oracles.hpp"

#include <pcert/curve.hpp>
#include <pcert/error.hpp>

#include <doctest.h>

#include <functional>

namespace testing {

inline oracle::ToyPoint to_toy(const pcert::ec::Point& p)
{
    if (p.is_infinity())
        return std::nullopt;
    return std::make_pair(p.x().get_si(), p.y().get_si());
}

inline pcert::ec::Point from_toy(const oracle::ToyPoint& p)
{
    if (!p)
        return pcert::ec::Point::infinity();
    return {mpz_class(p->first), mpz_class(p->second)};
}

/// Runs fn and returns the ErrorCode it threw; fails the test if it did not
/// throw pcert::Error.
inline std::optional<pcert::ErrorCode> error_of(const std::function<void()>& fn)
{
    try {
        fn();
    } catch (const pcert::Error& e) {
        return e.code();
    }
    return std::nullopt;
}

} // namespace testing

#define CHECK_ERROR(expr, code) CHECK(::testing::error_of([&] { (void)(expr); }) == std::optional(code))
#define REQUIRE_ERROR(expr, code) REQUIRE(::testing::error_of([&] { (void)(expr); }) == std::optional(code))

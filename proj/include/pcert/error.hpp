#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pcert {

enum class ErrorCode : std::uint8_t {
    InvalidArgument,
    OffCurveInput,
    DivisionByZero,
    RngFailure,
    UnknownStrength,
    UnknownCurve,
    DegenerateSharedPoint,
    InsufficientMaterial,
    MacMismatch,
    MalformedEncoding,
    BadPcaSignature,
    KeyMismatch,
    UnauthorizedIssuer,
    InvalidValidity,
    NotEnrolled,
    BadChain,
    BadSignature,
    ProtocolViolation,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure in the library surfaces as this exception. The code is the
/// stable, testable part; the message is for humans.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what);
    Error(ErrorCode code, const std::string& what, std::uint64_t index);

    ErrorCode code() const noexcept { return code_; }

    /// Set when the failure is attributable to one element of a batch.
    std::optional<std::uint64_t> index() const noexcept { return index_; }

private:
    ErrorCode code_;
    std::optional<std::uint64_t> index_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

} // namespace pcert

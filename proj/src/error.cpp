#include <pcert/error.hpp>

namespace pcert {

std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::OffCurveInput: return "OffCurveInput";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::RngFailure: return "RngFailure";
    case ErrorCode::UnknownStrength: return "UnknownStrength";
    case ErrorCode::UnknownCurve: return "UnknownCurve";
    case ErrorCode::DegenerateSharedPoint: return "DegenerateSharedPoint";
    case ErrorCode::InsufficientMaterial: return "InsufficientMaterial";
    case ErrorCode::MacMismatch: return "MacMismatch";
    case ErrorCode::MalformedEncoding: return "MalformedEncoding";
    case ErrorCode::BadPcaSignature: return "BadPcaSignature";
    case ErrorCode::KeyMismatch: return "KeyMismatch";
    case ErrorCode::UnauthorizedIssuer: return "UnauthorizedIssuer";
    case ErrorCode::InvalidValidity: return "InvalidValidity";
    case ErrorCode::NotEnrolled: return "NotEnrolled";
    case ErrorCode::BadChain: return "BadChain";
    case ErrorCode::BadSignature: return "BadSignature";
    case ErrorCode::ProtocolViolation: return "ProtocolViolation";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
{
}

Error::Error(ErrorCode code, const std::string& what, std::uint64_t index)
    : std::runtime_error(std::string(to_string(code)) + " at index " + std::to_string(index) + ": " + what),
      code_(code), index_(index)
{
}

void fail(ErrorCode code, const std::string& what)
{
    throw Error(code, what);
}

} // namespace pcert

// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

#include "oif/c_abi.h"

namespace oif {

enum class ErrorCode : std::int32_t {
    kOk = OIF_OK,
    kInvalidArgument = OIF_ERR_INVALID_ARGUMENT,
    kAllocation = OIF_ERR_ALLOCATION,
    kTypeMismatch = OIF_ERR_TYPE_MISMATCH,
    kNotFound = OIF_ERR_NOT_FOUND,
    kPluginFailure = OIF_ERR_PLUGIN,
    kSolverFailure = OIF_ERR_SOLVER,
};

const char* error_code_name(std::int32_t code) noexcept;

/// Integer status plus an optional human-readable reason.
/// The message is empty on success.
class Status {
  public:
    Status() = default;
    Status(std::int32_t code, std::string message) : code_(code), message_(std::move(message)) {}
    Status(ErrorCode code, std::string message)
        : Status(static_cast<std::int32_t>(code), std::move(message)) {}

    static Status ok() { return {}; }

    bool is_ok() const noexcept { return code_ == OIF_OK; }
    std::int32_t code() const noexcept { return code_; }
    const std::string& message() const noexcept { return message_; }

  private:
    std::int32_t code_ = OIF_OK;
    std::string message_;
};

/// Exception form of a nonzero Status, used by the C++ user side.
class Error : public std::runtime_error {
  public:
    Error(std::int32_t code, const std::string& message)
        : std::runtime_error(message), code_(code) {}
    Error(ErrorCode code, const std::string& message)
        : Error(static_cast<std::int32_t>(code), message) {}

    std::int32_t code() const noexcept { return code_; }
    Status status() const { return {code_, what()}; }

  private:
    std::int32_t code_;
};

/// Raised by unpack_args; carries the first offending argument position.
class TypeMismatchError : public Error {
  public:
    TypeMismatchError(std::size_t position, const std::string& message)
        : Error(ErrorCode::kTypeMismatch, message), position_(position) {}

    std::size_t position() const noexcept { return position_; }

  private:
    std::size_t position_;
};

inline void throw_if_error(const Status& s) {
    if (!s.is_ok()) {
        throw Error(s.code(), s.message());
    }
}

}  // namespace oif

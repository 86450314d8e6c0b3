// Copyright 2026 The asmpc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace asmpc {

enum class ErrorCode : std::uint8_t {
  kUsage = 1,
  kConfig,
  kProgramSyntax,
  kPlanError,
  kShareFileCorrupt,
  kTripleFileCorrupt,
  kTransportUnavailable,
  kPeerGone,
  kProtocolDesync,
  kInvalidSecret,
  kZeroSecretUnderMss,
  kNearZeroDenominator,
  kInvalidBase,
  kNumericOverflow,
  kLogOfZero,
  kDivisionByZero,
  kComplexResultUnsupported,
  kOracleDomainError,
  kTripleExhausted,
};

constexpr std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUsage: return "Usage";
    case ErrorCode::kConfig: return "Config";
    case ErrorCode::kProgramSyntax: return "ProgramSyntax";
    case ErrorCode::kPlanError: return "PlanError";
    case ErrorCode::kShareFileCorrupt: return "ShareFileCorrupt";
    case ErrorCode::kTripleFileCorrupt: return "TripleFileCorrupt";
    case ErrorCode::kTransportUnavailable: return "TransportUnavailable";
    case ErrorCode::kPeerGone: return "PeerGone";
    case ErrorCode::kProtocolDesync: return "ProtocolDesync";
    case ErrorCode::kInvalidSecret: return "InvalidSecret";
    case ErrorCode::kZeroSecretUnderMss: return "ZeroSecretUnderMSS";
    case ErrorCode::kNearZeroDenominator: return "NearZeroDenominator";
    case ErrorCode::kInvalidBase: return "InvalidBase";
    case ErrorCode::kNumericOverflow: return "NumericOverflow";
    case ErrorCode::kLogOfZero: return "LogOfZero";
    case ErrorCode::kDivisionByZero: return "DivisionByZero";
    case ErrorCode::kComplexResultUnsupported: return "ComplexResultUnsupported";
    case ErrorCode::kOracleDomainError: return "OracleDomainError";
    case ErrorCode::kTripleExhausted: return "TripleExhausted";
  }
  return "Unknown";
}

/// Process exit status for the CLI: 2 usage, 3 transport, 4 protocol desync,
/// 5 numeric domain, 6 triple exhaustion.
constexpr int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::kTransportUnavailable:
    case ErrorCode::kPeerGone:
      return 3;
    case ErrorCode::kProtocolDesync:
      return 4;
    case ErrorCode::kInvalidSecret:
    case ErrorCode::kZeroSecretUnderMss:
    case ErrorCode::kNearZeroDenominator:
    case ErrorCode::kInvalidBase:
    case ErrorCode::kNumericOverflow:
    case ErrorCode::kLogOfZero:
    case ErrorCode::kDivisionByZero:
    case ErrorCode::kComplexResultUnsupported:
    case ErrorCode::kOracleDomainError:
      return 5;
    case ErrorCode::kTripleExhausted:
      return 6;
    default:
      return 2;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, bool remote = false)
      : std::runtime_error(std::string(error_name(code)) + ": " + message),
        code_(code),
        remote_(remote) {}

  ErrorCode code() const noexcept { return code_; }
  /// True when the error was raised by the peer and relayed over the channel.
  bool remote() const noexcept { return remote_; }

 private:
  ErrorCode code_;
  bool remote_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace asmpc

// Copyright 2026 The eitent Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace eitent {

enum class ErrorCode {
  NonPositiveGamma,
  EtaOutOfRange,
  ZeroDrive,
  NonPositiveCoupling,
  NonPositiveKappa,
  InvalidGridPoint,
  CaseMismatch,
  RegimeError,
  CertificateRequired,
  CarrierFrequency,
  NotSupported,
  ConfigInvalid,
  UnknownFigure,
  InvalidSweep,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveGamma: return "NonPositiveGamma";
    case ErrorCode::EtaOutOfRange: return "EtaOutOfRange";
    case ErrorCode::ZeroDrive: return "ZeroDrive";
    case ErrorCode::NonPositiveCoupling: return "NonPositiveCoupling";
    case ErrorCode::NonPositiveKappa: return "NonPositiveKappa";
    case ErrorCode::InvalidGridPoint: return "InvalidGridPoint";
    case ErrorCode::CaseMismatch: return "CaseMismatch";
    case ErrorCode::RegimeError: return "RegimeError";
    case ErrorCode::CertificateRequired: return "CertificateRequired";
    case ErrorCode::CarrierFrequency: return "CarrierFrequency";
    case ErrorCode::NotSupported: return "NotSupported";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::UnknownFigure: return "UnknownFigure";
    case ErrorCode::InvalidSweep: return "InvalidSweep";
  }
  return "Unknown";
}

/// Exception carrying a machine-readable code; what() names the violated
/// condition.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace eitent

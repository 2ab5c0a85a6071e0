// Copyright 2026 The Qualcode Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QUALCODE_ERROR_HPP_
#define QUALCODE_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace qualcode {

// Every failure raised by the library carries one of these codes. The
// service and CLI surface `error_code_name()` verbatim, so the names are part
// of the external interface.
enum class ErrorCode {
  // corpus
  kInvalidEncoding,
  kEmptyCorpus,
  kMissingColumn,
  kMalformedCsv,
  kMalformedDocument,
  kDuplicateId,
  kNonIntegerId,
  kInvalidCodebook,
  // chunker / prompt_engine
  kInvalidBudget,
  kSpecModeMismatch,
  kMissingCodebook,
  kInvalidSpec,
  kTemplateError,
  // response_parser
  kNoTableFound,
  kHeaderMismatch,
  kRowArity,
  kBadCount,
  kUnknownCode,
  kBadIndex,
  // agreement
  kDegenerateMarginals,
  kRaggedMatrix,
  kLengthMismatch,
  kInsufficientData,
  // llm_client
  kClientError,
  // session
  kNoResult,
  kPrecondition,
  // config
  kInvalidConfig,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + detail),
        code_(code),
        detail_(detail) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view name() const noexcept { return error_code_name(code_); }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace qualcode

#endif  // QUALCODE_ERROR_HPP_

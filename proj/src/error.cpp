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

#include "qualcode/error.hpp"

namespace qualcode {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidEncoding: return "InvalidEncoding";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kMissingColumn: return "MissingColumn";
    case ErrorCode::kMalformedCsv: return "MalformedCsv";
    case ErrorCode::kMalformedDocument: return "MalformedDocument";
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kNonIntegerId: return "NonIntegerId";
    case ErrorCode::kInvalidCodebook: return "InvalidCodebook";
    case ErrorCode::kInvalidBudget: return "InvalidBudget";
    case ErrorCode::kSpecModeMismatch: return "SpecModeMismatch";
    case ErrorCode::kMissingCodebook: return "MissingCodebook";
    case ErrorCode::kInvalidSpec: return "InvalidSpec";
    case ErrorCode::kTemplateError: return "TemplateError";
    case ErrorCode::kNoTableFound: return "NoTableFound";
    case ErrorCode::kHeaderMismatch: return "HeaderMismatch";
    case ErrorCode::kRowArity: return "RowArity";
    case ErrorCode::kBadCount: return "BadCount";
    case ErrorCode::kUnknownCode: return "UnknownCode";
    case ErrorCode::kBadIndex: return "BadIndex";
    case ErrorCode::kDegenerateMarginals: return "DegenerateMarginals";
    case ErrorCode::kRaggedMatrix: return "RaggedMatrix";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kInsufficientData: return "InsufficientData";
    case ErrorCode::kClientError: return "ClientError";
    case ErrorCode::kNoResult: return "NoResult";
    case ErrorCode::kPrecondition: return "Precondition";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

}  // namespace qualcode

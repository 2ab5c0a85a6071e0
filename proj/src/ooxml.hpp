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

#ifndef QUALCODE_SRC_OOXML_HPP_
#define QUALCODE_SRC_OOXML_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qualcode::detail {

// Plain text of every <w:p> in word/document.xml, in document order
// (table cells included). Tabs and breaks become '\t' and '\n'.
std::vector<std::string> docx_paragraphs(std::string_view docx_bytes);

struct SheetRows {
  std::vector<std::size_t> row_numbers;  // 1-based, as stored in the sheet
  std::vector<std::vector<std::string>> rows;  // dense, padded to max width
};

// Reads one worksheet with every cell coerced to its display string. An
// empty `sheet` selects the first sheet in workbook order.
SheetRows xlsx_sheet(std::string_view xlsx_bytes,
                     const std::optional<std::string>& sheet);

}  // namespace qualcode::detail

#endif  // QUALCODE_SRC_OOXML_HPP_

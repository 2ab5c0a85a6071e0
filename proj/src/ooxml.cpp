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

#include "ooxml.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <map>
#include <sstream>

#include "qualcode/error.hpp"
#include "zip_archive.hpp"

namespace qualcode::detail {

namespace {

using boost::property_tree::ptree;

constexpr const char* kAttr = "<xmlattr>";

ptree parse_xml(const std::string& xml, const std::string& member) {
  std::istringstream in(xml);
  ptree pt;
  try {
    boost::property_tree::read_xml(in, pt);
  } catch (const boost::property_tree::xml_parser_error& e) {
    throw Error(ErrorCode::kMalformedDocument,
                member + ": " + std::string(e.message()));
  }
  return pt;
}

std::string attr(const ptree& node, const std::string& name) {
  if (auto a = node.get_child_optional(kAttr)) {
    if (auto v = a->get_optional<std::string>(name)) return *v;
  }
  return {};
}

void collect_run_text(const ptree& node, std::string& out) {
  for (const auto& [tag, child] : node) {
    if (tag == kAttr) continue;
    if (tag == "w:t") {
      out += child.data();
    } else if (tag == "w:tab") {
      out.push_back('\t');
    } else if (tag == "w:br" || tag == "w:cr") {
      out.push_back('\n');
    } else if (tag == "w:delText" || tag == "w:instrText") {
      continue;
    } else {
      collect_run_text(child, out);
    }
  }
}

void collect_paragraphs(const ptree& node, std::vector<std::string>& out) {
  for (const auto& [tag, child] : node) {
    if (tag == kAttr) continue;
    if (tag == "w:p") {
      std::string text;
      collect_run_text(child, text);
      out.push_back(std::move(text));
    } else {
      collect_paragraphs(child, out);
    }
  }
}

// Text of a shared-string item or inline string: <t> or rich-text runs <r><t>.
std::string string_item_text(const ptree& si) {
  std::string text;
  for (const auto& [tag, child] : si) {
    if (tag == "t") {
      text += child.data();
    } else if (tag == "r") {
      if (auto t = child.get_optional<std::string>("t")) text += *t;
    }
  }
  return text;
}

// "BC12" -> zero-based column 54.
std::optional<std::size_t> column_of(const std::string& ref) {
  std::size_t col = 0;
  std::size_t i = 0;
  while (i < ref.size() && ref[i] >= 'A' && ref[i] <= 'Z') {
    col = col * 26 + static_cast<std::size_t>(ref[i] - 'A' + 1);
    ++i;
  }
  if (i == 0) return std::nullopt;
  return col - 1;
}

std::string resolve_target(const std::string& target) {
  if (!target.empty() && target.front() == '/') return target.substr(1);
  return "xl/" + target;
}

}  // namespace

std::vector<std::string> docx_paragraphs(std::string_view docx_bytes) {
  ZipArchive zip(docx_bytes);
  const std::string member = "word/document.xml";
  if (!zip.contains(member)) {
    throw Error(ErrorCode::kMalformedDocument, "not a .docx: missing " + member);
  }
  ptree doc = parse_xml(zip.read(member), member);
  auto body = doc.get_child_optional("w:document.w:body");
  if (!body) throw Error(ErrorCode::kMalformedDocument, "missing w:body");
  std::vector<std::string> paragraphs;
  collect_paragraphs(*body, paragraphs);
  return paragraphs;
}

SheetRows xlsx_sheet(std::string_view xlsx_bytes,
                     const std::optional<std::string>& sheet) {
  ZipArchive zip(xlsx_bytes);
  if (!zip.contains("xl/workbook.xml")) {
    throw Error(ErrorCode::kMalformedDocument,
                "not a .xlsx: missing xl/workbook.xml");
  }
  ptree wb = parse_xml(zip.read("xl/workbook.xml"), "xl/workbook.xml");

  std::map<std::string, std::string> rels;
  const std::string rels_name = "xl/_rels/workbook.xml.rels";
  if (zip.contains(rels_name)) {
    ptree r = parse_xml(zip.read(rels_name), rels_name);
    if (auto root = r.get_child_optional("Relationships")) {
      for (const auto& [tag, rel] : *root) {
        if (tag == "Relationship") rels[attr(rel, "Id")] = attr(rel, "Target");
      }
    }
  }

  std::string sheet_member;
  if (auto sheets = wb.get_child_optional("workbook.sheets")) {
    for (const auto& [tag, s] : *sheets) {
      if (tag != "sheet") continue;
      if (sheet && !sheet->empty() && attr(s, "name") != *sheet) continue;
      auto it = rels.find(attr(s, "r:id"));
      if (it != rels.end()) {
        sheet_member = resolve_target(it->second);
      } else if (!sheet || sheet->empty()) {
        sheet_member = "xl/worksheets/sheet1.xml";
      }
      break;
    }
  }
  if (sheet_member.empty()) {
    throw Error(ErrorCode::kMalformedDocument,
                sheet ? "no sheet named '" + *sheet + "'" : "workbook has no sheets");
  }
  if (!zip.contains(sheet_member)) {
    throw Error(ErrorCode::kMalformedDocument, "missing " + sheet_member);
  }

  std::vector<std::string> shared;
  if (zip.contains("xl/sharedStrings.xml")) {
    ptree ss = parse_xml(zip.read("xl/sharedStrings.xml"), "xl/sharedStrings.xml");
    if (auto sst = ss.get_child_optional("sst")) {
      for (const auto& [tag, si] : *sst) {
        if (tag == "si") shared.push_back(string_item_text(si));
      }
    }
  }

  ptree ws = parse_xml(zip.read(sheet_member), sheet_member);
  SheetRows out;
  std::size_t width = 0;
  auto data = ws.get_child_optional("worksheet.sheetData");
  if (!data) return out;
  std::size_t next_row = 1;
  for (const auto& [tag, row] : *data) {
    if (tag != "row") continue;
    std::size_t row_number = next_row;
    if (auto r = attr(row, "r"); !r.empty()) {
      try {
        row_number = std::stoul(r);
      } catch (const std::exception&) {
        throw Error(ErrorCode::kMalformedDocument, "bad row number '" + r + "'");
      }
    }
    next_row = row_number + 1;
    std::vector<std::string> cells;
    std::size_t next_col = 0;
    for (const auto& [ctag, c] : row) {
      if (ctag != "c") continue;
      std::size_t col = next_col;
      if (auto ref = attr(c, "r"); !ref.empty()) {
        if (auto parsed = column_of(ref)) col = *parsed;
      }
      next_col = col + 1;
      const std::string type = attr(c, "t");
      const std::string v = c.get<std::string>("v", "");
      std::string value;
      if (type == "s") {
        char* end = nullptr;
        const unsigned long idx = std::strtoul(v.c_str(), &end, 10);
        if (v.empty() || *end != '\0' || idx >= shared.size()) {
          throw Error(ErrorCode::kMalformedDocument,
                      "shared string index out of range: '" + v + "'");
        }
        value = shared[idx];
      } else if (type == "inlineStr") {
        if (auto is = c.get_child_optional("is")) value = string_item_text(*is);
      } else if (type == "b") {
        value = (v == "1") ? "TRUE" : "FALSE";
      } else {
        value = v;
      }
      if (cells.size() <= col) cells.resize(col + 1);
      cells[col] = std::move(value);
    }
    width = std::max(width, cells.size());
    out.row_numbers.push_back(row_number);
    out.rows.push_back(std::move(cells));
  }
  for (auto& r : out.rows) r.resize(width);
  return out;
}

}  // namespace qualcode::detail

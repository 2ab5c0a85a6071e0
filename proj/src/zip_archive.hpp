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

#ifndef QUALCODE_SRC_ZIP_ARCHIVE_HPP_
#define QUALCODE_SRC_ZIP_ARCHIVE_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace qualcode::detail {

// Read-only view over an in-memory zip archive. Supports stored and deflated
// members, which is all that OOXML producers emit. Zip64 and encrypted
// archives are rejected with kMalformedDocument. The archive bytes must
// outlive the object.
class ZipArchive {
 public:
  explicit ZipArchive(std::string_view bytes);

  bool contains(const std::string& name) const;
  std::string read(const std::string& name) const;
  std::vector<std::string> names() const;

 private:
  struct Member {
    std::uint16_t method = 0;
    std::uint16_t flags = 0;
    std::uint32_t crc32 = 0;
    std::uint32_t compressed_size = 0;
    std::uint32_t uncompressed_size = 0;
    std::uint32_t local_header_offset = 0;
  };

  std::string_view bytes_;
  std::map<std::string, Member> members_;
};

}  // namespace qualcode::detail

#endif  // QUALCODE_SRC_ZIP_ARCHIVE_HPP_

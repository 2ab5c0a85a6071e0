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

#include "zip_archive.hpp"

#include <zlib.h>

#include "qualcode/error.hpp"

namespace qualcode::detail {

namespace {

constexpr std::uint32_t kEndOfCentralDirSig = 0x06054b50;
constexpr std::uint32_t kCentralDirSig = 0x02014b50;
constexpr std::uint32_t kLocalHeaderSig = 0x04034b50;

[[noreturn]] void fail(const std::string& what) {
  throw Error(ErrorCode::kMalformedDocument, "zip: " + what);
}

std::uint16_t u16(std::string_view b, std::size_t off) {
  if (off + 2 > b.size()) fail("truncated archive");
  return static_cast<std::uint16_t>(static_cast<unsigned char>(b[off]) |
                                    (static_cast<unsigned char>(b[off + 1]) << 8));
}

std::uint32_t u32(std::string_view b, std::size_t off) {
  if (off + 4 > b.size()) fail("truncated archive");
  return static_cast<std::uint32_t>(u16(b, off)) |
         (static_cast<std::uint32_t>(u16(b, off + 2)) << 16);
}

std::string inflate_raw(std::string_view in, std::size_t expected) {
  std::string out(expected, '\0');
  z_stream zs{};
  if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) fail("inflateInit failed");
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(in.data()));
  zs.avail_in = static_cast<uInt>(in.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  int rc = inflate(&zs, Z_FINISH);
  const auto produced = zs.total_out;
  inflateEnd(&zs);
  if (rc != Z_STREAM_END || produced != expected) fail("corrupt deflate stream");
  return out;
}

}  // namespace

ZipArchive::ZipArchive(std::string_view bytes) : bytes_(bytes) {
  if (bytes.size() < 22) fail("too small to be an archive");
  // The end-of-central-directory record sits within the last 64 KiB + 22.
  std::size_t eocd = std::string_view::npos;
  const std::size_t lowest = bytes.size() > 65557 ? bytes.size() - 65557 : 0;
  for (std::size_t pos = bytes.size() - 22 + 1; pos-- > lowest;) {
    if (u32(bytes, pos) == kEndOfCentralDirSig) {
      eocd = pos;
      break;
    }
  }
  if (eocd == std::string_view::npos) fail("end of central directory not found");

  const std::uint16_t count = u16(bytes, eocd + 10);
  const std::uint32_t cd_offset = u32(bytes, eocd + 16);
  if (count == 0xFFFF || cd_offset == 0xFFFFFFFF) fail("zip64 is not supported");

  std::size_t pos = cd_offset;
  for (std::uint16_t i = 0; i < count; ++i) {
    if (u32(bytes, pos) != kCentralDirSig) fail("bad central directory entry");
    Member m;
    m.flags = u16(bytes, pos + 8);
    m.method = u16(bytes, pos + 10);
    m.crc32 = u32(bytes, pos + 16);
    m.compressed_size = u32(bytes, pos + 20);
    m.uncompressed_size = u32(bytes, pos + 24);
    const std::uint16_t name_len = u16(bytes, pos + 28);
    const std::uint16_t extra_len = u16(bytes, pos + 30);
    const std::uint16_t comment_len = u16(bytes, pos + 32);
    m.local_header_offset = u32(bytes, pos + 42);
    if (pos + 46 + name_len > bytes.size()) fail("truncated file name");
    std::string name(bytes.substr(pos + 46, name_len));
    members_[name] = m;
    pos += 46 + name_len + extra_len + comment_len;
  }
}

bool ZipArchive::contains(const std::string& name) const {
  return members_.count(name) != 0;
}

std::vector<std::string> ZipArchive::names() const {
  std::vector<std::string> out;
  out.reserve(members_.size());
  for (const auto& [name, _] : members_) out.push_back(name);
  return out;
}

std::string ZipArchive::read(const std::string& name) const {
  auto it = members_.find(name);
  if (it == members_.end()) fail("missing member " + name);
  const Member& m = it->second;
  if (m.flags & 0x1) fail("encrypted member " + name);
  const std::size_t lh = m.local_header_offset;
  if (u32(bytes_, lh) != kLocalHeaderSig) fail("bad local header for " + name);
  const std::size_t data_off = lh + 30 + u16(bytes_, lh + 26) + u16(bytes_, lh + 28);
  if (data_off + m.compressed_size > bytes_.size()) fail("truncated member " + name);
  std::string_view raw = bytes_.substr(data_off, m.compressed_size);

  std::string out;
  if (m.method == 0) {
    out.assign(raw);
  } else if (m.method == 8) {
    out = inflate_raw(raw, m.uncompressed_size);
  } else {
    fail("unsupported compression method " + std::to_string(m.method));
  }
  const auto crc = crc32(0L, reinterpret_cast<const Bytef*>(out.data()),
                         static_cast<uInt>(out.size()));
  if (crc != m.crc32) fail("crc mismatch for " + name);
  return out;
}

}  // namespace qualcode::detail

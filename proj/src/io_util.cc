// Copyright (c) the robkit project authors
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

#include "robkit/io_util.h"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "robkit/error.h"
#include "robkit/rng.h"

namespace robkit {

namespace fs = std::filesystem;

std::vector<uint8_t> ReadFileBytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path.string());
  in.seekg(0, std::ios::end);
  const auto size = in.tellg();
  in.seekg(0, std::ios::beg);
  std::vector<uint8_t> buf(static_cast<size_t>(size));
  if (size > 0) in.read(reinterpret_cast<char*>(buf.data()), size);
  if (!in) throw IoError("short read: " + path.string());
  return buf;
}

std::string ReadFileText(const fs::path& path) {
  const auto bytes = ReadFileBytes(path);
  return std::string(bytes.begin(), bytes.end());
}

void AtomicWriteBytes(const fs::path& path, const void* data, size_t size) {
  const fs::path dir = path.parent_path().empty() ? "." : path.parent_path();
  std::error_code ec;
  fs::create_directories(dir, ec);
  const fs::path tmp = dir / (path.filename().string() + ".tmp-robkit");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for write: " + tmp.string());
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
    if (!out) throw IoError("short write: " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw IoError("rename failed for " + path.string() + ": " + ec.message());
  }
}

void AtomicWriteText(const fs::path& path, const std::string& text) {
  AtomicWriteBytes(path, text.data(), text.size());
}

uint64_t HashBytes(const void* data, size_t size) {
  return Hash64().Bytes(data, size).Digest();
}

uint64_t HashFile(const fs::path& path) {
  const auto bytes = ReadFileBytes(path);
  return HashBytes(bytes.data(), bytes.size());
}

uint64_t HashTree(const fs::path& root) {
  std::vector<fs::path> files;
  if (fs::exists(root)) {
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
      if (entry.is_regular_file()) files.push_back(entry.path());
    }
  }
  std::vector<std::string> rels;
  rels.reserve(files.size());
  for (const auto& f : files) {
    rels.push_back(fs::relative(f, root).generic_string());
  }
  std::sort(rels.begin(), rels.end());
  Hash64 h;
  for (const auto& rel : rels) {
    h.Str(rel);
    const auto bytes = ReadFileBytes(root / rel);
    h.Bytes(bytes.data(), bytes.size());
    h.U64(bytes.size());
  }
  return h.Digest();
}

std::string HexHash(uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string SanitizeFileName(const std::string& id) {
  std::string out = id;
  for (char& c : out) {
    if (c == '/' || c == '\\' || c == ':' || c == '*' || c == '?' ||
        c == '"' || c == '<' || c == '>' || c == '|' || c == '\0') {
      c = '_';
    }
  }
  if (out.empty()) out = "_";
  return out;
}

}  // namespace robkit

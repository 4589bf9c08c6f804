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

#ifndef ROBKIT_IO_UTIL_H_
#define ROBKIT_IO_UTIL_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace robkit {

std::vector<uint8_t> ReadFileBytes(const std::filesystem::path& path);
std::string ReadFileText(const std::filesystem::path& path);

// Writes via a temp file in the same directory followed by a rename, so
// readers never observe a partial file.
void AtomicWriteBytes(const std::filesystem::path& path, const void* data,
                      size_t size);
void AtomicWriteText(const std::filesystem::path& path,
                     const std::string& text);

uint64_t HashBytes(const void* data, size_t size);
uint64_t HashFile(const std::filesystem::path& path);
// Combined hash over relative paths + contents of every regular file under
// root, walked in sorted order. Two trees hash equal iff byte-identical.
uint64_t HashTree(const std::filesystem::path& root);

std::string HexHash(uint64_t h);

// Filesystem-safe form of an item id (path separators and such replaced).
std::string SanitizeFileName(const std::string& id);

}  // namespace robkit

#endif  // ROBKIT_IO_UTIL_H_

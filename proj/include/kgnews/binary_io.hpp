// Copyright 2026 The kgnews Authors.
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

#ifndef KGNEWS_BINARY_IO_HPP_
#define KGNEWS_BINARY_IO_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kgnews {

// Little-endian writer used by every checkpoint format.
class BinaryWriter {
 public:
  void magic(std::string_view tag) { bytes_.append(tag); }
  void u64(std::uint64_t value);
  void f64(double value);
  void f64s(std::span<const double> values);

  const std::string &bytes() const { return bytes_; }

  // Writes the buffer to path, replacing any existing file.
  void save(const std::string &path) const;

 private:
  std::string bytes_;
};

// Bounds-checked little-endian reader. Running past the end raises a
// kFormat error instead of reading garbage.
class BinaryReader {
 public:
  BinaryReader(std::string bytes, std::string source);
  static BinaryReader open(const std::string &path);

  void expect_magic(std::string_view tag);
  std::uint64_t u64();
  double f64();
  void f64s(std::span<double> out);

  std::size_t remaining() const { return bytes_.size() - pos_; }
  void expect_end() const;
  const std::string &source() const { return source_; }

 private:
  void need(std::size_t n) const;

  std::string bytes_;
  std::string source_;
  std::size_t pos_ = 0;
};

// Reads a whole file, raising kIo if it cannot be opened.
std::string ReadFile(const std::string &path);
void WriteFile(const std::string &path, std::string_view contents);

}  // namespace kgnews

#endif  // KGNEWS_BINARY_IO_HPP_

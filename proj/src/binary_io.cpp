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

#include "kgnews/binary_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "kgnews/error.hpp"

namespace kgnews {
namespace {

void PutLittleEndian(std::string &out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t GetLittleEndian(const char *p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(p[i]);
  return v;
}

}  // namespace

void BinaryWriter::u64(std::uint64_t value) { PutLittleEndian(bytes_, value); }

void BinaryWriter::f64(double value) { PutLittleEndian(bytes_, std::bit_cast<std::uint64_t>(value)); }

void BinaryWriter::f64s(std::span<const double> values) {
  bytes_.reserve(bytes_.size() + 8 * values.size());
  for (double v : values) f64(v);
}

void BinaryWriter::save(const std::string &path) const { WriteFile(path, bytes_); }

BinaryReader::BinaryReader(std::string bytes, std::string source)
    : bytes_(std::move(bytes)), source_(std::move(source)) {}

BinaryReader BinaryReader::open(const std::string &path) { return BinaryReader(ReadFile(path), path); }

void BinaryReader::need(std::size_t n) const {
  if (remaining() < n) {
    Fail(ErrorKind::kFormat, source_ + ": truncated file (needed " + std::to_string(n) +
                                 " more bytes at offset " + std::to_string(pos_) + ")");
  }
}

void BinaryReader::expect_magic(std::string_view tag) {
  if (remaining() < tag.size() || std::string_view(bytes_).substr(pos_, tag.size()) != tag) {
    Fail(ErrorKind::kFormat, source_ + ": bad magic, expected \"" + std::string(tag) + "\"");
  }
  pos_ += tag.size();
}

std::uint64_t BinaryReader::u64() {
  need(8);
  std::uint64_t v = GetLittleEndian(bytes_.data() + pos_);
  pos_ += 8;
  return v;
}

double BinaryReader::f64() { return std::bit_cast<double>(u64()); }

void BinaryReader::f64s(std::span<double> out) {
  need(8 * out.size());
  for (double &v : out) v = f64();
}

void BinaryReader::expect_end() const {
  if (remaining() != 0) {
    Fail(ErrorKind::kFormat, source_ + ": " + std::to_string(remaining()) +
                                 " trailing bytes; header shape does not match table data");
  }
}

std::string ReadFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorKind::kIo, "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return std::move(buffer).str();
}

void WriteFile(const std::string &path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorKind::kIo, "cannot write " + path);
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) Fail(ErrorKind::kIo, "write failed for " + path);
}

}  // namespace kgnews

// Copyright 2026 The fairbound Authors
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


#include "manifest.h"

#include <openssl/evp.h>

#include <array>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <memory>

#include "fairbound/error.h"

namespace fairbound::cli {
namespace {

using json = nlohmann::json;

struct MdCtxDeleter {
  void operator()(EVP_MD_CTX* ctx) const { EVP_MD_CTX_free(ctx); }
};

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
      ThrowError(ErrorCode::kInvalidArgument, "sha256 init failed");
    }
  }
  void Update(const char* data, std::size_t n) {
    EVP_DigestUpdate(ctx_.get(), data, n);
  }
  std::string Hex() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_.get(), md.data(), &len);
    static const char kDigits[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
      out += kDigits[md[i] >> 4];
      out += kDigits[md[i] & 15];
    }
    return out;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, MdCtxDeleter> ctx_;
};

}  // namespace

std::string Sha256Hex(const std::string& bytes) {
  Sha256 h;
  h.Update(bytes.data(), bytes.size());
  return h.Hex();
}

std::string Sha256File(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) ThrowError(ErrorCode::kIoError, "cannot open '" + path.string() + "'");
  Sha256 h;
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    h.Update(buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  return h.Hex();
}

std::string UtcTimestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RunManifest::RunManifest(std::string command, std::vector<std::string> args)
    : command_(std::move(command)), args_(std::move(args)),
      started_at_(UtcTimestamp()) {}

void RunManifest::AddInput(const std::filesystem::path& path) {
  inputs_.push_back({path.string(), Sha256File(path), std::filesystem::file_size(path)});
}

void RunManifest::AddOutput(const std::filesystem::path& path) {
  outputs_.push_back({path.filename().string(), Sha256File(path),
                      std::filesystem::file_size(path)});
}

void RunManifest::Finish() { finished_at_ = UtcTimestamp(); }

json RunManifest::ToJson() const {
  const auto files = [](const std::vector<FileDigest>& v) {
    json a = json::array();
    for (const FileDigest& f : v) {
      a.push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
    }
    return a;
  };
  return {{"command", command_},
          {"args", args_},
          {"config", config_},
          {"seed", seed_ ? json(*seed_) : json(nullptr)},
          {"tool_version", kToolVersion},
          {"inputs", files(inputs_)},
          {"outputs", files(outputs_)},
          {"started_at", started_at_},
          {"finished_at", finished_at_.empty() ? UtcTimestamp() : finished_at_}};
}

void RunManifest::Write(const std::filesystem::path& dir) const {
  const std::filesystem::path p = dir / "manifest.json";
  std::ofstream out(p, std::ios::binary);
  if (!out) ThrowError(ErrorCode::kIoError, "cannot write '" + p.string() + "'");
  out << ToJson().dump(2) << '\n';
}

}  // namespace fairbound::cli

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


// Run manifests: what was run, with which inputs, and what it wrote.

#ifndef FAIRBOUND_TOOLS_MANIFEST_H_
#define FAIRBOUND_TOOLS_MANIFEST_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace fairbound::cli {

inline constexpr char kToolVersion[] = "0.1.0";

// Lowercase hex SHA-256 of the file's bytes. Throws IoError.
std::string Sha256File(const std::filesystem::path& path);
std::string Sha256Hex(const std::string& bytes);

// Seconds since the epoch as "YYYY-MM-DDTHH:MM:SSZ".
std::string UtcTimestamp();

class RunManifest {
 public:
  RunManifest(std::string command, std::vector<std::string> args);

  void SetConfig(nlohmann::json config) { config_ = std::move(config); }
  void SetSeed(std::optional<unsigned long long> seed) { seed_ = seed; }
  void AddInput(const std::filesystem::path& path);
  void AddOutput(const std::filesystem::path& path);
  void Finish();

  nlohmann::json ToJson() const;
  // Writes manifest.json into `dir`.
  void Write(const std::filesystem::path& dir) const;

 private:
  struct FileDigest {
    std::string path;
    std::string sha256;
    std::uintmax_t bytes = 0;
  };

  std::string command_;
  std::vector<std::string> args_;
  nlohmann::json config_ = nlohmann::json::object();
  std::optional<unsigned long long> seed_;
  std::vector<FileDigest> inputs_;
  std::vector<FileDigest> outputs_;
  std::string started_at_;
  std::string finished_at_;
};

}  // namespace fairbound::cli

#endif  // FAIRBOUND_TOOLS_MANIFEST_H_

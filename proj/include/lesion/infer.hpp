// Copyright 2026 The Lesion Toolkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <chrono>
#include <span>
#include <string>
#include <sys/types.h>

#include "lesion/datamodel.hpp"

namespace lesion {

/// Line protocol spoken with an external model process: for each request the
/// backend reads one image path terminated by '\n' on stdin and answers with
/// one line of nine comma-separated non-negative confidences on stdout, in
/// canonical category order. Requests are answered in order.
struct BackendOptions {
  /// Run through /bin/sh -c.
  std::string command;
  std::chrono::milliseconds timeout{30000};
};

/// A running backend process. Killed on destruction if still alive.
class BackendProcess {
 public:
  explicit BackendProcess(const BackendOptions& options);
  ~BackendProcess();
  BackendProcess(const BackendProcess&) = delete;
  BackendProcess& operator=(const BackendProcess&) = delete;

  /// Sends one request line and returns the raw reply line (without '\n').
  /// Throws on timeout or if the backend has exited.
  std::string request(const std::string& line);

  /// Closes the backend's stdin and reaps it.
  void finish();

 private:
  std::string read_line();
  void kill_now();

  BackendOptions options_;
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
};

/// Parses one reply line. Throws naming the line on arity or number errors.
std::vector<double> parse_backend_reply(std::string_view line, std::size_t request_no);

/// Queries the backend for each path and assembles the rows in input order
/// under the given ids.
PredictionSet infer(const BackendOptions& options, std::span<const std::string> image_paths,
                    std::span<const std::string> image_ids);

/// Same, for every record of a manifest, ids taken from the file stems.
PredictionSet infer(const BackendOptions& options, const Manifest& manifest);

}  // namespace lesion

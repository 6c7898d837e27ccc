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

#include "lesion/infer.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <csignal>
#include <cstring>
#include <thread>

#include <fcntl.h>
#include <poll.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include "lesion/category.hpp"
#include "lesion/error.hpp"

extern char** environ;

namespace lesion {
namespace {

void close_fd(int& fd) {
  if (fd >= 0) {
    ::close(fd);
    fd = -1;
  }
}

std::string excerpt(std::string_view line) {
  constexpr std::size_t kMax = 200;
  if (line.size() <= kMax) return std::string(line);
  return std::string(line.substr(0, kMax)) + "...";
}

}  // namespace

BackendProcess::BackendProcess(const BackendOptions& options) : options_(options) {
  if (options_.command.empty()) throw Error("no backend command given");
  // A backend that dies mid-request must surface as an error, not a signal.
  std::signal(SIGPIPE, SIG_IGN);

  int in_pipe[2];
  int out_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) throw Error("pipe: " + std::string(std::strerror(errno)));
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw Error("pipe: " + std::string(std::strerror(errno)));
  }

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);

  // Own process group, so a timeout also takes down anything the shell started.
  posix_spawnattr_t attr;
  posix_spawnattr_init(&attr);
  posix_spawnattr_setpgroup(&attr, 0);
  posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETPGROUP);

  std::string cmd = options_.command;
  char sh[] = "/bin/sh";
  char dash_c[] = "-c";
  char* argv[] = {sh, dash_c, cmd.data(), nullptr};
  const int rc = ::posix_spawn(&pid_, "/bin/sh", &actions, &attr, argv, environ);
  posix_spawn_file_actions_destroy(&actions);
  posix_spawnattr_destroy(&attr);
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  if (rc != 0) {
    pid_ = -1;
    close_fd(to_child_);
    close_fd(from_child_);
    throw Error("cannot start backend '" + options_.command + "': " + std::strerror(rc));
  }
}

BackendProcess::~BackendProcess() {
  if (pid_ > 0) kill_now();
  close_fd(to_child_);
  close_fd(from_child_);
}

void BackendProcess::kill_now() {
  close_fd(to_child_);
  close_fd(from_child_);
  if (pid_ > 0) {
    ::kill(-pid_, SIGKILL);
    int status = 0;
    ::waitpid(pid_, &status, 0);
    pid_ = -1;
  }
}

std::string BackendProcess::request(const std::string& line) {
  if (to_child_ < 0) throw Error("backend is not running");
  std::string msg = line + "\n";
  std::size_t written = 0;
  while (written < msg.size()) {
    const ssize_t n = ::write(to_child_, msg.data() + written, msg.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      // The backend may have answered before going away; surface that reply.
      close_fd(to_child_);
      return read_line();
    }
    written += static_cast<std::size_t>(n);
  }
  return read_line();
}

std::string BackendProcess::read_line() {
  using Clock = std::chrono::steady_clock;
  const auto deadline = Clock::now() + options_.timeout;
  while (true) {
    const auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string out = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (!out.empty() && out.back() == '\r') out.pop_back();
      return out;
    }
    const auto remaining =
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
    if (remaining <= 0) {
      kill_now();
      throw Error("backend timed out after " + std::to_string(options_.timeout.count()) + " ms");
    }
    pollfd pfd{from_child_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, static_cast<int>(remaining));
    if (ready < 0) {
      if (errno == EINTR) continue;
      kill_now();
      throw Error("poll failed: " + std::string(std::strerror(errno)));
    }
    if (ready == 0) continue;
    char chunk[4096];
    const ssize_t n = ::read(from_child_, chunk, sizeof(chunk));
    if (n < 0) {
      if (errno == EINTR) continue;
      kill_now();
      throw Error("reading from backend failed: " + std::string(std::strerror(errno)));
    }
    if (n == 0) {
      kill_now();
      std::string msg = "backend exited before completion";
      if (!buffer_.empty()) msg += " (partial line '" + excerpt(buffer_) + "')";
      throw Error(msg);
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

void BackendProcess::finish() {
  close_fd(to_child_);
  if (pid_ <= 0) return;
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(5);
  while (std::chrono::steady_clock::now() < deadline) {
    int status = 0;
    const pid_t r = ::waitpid(pid_, &status, WNOHANG);
    if (r == pid_ || r < 0) {
      pid_ = -1;
      close_fd(from_child_);
      return;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  kill_now();
}

std::vector<double> parse_backend_reply(std::string_view line, std::size_t request_no) {
  auto fail = [&](const std::string& why) {
    return Error("backend protocol error on reply " + std::to_string(request_no) + " (" + why +
                 "): '" + excerpt(line) + "'");
  };
  std::vector<double> values;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    std::string_view field =
        line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) field.remove_suffix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
      throw fail("non-numeric field '" + std::string(field) + "'");
    }
    if (!std::isfinite(v) || v < 0.0) throw fail("confidence must be finite and >= 0");
    values.push_back(v);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (values.size() != kNumCategories) {
    throw fail("expected " + std::to_string(kNumCategories) + " values, got " +
               std::to_string(values.size()));
  }
  return values;
}

PredictionSet infer(const BackendOptions& options, std::span<const std::string> image_paths,
                    std::span<const std::string> image_ids) {
  if (image_paths.size() != image_ids.size()) throw Error("one id per image path is required");
  BackendProcess backend(options);
  std::vector<double> values;
  values.reserve(image_paths.size() * kNumCategories);
  for (std::size_t i = 0; i < image_paths.size(); ++i) {
    if (image_paths[i].find('\n') != std::string::npos) {
      throw Error("image path contains a newline: '" + image_paths[i] + "'");
    }
    std::string reply;
    try {
      reply = backend.request(image_paths[i]);
    } catch (const Error& e) {
      throw Error(std::string(e.what()) + " on request " + std::to_string(i + 1) + ": " + image_paths[i]);
    }
    const auto row = parse_backend_reply(reply, i + 1);
    values.insert(values.end(), row.begin(), row.end());
  }
  backend.finish();
  return PredictionSet(std::vector<std::string>(image_ids.begin(), image_ids.end()), std::move(values));
}

PredictionSet infer(const BackendOptions& options, const Manifest& manifest) {
  std::vector<std::string> paths;
  std::vector<std::string> ids;
  for (const auto& r : manifest.records) {
    paths.push_back(r.path);
    ids.push_back(image_id_from_path(r.path));
  }
  return infer(options, paths, ids);
}

}  // namespace lesion

// Copyright 2026 The discex Authors.
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

// JSON Lines client for the language-model sidecar.
//
// Requests and responses are single-line JSON objects carrying an integer
// "id". Responses are matched to requests by id, never by arrival order.
// Endpoints:
//
//   tcp://HOST:PORT    stream socket
//   exec:COMMAND       spawn COMMAND via /bin/sh and talk over its stdio

#ifndef DISCEX_SIDECAR_HPP_
#define DISCEX_SIDECAR_HPP_

#include <netdb.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdint>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "json.hpp"

#include "discex/errors.hpp"

namespace discex {

// A bidirectional line-oriented transport.
class LineChannel {
 public:
  virtual ~LineChannel() = default;
  // `line` must not contain a newline; the channel appends one.
  virtual void write_line(std::string_view line) = 0;
  // Next line without its terminator; std::nullopt at end of stream.
  virtual std::optional<std::string> read_line() = 0;
};

namespace internal {

class FdReader {
 public:
  explicit FdReader(int fd) : fd_(fd) {}

  std::optional<std::string> read_line() {
    for (;;) {
      if (const size_t nl = buffer_.find('\n'); nl != std::string::npos) {
        std::string line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
      }
      char chunk[4096];
      const ssize_t n = ::read(fd_, chunk, sizeof(chunk));
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) {
        if (buffer_.empty()) return std::nullopt;
        std::string line = std::move(buffer_);
        buffer_.clear();
        return line;
      }
      buffer_.append(chunk, static_cast<size_t>(n));
    }
  }

 private:
  int fd_;
  std::string buffer_;
};

inline void write_all(int fd, std::string_view data, bool socket) {
  size_t off = 0;
  while (off < data.size()) {
    const ssize_t n =
        socket ? ::send(fd, data.data() + off, data.size() - off, MSG_NOSIGNAL)
               : ::write(fd, data.data() + off, data.size() - off);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) {
      throw BackendError(std::string("sidecar write failed: ") +
                         std::strerror(errno));
    }
    off += static_cast<size_t>(n);
  }
}

}  // namespace internal

// Child process speaking the protocol on stdin/stdout.
class ProcessChannel : public LineChannel {
 public:
  explicit ProcessChannel(const std::string& command) {
    // A dead child must surface as a write error, not a signal.
    ::signal(SIGPIPE, SIG_IGN);
    int to_child[2];
    int from_child[2];
    if (::pipe(to_child) != 0) throw BackendError("pipe() failed");
    if (::pipe(from_child) != 0) {
      ::close(to_child[0]);
      ::close(to_child[1]);
      throw BackendError("pipe() failed");
    }
    pid_ = ::fork();
    if (pid_ < 0) throw BackendError("fork() failed");
    if (pid_ == 0) {
      ::dup2(to_child[0], STDIN_FILENO);
      ::dup2(from_child[1], STDOUT_FILENO);
      ::close(to_child[0]);
      ::close(to_child[1]);
      ::close(from_child[0]);
      ::close(from_child[1]);
      ::execl("/bin/sh", "sh", "-c", command.c_str(),
              static_cast<char*>(nullptr));
      ::_exit(127);
    }
    ::close(to_child[0]);
    ::close(from_child[1]);
    write_fd_ = to_child[1];
    read_fd_ = from_child[0];
    reader_ = std::make_unique<internal::FdReader>(read_fd_);
  }

  ProcessChannel(const ProcessChannel&) = delete;
  ProcessChannel& operator=(const ProcessChannel&) = delete;

  ~ProcessChannel() override {
    if (write_fd_ >= 0) ::close(write_fd_);
    if (read_fd_ >= 0) ::close(read_fd_);
    if (pid_ > 0) {
      int status = 0;
      ::waitpid(pid_, &status, 0);
    }
  }

  void write_line(std::string_view line) override {
    std::string data(line);
    data.push_back('\n');
    internal::write_all(write_fd_, data, /*socket=*/false);
  }

  std::optional<std::string> read_line() override {
    return reader_->read_line();
  }

 private:
  pid_t pid_ = -1;
  int write_fd_ = -1;
  int read_fd_ = -1;
  std::unique_ptr<internal::FdReader> reader_;
};

class TcpChannel : public LineChannel {
 public:
  TcpChannel(const std::string& host, const std::string& port) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    if (const int rc = ::getaddrinfo(host.c_str(), port.c_str(), &hints, &res);
        rc != 0) {
      throw BackendError("cannot resolve " + host + ":" + port + ": " +
                         ::gai_strerror(rc));
    }
    for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
      fd_ = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
      if (fd_ < 0) continue;
      if (::connect(fd_, ai->ai_addr, ai->ai_addrlen) == 0) break;
      ::close(fd_);
      fd_ = -1;
    }
    ::freeaddrinfo(res);
    if (fd_ < 0) {
      throw BackendError("cannot connect to sidecar at " + host + ":" + port);
    }
    reader_ = std::make_unique<internal::FdReader>(fd_);
  }

  TcpChannel(const TcpChannel&) = delete;
  TcpChannel& operator=(const TcpChannel&) = delete;

  ~TcpChannel() override {
    if (fd_ >= 0) ::close(fd_);
  }

  void write_line(std::string_view line) override {
    std::string data(line);
    data.push_back('\n');
    internal::write_all(fd_, data, /*socket=*/true);
  }

  std::optional<std::string> read_line() override {
    return reader_->read_line();
  }

 private:
  int fd_ = -1;
  std::unique_ptr<internal::FdReader> reader_;
};

inline std::unique_ptr<LineChannel> open_channel(std::string_view endpoint) {
  constexpr std::string_view kTcp = "tcp://";
  constexpr std::string_view kExec = "exec:";
  if (endpoint.substr(0, kTcp.size()) == kTcp) {
    const std::string_view hostport = endpoint.substr(kTcp.size());
    const size_t colon = hostport.rfind(':');
    if (colon == std::string_view::npos || colon == 0 ||
        colon + 1 == hostport.size()) {
      throw ConfigError("sidecar endpoint needs host:port: " +
                        std::string(endpoint));
    }
    return std::make_unique<TcpChannel>(std::string(hostport.substr(0, colon)),
                                        std::string(hostport.substr(colon + 1)));
  }
  if (endpoint.substr(0, kExec.size()) == kExec &&
      endpoint.size() > kExec.size()) {
    return std::make_unique<ProcessChannel>(
        std::string(endpoint.substr(kExec.size())));
  }
  throw ConfigError("unsupported sidecar endpoint '" + std::string(endpoint) +
                    "' (expected tcp://HOST:PORT or exec:COMMAND)");
}

// Thread-safe request/response client. Concurrent callers are serialized;
// stray responses for other ids are parked until claimed.
class SidecarClient {
 public:
  explicit SidecarClient(std::unique_ptr<LineChannel> channel)
      : channel_(std::move(channel)) {}

  // Assigns an id to `request`, sends it and returns the matching response
  // object. Error responses and transport failures become BackendError.
  nlohmann::json call(nlohmann::json request) {
    std::lock_guard<std::mutex> lock(mu_);
    const int64_t id = next_id_++;
    request["id"] = id;
    try {
      channel_->write_line(request.dump());
    } catch (const BackendError& e) {
      throw BackendError("sidecar transport failure (request id " +
                         std::to_string(id) + "): " + e.what());
    }
    for (;;) {
      if (auto it = parked_.find(id); it != parked_.end()) {
        nlohmann::json response = std::move(it->second);
        parked_.erase(it);
        return check(id, std::move(response));
      }
      std::optional<std::string> line = channel_->read_line();
      if (!line) {
        throw BackendError("sidecar transport failure (request id " +
                           std::to_string(id) + "): stream closed");
      }
      nlohmann::json response;
      try {
        response = nlohmann::json::parse(*line);
      } catch (const nlohmann::json::exception& e) {
        throw BackendError("sidecar sent malformed JSON (request id " +
                           std::to_string(id) + "): " + e.what());
      }
      if (!response.is_object() || !response.contains("id") ||
          !response["id"].is_number_integer()) {
        throw BackendError("sidecar response without integer id (request id " +
                           std::to_string(id) + ")");
      }
      const int64_t rid = response["id"].get<int64_t>();
      if (rid == id) return check(id, std::move(response));
      parked_.emplace(rid, std::move(response));
    }
  }

 private:
  static nlohmann::json check(int64_t id, nlohmann::json response) {
    if (response.contains("error")) {
      const auto& err = response["error"];
      throw BackendError("sidecar error (request id " + std::to_string(id) +
                         "): " + (err.is_string() ? err.get<std::string>()
                                                  : err.dump()));
    }
    return response;
  }

  std::mutex mu_;
  std::unique_ptr<LineChannel> channel_;
  int64_t next_id_ = 1;
  std::map<int64_t, nlohmann::json> parked_;
};

}  // namespace discex

#endif  // DISCEX_SIDECAR_HPP_

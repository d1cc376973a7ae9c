// Copyright 2026 The protoscore Authors.
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

// Reward service: newline-delimited JSON requests in, one response line per
// request out, over a stream pair (stdio) or a TCP port.
//
// Request:  {"id": str, "group_id"?: str, "prediction": str,
//            "reference": {gold reference}, "config_override"?: {partial config}}
// Response: {"id", "group_id"?, "score", "gates": {"format", "consistency"},
//            "components": {"scale", "order", "semantic_avg"},
//            "metrics": {...}, "error": null | {"kind", "detail"}}

#ifndef PROTOSCORE_SERVICE_HPP_
#define PROTOSCORE_SERVICE_HPP_

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <iostream>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <thread>
#include <unordered_set>
#include <utility>
#include <vector>

#include "protoscore/corpus.hpp"
#include "protoscore/score.hpp"
#include "protoscore/types.hpp"

namespace protoscore {

struct RewardRequest {
  std::string id;
  std::optional<std::string> group_id;
  std::string prediction;
  GoldReference reference;
  std::optional<json> config_override;
};

struct RewardError {
  std::string kind;  // bad_request | bad_config | duplicate_id
  std::string detail;
};

struct RewardResponse {
  json id;  // string, or null when the request carried no usable id
  std::optional<std::string> group_id;
  Evaluation evaluation;
  std::optional<RewardError> error;
};

/// Validates a decoded request. Throws SchemaError with a field path.
inline RewardRequest request_from_json(const json& j) {
  if (!j.is_object()) throw SchemaError("", "request must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key != "id" && key != "group_id" && key != "prediction" && key != "reference" && key != "config_override") {
      throw SchemaError(key, "unknown request field");
    }
  }
  RewardRequest req;
  if (!j.contains("id") || !j.at("id").is_string()) throw SchemaError("id", "expected a string");
  req.id = j.at("id").get<std::string>();
  if (j.contains("group_id") && !j.at("group_id").is_null()) {
    if (!j.at("group_id").is_string()) throw SchemaError("group_id", "expected a string");
    req.group_id = j.at("group_id").get<std::string>();
  }
  if (!j.contains("prediction") || !j.at("prediction").is_string()) {
    throw SchemaError("prediction", "expected a string");
  }
  req.prediction = j.at("prediction").get<std::string>();
  if (!j.contains("reference")) throw SchemaError("reference", "missing field");
  try {
    req.reference = gold_from_json(j.at("reference"));
  } catch (const SchemaError& e) {
    throw SchemaError(e.path().empty() ? "reference" : "reference." + e.path(), "invalid reference");
  }
  if (j.contains("config_override") && !j.at("config_override").is_null()) {
    req.config_override = j.at("config_override");
  }
  return req;
}

inline json response_to_json(const RewardResponse& r) {
  const ScoreReport& rep = r.evaluation.report;
  json out{{"id", r.id},
           {"score", rep.score},
           {"gates", {{"format", rep.format_gate}, {"consistency", rep.consistency_gate}}},
           {"components", {{"scale", rep.r_scale}, {"order", rep.order}, {"semantic_avg", rep.semantic_avg}}},
           {"metrics", row_to_json(r.evaluation.row)}};
  if (r.group_id) out["group_id"] = *r.group_id;
  out["error"] = r.error ? json{{"kind", r.error->kind}, {"detail", r.error->detail}} : json(nullptr);
  return out;
}

inline RewardResponse error_response(json id, std::string kind, std::string detail) {
  RewardResponse r;
  r.id = std::move(id);
  r.error = RewardError{std::move(kind), std::move(detail)};
  return r;
}

/// Best-effort id of a decoded line, for error responses.
inline json request_id_of(const json& j) {
  if (j.is_object() && j.contains("id") && j.at("id").is_string()) return j.at("id");
  return nullptr;
}

/// Scores one decoded request. Never throws; problems become error responses
/// with score 0.
inline RewardResponse handle_request(const json& j, const ScoreConfig& base) {
  RewardRequest req;
  try {
    req = request_from_json(j);
  } catch (const SchemaError& e) {
    return error_response(request_id_of(j), "bad_request", e.what());
  }
  ScoreConfig cfg = base;
  if (req.config_override) {
    try {
      cfg = apply_config_patch(base, *req.config_override);
    } catch (const SchemaError& e) {
      auto r = error_response(req.id, "bad_config", e.what());
      r.group_id = req.group_id;
      return r;
    }
  }
  RewardResponse r;
  r.id = req.id;
  r.group_id = req.group_id;
  try {
    r.evaluation = evaluate(req.prediction, req.reference, cfg);
    r.evaluation.row.id = req.id;
  } catch (const std::exception& e) {
    return error_response(req.id, "internal", e.what());
  }
  return r;
}

inline RewardResponse handle_request_line(std::string_view line, const ScoreConfig& base) {
  const json j = json::parse(line, nullptr, false);
  if (j.is_discarded()) return error_response(nullptr, "bad_request", "request line is not valid JSON");
  return handle_request(j, base);
}

namespace detail {

// Fixed-size worker pool with a bounded FIFO queue.
class WorkerPool {
 public:
  explicit WorkerPool(unsigned workers, std::size_t capacity = 1024) : capacity_(capacity) {
    workers = std::max(1u, workers);
    for (unsigned i = 0; i < workers; ++i) threads_.emplace_back([this] { run(); });
  }

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  ~WorkerPool() {
    {
      std::lock_guard lock(mu_);
      closed_ = true;
    }
    ready_.notify_all();
    for (auto& t : threads_) t.join();
  }

  void submit(std::function<void()> job) {
    std::unique_lock lock(mu_);
    space_.wait(lock, [this] { return queue_.size() < capacity_; });
    queue_.push_back(std::move(job));
    lock.unlock();
    ready_.notify_one();
  }

 private:
  void run() {
    for (;;) {
      std::function<void()> job;
      {
        std::unique_lock lock(mu_);
        ready_.wait(lock, [this] { return closed_ || !queue_.empty(); });
        if (queue_.empty()) return;
        job = std::move(queue_.front());
        queue_.pop_front();
      }
      space_.notify_one();
      job();
    }
  }

  std::size_t capacity_;
  std::mutex mu_;
  std::condition_variable ready_, space_;
  std::deque<std::function<void()>> queue_;
  bool closed_ = false;
  std::vector<std::thread> threads_;
};

// Tracks in-flight jobs of one connection so it can drain before closing.
class InFlight {
 public:
  void begin() {
    std::lock_guard lock(mu_);
    ++count_;
  }
  void end() {
    std::lock_guard lock(mu_);
    if (--count_ == 0) idle_.notify_all();
  }
  void wait_idle() {
    std::unique_lock lock(mu_);
    idle_.wait(lock, [this] { return count_ == 0; });
  }

 private:
  std::mutex mu_;
  std::condition_variable idle_;
  std::size_t count_ = 0;
};

// Reads request lines via `next_line`, scores them on `pool` and hands each
// response line (with trailing newline) to `write_line`, which must be
// thread-safe. Returns once every request has been answered.
template <class NextLine, class WriteLine>
void serve_lines(NextLine&& next_line, WriteLine&& write_line, const ScoreConfig& cfg, WorkerPool* pool) {
  std::unordered_set<std::string> seen_ids;
  InFlight inflight;
  std::string line;
  while (next_line(line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      write_line(dump_line(response_to_json(error_response(nullptr, "bad_request", "request line is not valid JSON"))) + "\n");
      continue;
    }
    const json id = request_id_of(j);
    if (id.is_string() && !seen_ids.insert(id.get<std::string>()).second) {
      write_line(dump_line(response_to_json(error_response(id, "duplicate_id", "id already used on this connection"))) + "\n");
      continue;
    }
    if (pool == nullptr) {
      write_line(dump_line(response_to_json(handle_request(j, cfg))) + "\n");
      continue;
    }
    inflight.begin();
    pool->submit([&, j = std::move(j)] {
      write_line(dump_line(response_to_json(handle_request(j, cfg))) + "\n");
      inflight.end();
    });
  }
  inflight.wait_idle();
}

inline bool send_all(int fd, std::string_view data) {
  while (!data.empty()) {
    const ssize_t n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
  return true;
}

}  // namespace detail

/// Serves requests from `in` until end of input. With workers > 1 responses
/// may arrive out of request order; each is written as one complete line.
inline void serve_stream(std::istream& in, std::ostream& out, const ScoreConfig& cfg, unsigned workers = 1) {
  std::mutex out_mu;
  auto write_line = [&](const std::string& s) {
    std::lock_guard lock(out_mu);
    out << s << std::flush;
  };
  auto next_line = [&](std::string& line) { return static_cast<bool>(std::getline(in, line)); };
  if (workers <= 1) {
    detail::serve_lines(next_line, write_line, cfg, nullptr);
    return;
  }
  detail::WorkerPool pool(workers);
  detail::serve_lines(next_line, write_line, cfg, &pool);
}

struct TcpOptions {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;  // 0 picks an ephemeral port
  unsigned workers = 1;
};

/// Listens on host:port and serves every connection until `stop` is set.
/// `on_listening` receives the bound port. Throws std::system_error if the
/// socket cannot be set up.
inline void serve_tcp(const TcpOptions& opts, const ScoreConfig& cfg, const std::atomic<bool>& stop,
                      const std::function<void(std::uint16_t)>& on_listening = {}) {
  const int listener = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listener < 0) throw std::system_error(errno, std::generic_category(), "socket");
  auto close_listener = std::unique_ptr<int, void (*)(int*)>(new int(listener), [](int* fd) {
    ::close(*fd);
    delete fd;
  });
  const int yes = 1;
  ::setsockopt(listener, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(opts.port);
  if (::inet_pton(AF_INET, opts.host.c_str(), &addr.sin_addr) != 1) {
    throw std::system_error(EINVAL, std::generic_category(), "invalid host '" + opts.host + "'");
  }
  if (::bind(listener, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) {
    throw std::system_error(errno, std::generic_category(), "bind");
  }
  if (::listen(listener, 16) < 0) throw std::system_error(errno, std::generic_category(), "listen");
  socklen_t len = sizeof addr;
  ::getsockname(listener, reinterpret_cast<sockaddr*>(&addr), &len);
  if (on_listening) on_listening(ntohs(addr.sin_port));

  detail::WorkerPool pool(opts.workers);
  std::vector<std::jthread> connections;
  while (!stop.load()) {
    pollfd pfd{listener, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, 100);
    if (ready < 0) {
      if (errno == EINTR) continue;
      throw std::system_error(errno, std::generic_category(), "poll");
    }
    if (ready == 0) continue;
    const int fd = ::accept(listener, nullptr, nullptr);
    if (fd < 0) continue;
    connections.emplace_back([fd, &cfg, &pool, &stop] {
      std::mutex write_mu;
      bool broken = false;
      auto write_line = [&](const std::string& s) {
        std::lock_guard lock(write_mu);
        if (!broken) broken = !detail::send_all(fd, s);
      };
      std::string buffer;
      auto next_line = [&](std::string& line) {
        for (;;) {
          const auto nl = buffer.find('\n');
          if (nl != std::string::npos) {
            line.assign(buffer, 0, nl);
            buffer.erase(0, nl + 1);
            return true;
          }
          pollfd cfd{fd, POLLIN, 0};
          const int r = ::poll(&cfd, 1, 100);
          if (r == 0) {
            if (stop.load()) return false;
            continue;
          }
          if (r < 0 && errno == EINTR) continue;
          char chunk[8192];
          const ssize_t n = r < 0 ? -1 : ::recv(fd, chunk, sizeof chunk, 0);
          if (n < 0 && errno == EINTR) continue;
          if (n <= 0) {
            if (buffer.empty()) return false;
            line = std::move(buffer);
            buffer.clear();
            return true;
          }
          buffer.append(chunk, static_cast<std::size_t>(n));
        }
      };
      detail::serve_lines(next_line, write_line, cfg, &pool);
      ::close(fd);
    });
  }
}

}  // namespace protoscore

#endif  // PROTOSCORE_SERVICE_HPP_

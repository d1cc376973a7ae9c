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

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cmath>
#include <future>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <gtest/gtest.h>

#include "protoscore/advantages.hpp"
#include "protoscore/service.hpp"
#include "support/fuzz.hpp"

namespace protoscore {
namespace {

TEST(GroupAdvantages, ThreeRewards) {
  const std::vector<double> a = group_advantages(std::vector<double>{1, 2, 3});
  ASSERT_EQ(a.size(), 3u);
  EXPECT_NEAR(a[0], -1.224744871391589, 1e-9);
  EXPECT_EQ(a[1], 0.0);
  EXPECT_NEAR(a[2], 1.224744871391589, 1e-9);
}

TEST(GroupAdvantages, ConstantGroupIsZero) {
  EXPECT_EQ(group_advantages(std::vector<double>{0.4, 0.4, 0.4}), (std::vector<double>{0, 0, 0}));
  EXPECT_EQ(group_advantages(std::vector<double>{7}), (std::vector<double>{0}));
}

TEST(GroupAdvantages, TwoRewards) {
  EXPECT_EQ(group_advantages(std::vector<double>{0, 1}), (std::vector<double>{-1, 1}));
}

TEST(GroupAdvantages, EmptyIsAnError) {
  EXPECT_THROW(group_advantages(std::vector<double>{}), std::invalid_argument);
}

TEST(GroupAdvantages, ZeroMeanUnitStd) {
  std::mt19937_64 rng(103);
  std::uniform_real_distribution<double> reward(-2.0, 3.0);
  for (int i = 0; i < 500; ++i) {
    std::vector<double> r(2 + rng() % 15);
    for (auto& v : r) v = reward(rng);
    const auto a = group_advantages(r);
    const double sum = std::accumulate(a.begin(), a.end(), 0.0);
    double sq = 0.0;
    for (double v : a) sq += v * v;
    ASSERT_NEAR(sum, 0.0, 1e-9);
    ASSERT_NEAR(std::sqrt(sq / static_cast<double>(a.size())), 1.0, 1e-9);
  }
}

json perfect_request(const std::string& id, std::mt19937_64& rng) {
  const auto steps = fuzz::random_steps(rng);
  return json{{"id", id},
              {"group_id", "q1"},
              {"prediction", fuzz::render_output(steps)},
              {"reference", gold_to_json(fuzz::to_gold("ref-" + id, steps))}};
}

TEST(HandleRequest, PerfectPredictionScoresOne) {
  std::mt19937_64 rng(107);
  const json resp = response_to_json(handle_request_line(perfect_request("r1", rng).dump(), ScoreConfig{}));
  EXPECT_EQ(resp["id"], "r1");
  EXPECT_EQ(resp["group_id"], "q1");
  EXPECT_EQ(resp["score"], 1.0);
  EXPECT_EQ(resp["gates"]["format"], true);
  EXPECT_EQ(resp["gates"]["consistency"], true);
  EXPECT_EQ(resp["components"]["semantic_avg"], 1.5);
  EXPECT_EQ(resp["metrics"]["step_m"], 1.0);
  EXPECT_TRUE(resp["error"].is_null());
}

TEST(HandleRequest, NotJson) {
  const json resp = response_to_json(handle_request_line("not json", ScoreConfig{}));
  EXPECT_EQ(resp["error"]["kind"], "bad_request");
  EXPECT_EQ(resp["score"], 0.0);
  EXPECT_TRUE(resp["id"].is_null());
}

TEST(HandleRequest, BadReferenceNamesField) {
  json req = json::parse(R"({"id":"x","prediction":"","reference":{"id":"g","steps":[{"action":"","objects":[],"parameters":[]}]}})");
  const json resp = response_to_json(handle_request(req, ScoreConfig{}));
  EXPECT_EQ(resp["id"], "x");
  EXPECT_EQ(resp["error"]["kind"], "bad_request");
  EXPECT_NE(resp["error"]["detail"].get<std::string>().find("reference.steps[0].action"), std::string::npos);
  EXPECT_EQ(resp["score"], 0.0);
}

TEST(HandleRequest, ConfigOverride) {
  std::mt19937_64 rng(109);
  json req = perfect_request("r2", rng);
  req["config_override"] = json{{"reward_range", "scaled"}};
  EXPECT_EQ(response_to_json(handle_request(req, ScoreConfig{}))["score"], 5.0);
  req["config_override"] = json{{"reward_range", "bogus"}};
  const json bad = response_to_json(handle_request(req, ScoreConfig{}));
  EXPECT_EQ(bad["error"]["kind"], "bad_config");
  EXPECT_EQ(bad["score"], 0.0);
}

TEST(HandleRequest, GateFailureIsNotAnError) {
  json req = json{{"id", "r3"}, {"prediction", "garbage"},
                  {"reference", json::parse(R"({"id":"g","steps":[{"action":"mix","objects":[],"parameters":[]}]})")}};
  const json resp = response_to_json(handle_request(req, ScoreConfig{}));
  EXPECT_TRUE(resp["error"].is_null());
  EXPECT_EQ(resp["gates"]["format"], false);
  EXPECT_EQ(resp["score"], 0.0);
}

std::vector<json> read_lines(const std::string& text) {
  std::vector<json> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(json::parse(line));
  return out;
}

TEST(ServeStream, PipelinedRequestsAnsweredOnce) {
  std::mt19937_64 rng(113);
  std::ostringstream requests;
  std::map<std::string, double> expected;
  for (int i = 0; i < 1000; ++i) {
    const std::string id = "req-" + std::to_string(i);
    json req = perfect_request(id, rng);
    if (i % 3 == 0) req["prediction"] = fuzz::render_output(fuzz::random_steps(rng));
    expected[id] = score(req["prediction"].get<std::string>(), gold_from_json(req["reference"]), ScoreConfig{}).score;
    requests << req.dump() << '\n';
  }
  std::istringstream in(requests.str());
  std::ostringstream out;
  serve_stream(in, out, ScoreConfig{}, 4);
  const auto responses = read_lines(out.str());
  ASSERT_EQ(responses.size(), 1000u);
  std::set<std::string> ids;
  for (const auto& r : responses) {
    const std::string id = r["id"].get<std::string>();
    ASSERT_TRUE(ids.insert(id).second) << id;
    ASSERT_EQ(r["score"].get<double>(), expected.at(id));
  }
  EXPECT_EQ(ids.size(), 1000u);
}

TEST(ServeStream, MalformedLinesDoNotStopTheLoop) {
  std::mt19937_64 rng(127);
  std::string input = "not json\n" + perfect_request("a", rng).dump() + "\n\n{\"id\":\"b\"}\n" +
                      perfect_request("a", rng).dump() + "\n";
  std::istringstream in(input);
  std::ostringstream out;
  serve_stream(in, out, ScoreConfig{}, 1);
  const auto responses = read_lines(out.str());
  ASSERT_EQ(responses.size(), 4u);
  EXPECT_EQ(responses[0]["error"]["kind"], "bad_request");
  EXPECT_EQ(responses[1]["score"], 1.0);
  EXPECT_EQ(responses[2]["id"], "b");
  EXPECT_EQ(responses[2]["error"]["kind"], "bad_request");
  EXPECT_EQ(responses[3]["error"]["kind"], "duplicate_id");
}

TEST(ServeStream, ResponsesIndependentOfConcurrency) {
  std::mt19937_64 rng(131);
  std::ostringstream requests;
  for (int i = 0; i < 200; ++i) {
    json req = perfect_request("id" + std::to_string(i), rng);
    req["prediction"] = fuzz::render_output(fuzz::random_steps(rng));
    requests << req.dump() << '\n';
  }
  auto run = [&](unsigned workers) {
    std::istringstream in(requests.str());
    std::ostringstream out;
    serve_stream(in, out, ScoreConfig{}, workers);
    std::map<std::string, std::string> by_id;
    for (const auto& r : read_lines(out.str())) by_id[r["id"].get<std::string>()] = r.dump();
    return by_id;
  };
  EXPECT_EQ(run(1), run(8));
}

int connect_to(std::uint16_t port) {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  ::inet_pton(AF_INET, "127.0.0.1", &addr.sin_addr);
  if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    ::close(fd);
    return -1;
  }
  return fd;
}

TEST(ServeTcp, AnswersEveryRequestOnAConnection) {
  std::atomic<bool> stop{false};
  std::promise<std::uint16_t> bound;
  std::thread server([&] {
    serve_tcp({"127.0.0.1", 0, 4}, ScoreConfig{}, stop, [&](std::uint16_t p) { bound.set_value(p); });
  });
  const std::uint16_t port = bound.get_future().get();

  std::mt19937_64 rng(137);
  std::string payload = "not json\n";
  for (int i = 0; i < 100; ++i) payload += perfect_request("t" + std::to_string(i), rng).dump() + "\n";

  const int fd = connect_to(port);
  ASSERT_GE(fd, 0);
  ASSERT_TRUE(detail::send_all(fd, payload));
  ::shutdown(fd, SHUT_WR);
  std::string received;
  char buf[4096];
  for (ssize_t n; (n = ::recv(fd, buf, sizeof buf, 0)) > 0;) received.append(buf, static_cast<std::size_t>(n));
  ::close(fd);
  stop = true;
  server.join();

  const auto responses = read_lines(received);
  ASSERT_EQ(responses.size(), 101u);
  std::set<std::string> ids;
  std::size_t errors = 0;
  for (const auto& r : responses) {
    if (r["id"].is_null()) {
      ++errors;
      EXPECT_EQ(r["error"]["kind"], "bad_request");
      continue;
    }
    ids.insert(r["id"].get<std::string>());
    EXPECT_EQ(r["score"], 1.0);
  }
  EXPECT_EQ(errors, 1u);
  EXPECT_EQ(ids.size(), 100u);
}

TEST(ServeTcp, BindFailureThrows) {
  std::atomic<bool> stop{false};
  EXPECT_THROW(serve_tcp({"not-an-address", 0, 1}, ScoreConfig{}, stop), std::system_error);
}

}  // namespace
}  // namespace protoscore

#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "microswim/backends.hpp"

using namespace microswim::llm;
using namespace std::chrono_literals;

namespace {

std::string completion(const std::string& content) {
  return nlohmann::json{{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}}.dump();
}

class MockServer {
 public:
  explicit MockServer(std::function<void(const httplib::Request&, httplib::Response&)> handler) {
    server_.Post("/v1/chat/completions", [this, handler](const httplib::Request& req, httplib::Response& res) {
      {
        std::lock_guard lock(mu_);
        bodies_.push_back(req.body);
        auth_.push_back(req.get_header_value("Authorization"));
      }
      ++hits_;
      handler(req, res);
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~MockServer() {
    server_.stop();
    thread_.join();
  }

  HttpConfig config() const {
    HttpConfig cfg;
    cfg.endpoint = "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions";
    cfg.model = "test-model";
    cfg.timeout = 5000ms;
    cfg.backoff_base = 1ms;
    cfg.max_retries = 3;
    return cfg;
  }
  int hits() const { return hits_; }
  std::string body(std::size_t i) {
    std::lock_guard lock(mu_);
    return bodies_.at(i);
  }
  std::string auth(std::size_t i) {
    std::lock_guard lock(mu_);
    return auth_.at(i);
  }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  std::atomic<int> hits_{0};
  std::mutex mu_;
  std::vector<std::string> bodies_;
  std::vector<std::string> auth_;
};

}  // namespace

TEST(HttpBackend, ReturnsFirstChoice) {
  MockServer server([](const httplib::Request&, httplib::Response& res) {
    res.set_content(completion("DOF 2 ROC -1"), "application/json");
  });
  HttpBackend backend(server.config());
  EXPECT_EQ(backend.complete("hello", 0.0), "DOF 2 ROC -1");
  EXPECT_EQ(server.hits(), 1);
}

TEST(HttpBackend, SendsPromptModelAndTemperature) {
  ::setenv("MICROSWIM_API_KEY", "sk-test", 1);
  MockServer server([](const httplib::Request&, httplib::Response& res) {
    res.set_content(completion("ok"), "application/json");
  });
  HttpBackend backend(server.config());
  backend.complete("line one\nline two", 0.0);
  const auto body = nlohmann::json::parse(server.body(0));
  EXPECT_EQ(body["model"], "test-model");
  EXPECT_EQ(body["temperature"], 0.0);
  ASSERT_EQ(body["messages"].size(), 1u);
  EXPECT_EQ(body["messages"][0]["role"], "user");
  EXPECT_EQ(body["messages"][0]["content"], "line one\nline two");
  EXPECT_EQ(server.auth(0), "Bearer sk-test");
  ::unsetenv("MICROSWIM_API_KEY");
}

TEST(HttpBackend, RetriesServerErrors) {
  std::atomic<int> n{0};
  MockServer server([&n](const httplib::Request&, httplib::Response& res) {
    if (n++ == 0) {
      res.status = 500;
      return;
    }
    res.set_content(completion("DOF 1 ROC +1"), "application/json");
  });
  HttpBackend backend(server.config());
  EXPECT_EQ(backend.complete("p", 0.0), "DOF 1 ROC +1");
  EXPECT_EQ(server.hits(), 2);
}

TEST(HttpBackend, GivesUpAfterRetries) {
  MockServer server([](const httplib::Request&, httplib::Response& res) { res.status = 429; });
  HttpBackend backend(server.config());
  EXPECT_THROW(backend.complete("p", 0.0), BackendError);
  EXPECT_EQ(server.hits(), 4);
}

TEST(HttpBackend, AuthFailureIsNotRetried) {
  MockServer server([](const httplib::Request&, httplib::Response& res) { res.status = 401; });
  HttpBackend backend(server.config());
  EXPECT_THROW(backend.complete("p", 0.0), AuthError);
  EXPECT_EQ(server.hits(), 1);
}

TEST(HttpBackend, MalformedBody) {
  EXPECT_THROW(HttpBackend::extract_content("{\"choices\": []}"), BackendError);
  EXPECT_THROW(HttpBackend::extract_content("not json"), BackendError);
  EXPECT_EQ(HttpBackend::extract_content(completion("x")), "x");
}

TEST(HttpBackend, RejectsRelativeEndpoint) {
  HttpConfig cfg;
  cfg.endpoint = "localhost/v1";
  EXPECT_THROW(HttpBackend{cfg}, microswim::ConfigError);
}

TEST(CycleBackend, RepeatsCycle) {
  microswim::oracle::GaitCycle c;
  c.actions = {{1, 1}, {2, 1}};
  auto b = cycle_backend(c);
  EXPECT_EQ(b.complete("", 0.3), "DOF 1 ROC +1");
  EXPECT_EQ(b.complete("", 0.3), "DOF 2 ROC +1");
  EXPECT_EQ(b.complete("", 0.3), "DOF 1 ROC +1");
  EXPECT_EQ(b.last_temperature(), 0.3);
  EXPECT_THROW(cycle_backend({}), std::invalid_argument);
}

#include "microswim/backends.hpp"

#include <cstdlib>
#include <mutex>
#include <thread>

#include <json.hpp>

#ifdef MICROSWIM_HAVE_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

namespace microswim::llm {

std::string ScriptedBackend::complete(const std::string& prompt, double temperature) {
  last_temperature_ = temperature;
  return policy_(calls_++, prompt);
}

ScriptedBackend cycle_backend(const oracle::GaitCycle& cycle) {
  std::vector<std::string> lines;
  for (const auto& a : cycle.actions) lines.push_back(format_action(a));
  if (lines.empty()) throw std::invalid_argument("cycle_backend: empty cycle");
  return ScriptedBackend([lines](std::size_t call, const std::string&) {
    return lines[call % lines.size()];
  });
}

std::string ReplayBackend::complete(const std::string&, double) {
  if (next_ >= responses_.size())
    throw ReplayExhaustedError("replay backend exhausted after " + std::to_string(next_) + " responses");
  return responses_[next_++];
}

std::vector<std::string> responses_of(const std::vector<Exchange>& exchanges) {
  std::vector<std::string> out;
  out.reserve(exchanges.size());
  for (const auto& e : exchanges) out.push_back(e.response);
  return out;
}

namespace {

struct ParsedUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

ParsedUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("endpoint must be an absolute URL: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

void throttle(std::chrono::milliseconds min_interval) {
  if (min_interval.count() <= 0) return;
  static std::mutex mu;
  static std::chrono::steady_clock::time_point last{};
  std::lock_guard lock(mu);
  const auto now = std::chrono::steady_clock::now();
  if (now - last < min_interval) std::this_thread::sleep_for(min_interval - (now - last));
  last = std::chrono::steady_clock::now();
}

}  // namespace

HttpBackend::HttpBackend(HttpConfig cfg) : cfg_(std::move(cfg)) {
  split_url(cfg_.endpoint);
  if (const char* key = std::getenv(cfg_.api_key_env.c_str())) api_key_ = key;
}

std::string HttpBackend::request_body(const std::string& prompt, double temperature) const {
  nlohmann::json body = {
      {"model", cfg_.model},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
      {"temperature", temperature},
  };
  return body.dump();
}

std::string HttpBackend::extract_content(const std::string& body) {
  try {
    const auto j = nlohmann::json::parse(body);
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw BackendError(std::string("malformed chat completion: ") + e.what());
  }
}

std::string HttpBackend::complete(const std::string& prompt, double temperature) {
  const auto url = split_url(cfg_.endpoint);
  httplib::Client client(url.origin);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(cfg_.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(cfg_.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());

  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
  const std::string body = request_body(prompt, temperature);

  std::string last_error;
  for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(cfg_.backoff_base * (1 << (attempt - 1)));
    throttle(cfg_.min_interval);
    auto res = client.Post(url.path, headers, body, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 200) return extract_content(res->body);
    if (res->status == 401 || res->status == 403)
      throw AuthError("authentication failed (HTTP " + std::to_string(res->status) + ")");
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    throw BackendError("chat completion failed (HTTP " + std::to_string(res->status) + "): " + res->body);
  }
  throw BackendError("chat completion failed after retries: " + last_error);
}

}  // namespace microswim::llm

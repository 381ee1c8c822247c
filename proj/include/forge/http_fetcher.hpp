#pragma once

#include "forge/ingestion.hpp"

#include <httplib.h>

#include <chrono>
#include <mutex>
#include <thread>

namespace forge {

// Live archive access. Requests are spaced by the politeness delay across all
// threads; failures are retried with exponential backoff starting at the
// delay. A 404 means "no such resource" and is not retried.
class HttpFetcher final : public Fetcher {
 public:
  explicit HttpFetcher(HttpArchive source) : source_(std::move(source)) {
    const std::string& url = source_.base_url;
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw Error("not an http(s) URL: " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    origin_ = path_start == std::string::npos ? url : url.substr(0, path_start);
    prefix_ = path_start == std::string::npos ? "" : url.substr(path_start);
    while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
    if (source_.attempts < 1) source_.attempts = 1;
  }

  std::size_t max_concurrent() const override { return source_.max_concurrent; }

  std::optional<std::string> fetch(const std::string& path) override {
    const std::string target = prefix_ + "/" + path;
    std::chrono::milliseconds backoff(std::max<std::size_t>(source_.politeness_delay_ms, 1));
    std::string last_error;
    for (std::size_t attempt = 0; attempt < source_.attempts; ++attempt) {
      if (attempt > 0) {
        std::this_thread::sleep_for(backoff);
        backoff *= 2;
      }
      wait_turn();
      httplib::Client client(origin_);
      client.set_connection_timeout(10);
      client.set_read_timeout(30);
      client.set_follow_location(true);
      auto res = client.Get(target);
      if (!res) {
        last_error = httplib::to_string(res.error());
        continue;
      }
      if (res->status == 404) return std::nullopt;
      if (res->status >= 200 && res->status < 300) return res->body;
      last_error = "HTTP " + std::to_string(res->status);
    }
    throw Error("fetch failed after " + std::to_string(source_.attempts) + " attempts: " + origin_ + target + " (" +
                last_error + ")");
  }

 private:
  void wait_turn() {
    std::unique_lock lock(mutex_);
    const auto now = std::chrono::steady_clock::now();
    if (next_slot_ > now) std::this_thread::sleep_until(next_slot_);
    next_slot_ = std::chrono::steady_clock::now() + std::chrono::milliseconds(source_.politeness_delay_ms);
  }

  HttpArchive source_;
  std::string origin_;
  std::string prefix_;
  std::mutex mutex_;
  std::chrono::steady_clock::time_point next_slot_{};
};

inline std::unique_ptr<Fetcher> make_fetcher(const ArchiveSource& source) {
  if (const auto* http = std::get_if<HttpArchive>(&source)) return std::make_unique<HttpFetcher>(*http);
  return std::make_unique<FixtureFetcher>(std::get<FixtureArchive>(source).directory);
}

}  // namespace forge

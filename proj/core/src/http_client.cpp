#include "http_client.hpp"

#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "textstate/errors.hpp"

namespace textstate::detail {

namespace {

struct ParsedUrl {
  std::string base;  // scheme://host[:port]
  std::string path;
};

ParsedUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    throw ValidationError("endpoint URL must include a scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

std::string post_json(const HttpRequestOptions& opts, const std::string& body) {
  const ParsedUrl url = split_url(opts.url);
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (url.base.rfind("https://", 0) == 0)
    throw TransportError("https endpoints require an OpenSSL-enabled build", 1);
#endif

  httplib::Headers headers;
  if (!opts.auth_env.empty()) {
    if (const char* secret = std::getenv(opts.auth_env.c_str()); secret != nullptr && *secret) {
      headers.emplace("Authorization", std::string("Bearer ") + secret);
    }
  }

  const int attempts_max = 1 + std::max(0, opts.max_retries);
  std::string last_error;
  for (int attempt = 1; attempt <= attempts_max; ++attempt) {
    httplib::Client client(url.base);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(opts.timeout);
    const auto usecs =
        std::chrono::duration_cast<std::chrono::microseconds>(opts.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    auto res = client.Post(url.path, headers, body, "application/json");
    if (res) {
      if (res->status >= 200 && res->status < 300) return res->body;
      if (res->status >= 500) {
        last_error = "server error " + std::to_string(res->status);
      } else {
        throw TransportError("request to " + opts.url + " failed with status " +
                                 std::to_string(res->status),
                             attempt);
      }
    } else {
      last_error = httplib::to_string(res.error());
    }
    if (attempt < attempts_max) {
      const auto delay = std::chrono::milliseconds(opts.retry_base_ms) * (1 << (attempt - 1));
      std::this_thread::sleep_for(delay);
    }
  }
  throw TransportError("request to " + opts.url + " failed: " + last_error, attempts_max);
}

}  // namespace textstate::detail

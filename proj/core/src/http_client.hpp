#pragma once

// Thin POST-JSON helper over cpp-httplib with bounded retries. Internal.

#include <chrono>
#include <string>

namespace textstate::detail {

struct HttpRequestOptions {
  std::string url;       // scheme://host[:port]/path
  std::string auth_env;  // name of the env var holding the bearer token ("" = none)
  std::chrono::milliseconds timeout{30000};
  int max_retries = 3;     // retransmissions on transport failure / 5xx
  int retry_base_ms = 250; // exponential backoff base
};

// POSTs `body` as application/json and returns the response body on 2xx.
// Retries connection failures and 5xx responses with exponential backoff;
// 4xx responses fail immediately. Throws TransportError.
std::string post_json(const HttpRequestOptions& opts, const std::string& body);

}  // namespace textstate::detail

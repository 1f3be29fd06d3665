#include <httplib.h>

#include <algorithm>
#include <cctype>

#include <fmt/format.h>

#include "launchpulse/http.hpp"

namespace launchpulse {

NetworkTransport::NetworkTransport(std::chrono::seconds timeout) : timeout_(timeout) {}

HttpResponse NetworkTransport::send(const HttpRequest& request) {
  const auto scheme_end = request.url.find("://");
  if (scheme_end == std::string::npos) throw TransportError("malformed URL " + request.url);
  const auto path_start = request.url.find('/', scheme_end + 3);
  const std::string origin = request.url.substr(0, path_start);
  std::string path = path_start == std::string::npos ? "/" : request.url.substr(path_start);

  httplib::Client client(origin);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_follow_location(true);

  httplib::Headers headers;
  for (const auto& [k, v] : request.headers) headers.emplace(k, v);
  httplib::Params params;
  for (const auto& [k, v] : request.params) params.emplace(k, v);

  if (request.method != "GET") throw TransportError("only GET is supported");
  auto result = client.Get(path, params, headers);
  if (!result) {
    throw TransportError(fmt::format("{}: {}", request.url, httplib::to_string(result.error())));
  }

  HttpResponse response;
  response.status = result->status;
  response.body = result->body;
  for (const auto& [k, v] : result->headers) {
    std::string lower = k;
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    response.headers[lower] = v;
  }
  return response;
}

}  // namespace launchpulse

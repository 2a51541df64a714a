#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace netsense {

struct HttpResponse {
    int status = 0;
    std::string body;
};

struct UrlParts {
    std::string scheme_host_port; // e.g. "http://127.0.0.1:8089"
    std::string path;             // e.g. "/geo", at least "/"
};

std::optional<UrlParts> split_url(const std::string& url);

using HeaderList = std::vector<std::pair<std::string, std::string>>;

// nullopt means the transport failed outright (connect error or timeout).
class HttpGetter {
public:
    virtual ~HttpGetter() = default;
    virtual std::optional<HttpResponse> get(const std::string& url, int timeout_ms) = 0;
};

class HttpPoster {
public:
    virtual ~HttpPoster() = default;
    virtual std::optional<HttpResponse> post(const std::string& url, const std::string& body,
                                             const HeaderList& headers, int timeout_ms) = 0;
};

class HttplibTransport : public HttpGetter, public HttpPoster {
public:
    std::optional<HttpResponse> get(const std::string& url, int timeout_ms) override;
    std::optional<HttpResponse> post(const std::string& url, const std::string& body,
                                     const HeaderList& headers, int timeout_ms) override;
};

} // namespace netsense

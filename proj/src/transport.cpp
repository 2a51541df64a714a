#include "netsense/transport.hpp"

#include <httplib.h>

namespace netsense {

std::optional<UrlParts> split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) return std::nullopt;
    auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        if (url.size() == scheme_end + 3) return std::nullopt;
        return UrlParts{url, "/"};
    }
    if (path_start == scheme_end + 3) return std::nullopt;
    std::string path = url.substr(path_start);
    while (path.size() > 1 && path.back() == '/') path.pop_back();
    return UrlParts{url.substr(0, path_start), path};
}

namespace {

httplib::Client make_client(const std::string& scheme_host_port, int timeout_ms) {
    httplib::Client cli(scheme_host_port);
    time_t sec = timeout_ms / 1000;
    time_t usec = (timeout_ms % 1000) * 1000;
    cli.set_connection_timeout(sec, usec);
    cli.set_read_timeout(sec, usec);
    cli.set_write_timeout(sec, usec);
    return cli;
}

} // namespace

std::optional<HttpResponse> HttplibTransport::get(const std::string& url, int timeout_ms) {
    auto parts = split_url(url);
    if (!parts) return std::nullopt;
    auto cli = make_client(parts->scheme_host_port, timeout_ms);
    auto res = cli.Get(parts->path);
    if (!res) return std::nullopt;
    return HttpResponse{res->status, res->body};
}

std::optional<HttpResponse> HttplibTransport::post(const std::string& url, const std::string& body,
                                                   const HeaderList& headers, int timeout_ms) {
    auto parts = split_url(url);
    if (!parts) return std::nullopt;
    auto cli = make_client(parts->scheme_host_port, timeout_ms);
    httplib::Headers h(headers.begin(), headers.end());
    auto res = cli.Post(parts->path, h, body, "application/json");
    if (!res) return std::nullopt;
    return HttpResponse{res->status, res->body};
}

} // namespace netsense

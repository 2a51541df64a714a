#pragma once

#include "netsense/pipeline.hpp"

#include <memory>
#include <string>

namespace netsense {

// POST /api/v1/interpret, GET /healthz. start() binds and serves on a
// background thread; stop() finishes in-flight requests first.
class Service {
public:
    explicit Service(Pipeline pipeline);
    ~Service();

    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    // port 0 asks the OS for a free port; port() reports the bound one.
    void start(const std::string& host, int port);
    int port() const;
    void wait();
    void stop();

private:
    class Impl;
    std::unique_ptr<Impl> impl_;
};

// "host:port" or plain "host" (default port 8080).
std::pair<std::string, int> parse_bind_address(const std::string& bind);

} // namespace netsense

#include "netsense/service.hpp"

#include "netsense/errors.hpp"

#include <httplib.h>
#include <json.hpp>
#include <thread>

namespace netsense {

namespace {

using nlohmann::json;

std::string error_body(const Error& e) {
    json doc;
    doc["error"] = {{"code", errc_name(e.code())}, {"message", e.what()}};
    return doc.dump();
}

} // namespace

class Service::Impl {
public:
    explicit Impl(Pipeline pipeline) : pipeline_(std::move(pipeline)) {
        server_.Post("/api/v1/interpret",
                     [this](const httplib::Request& req, httplib::Response& res) {
                         handle_interpret(req, res);
                     });
        server_.Get("/healthz", [this](const httplib::Request&, httplib::Response& res) {
            handle_health(res);
        });
    }

    void start(const std::string& host, int port) {
        if (port == 0) {
            int bound = server_.bind_to_any_port(host);
            if (bound < 0) fail(Errc::bind_failure, "cannot bind to " + host);
            port_ = bound;
        } else {
            if (!server_.bind_to_port(host, port)) {
                fail(Errc::bind_failure,
                     "cannot bind to " + host + " port " + std::to_string(port));
            }
            port_ = port;
        }
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    int port() const { return port_; }

    void wait() {
        if (thread_.joinable()) thread_.join();
    }

    void stop() {
        server_.stop();
        wait();
    }

    ~Impl() {
        if (thread_.joinable()) stop();
    }

private:
    void handle_interpret(const httplib::Request& req, httplib::Response& res) {
        try {
            InterpretationSummary summary = pipeline_.interpret(req.body);
            res.status = 200;
            res.set_content(summary_to_json(summary).dump(), "application/json");
        } catch (const Error& e) {
            if (e.code() == Errc::overloaded) {
                res.status = 503;
                res.set_header("Retry-After", "1");
            } else {
                // only ingest problems reach here; everything else degrades
                res.status = 400;
            }
            res.set_content(error_body(e), "application/json");
        }
    }

    void handle_health(httplib::Response& res) {
        json doc;
        doc["status"] = "ok";
        json kb;
        kb["configured"] = pipeline_.parts().store != nullptr;
        if (pipeline_.parts().store) {
            try {
                kb["records"] = pipeline_.parts().store->record_count();
                kb["reachable"] = true;
            } catch (const Error&) {
                kb["reachable"] = false;
            }
        }
        doc["kb"] = kb;
        doc["llm"] = {{"configured", pipeline_.parts().llm != nullptr}};
        doc["geo"] = {{"configured", pipeline_.parts().geo != nullptr}};
        res.status = 200;
        res.set_content(doc.dump(), "application/json");
    }

    Pipeline pipeline_;
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
};

Service::Service(Pipeline pipeline) : impl_(std::make_unique<Impl>(std::move(pipeline))) {}
Service::~Service() = default;

void Service::start(const std::string& host, int port) { impl_->start(host, port); }
int Service::port() const { return impl_->port(); }
void Service::wait() { impl_->wait(); }
void Service::stop() { impl_->stop(); }

std::pair<std::string, int> parse_bind_address(const std::string& bind) {
    auto colon = bind.rfind(':');
    if (colon == std::string::npos) return {bind, 8080};
    std::string host = bind.substr(0, colon);
    std::string port_text = bind.substr(colon + 1);
    try {
        int port = std::stoi(port_text);
        if (port < 0 || port > 65535) throw std::out_of_range("port");
        return {host.empty() ? "0.0.0.0" : host, port};
    } catch (const std::exception&) {
        fail(Errc::config_error, "bind address must look like host or host with a port");
    }
}

} // namespace netsense

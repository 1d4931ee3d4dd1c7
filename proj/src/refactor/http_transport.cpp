#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <cmath>

#include "cogref/refactor/client.hpp"

namespace cogref::refactor {

namespace {

class HttplibTransport : public Transport {
public:
    HttpResponse post(const HttpRequest &request) override {
        httplib::Client client(request.endpoint);
        if (!client.is_valid())
            throw TransportError("invalid endpoint " + request.endpoint);
        const auto secs = static_cast<time_t>(request.timeout_s);
        const auto usecs = static_cast<time_t>((request.timeout_s - std::floor(request.timeout_s)) * 1e6);
        client.set_connection_timeout(secs, usecs);
        client.set_read_timeout(secs, usecs);
        client.set_write_timeout(secs, usecs);
        httplib::Headers headers;
        std::string content_type = "application/json";
        for (const auto &[k, v] : request.headers) {
            if (k == "Content-Type")
                content_type = v;
            else
                headers.emplace(k, v);
        }
        auto res = client.Post(request.path, headers, request.body, content_type);
        if (!res)
            throw TransportError("HTTP request failed: " + httplib::to_string(res.error()));
        HttpResponse out;
        out.status = res->status;
        out.body = res->body;
        if (res->has_header("Retry-After")) {
            try {
                out.retry_after_s = std::stod(res->get_header_value("Retry-After"));
            } catch (const std::exception &) {
            }
        }
        return out;
    }
};

}  // namespace

std::shared_ptr<Transport> make_http_transport() { return std::make_shared<HttplibTransport>(); }

}  // namespace cogref::refactor

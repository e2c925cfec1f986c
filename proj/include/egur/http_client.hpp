#pragma once

// Real-socket transport for HttpBackend, split out so translation units
// that only build or parse wire payloads never pay for httplib.

#include <memory>

#include <httplib.h>

#include "egur/http_backend.hpp"

namespace egur {

inline HttpTransport make_httplib_transport(const HttpBackendConfig& cfg) {
    ParsedUrl url = parse_url(cfg.endpoint_url);
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
    if (url.scheme == "https") {
        throw RunError(ErrKind::config, "built without TLS support; use an http:// endpoint");
    }
#endif
    std::string host_port = url.host_port;
    int timeout = cfg.timeout_seconds;
    return [host_port, timeout](const std::string& path, const std::string& body,
                                const std::vector<std::pair<std::string, std::string>>& headers)
               -> std::pair<int, std::string> {
        httplib::Client client(host_port);
        client.set_connection_timeout(timeout, 0);
        client.set_read_timeout(timeout, 0);
        client.set_write_timeout(timeout, 0);
        httplib::Headers hl;
        for (const auto& [k, v] : headers) hl.emplace(k, v);
        httplib::Result res = client.Post(path, hl, body, "application/json");
        if (!res) return {0, httplib::to_string(res.error())};
        return {res->status, res->body};
    };
}

}  // namespace egur

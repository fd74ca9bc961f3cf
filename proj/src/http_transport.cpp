#include "scholarlens/error.hpp"
#include "scholarlens/sources.hpp"

#include <httplib.h>

namespace scholarlens {

HttpResponse HttplibTransport::get(const std::string& url, std::int64_t timeout_ms,
                                   const std::vector<std::pair<std::string, std::string>>& headers) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw NetworkError("malformed URL '" + url + "'");
    auto path_start = url.find('/', scheme_end + 3);
    std::string origin = path_start == std::string::npos ? url : url.substr(0, path_start);
    std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

    httplib::Client client(origin);
    if (!client.is_valid()) throw NetworkError("unsupported URL '" + url + "'");
    auto sec = static_cast<time_t>(timeout_ms / 1000);
    auto usec = static_cast<time_t>((timeout_ms % 1000) * 1000);
    client.set_connection_timeout(sec, usec);
    client.set_read_timeout(sec, usec);
    client.set_write_timeout(sec, usec);
    client.set_follow_location(true);

    httplib::Headers h;
    for (const auto& [k, v] : headers) h.emplace(k, v);
    auto res = client.Get(path, h);
    if (!res) {
        auto err = res.error();
        auto msg = httplib::to_string(err) + " fetching " + url;
        if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read) throw TimeoutError(msg);
        throw NetworkError(msg);
    }
    HttpResponse out;
    out.status = res->status;
    out.body = std::move(res->body);
    out.content_type = res->get_header_value("Content-Type");
    return out;
}

}  // namespace scholarlens

#pragma once

#include <string>
#include <utility>

namespace a11yens::detail {

// "http://host:port/path?q" -> {"http://host:port", "/path?q"}
inline std::pair<std::string, std::string> split_url(const std::string& url) {
    std::size_t scheme = url.find("://");
    std::size_t path_start =
        scheme == std::string::npos ? url.find('/') : url.find('/', scheme + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace a11yens::detail

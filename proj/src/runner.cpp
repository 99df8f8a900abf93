#include <chrono>
#include <cstdlib>
#include <fstream>
#include <future>
#include <semaphore>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "a11yens/reporting.hpp"
#include "a11yens/runner.hpp"
#include "net_util.hpp"

namespace a11yens {

namespace {

constexpr int kNavigateTimeoutSeconds = 15;

struct PageFetch {
    bool ok = false;
    std::string detail;
    std::string body;
};

PageFetch fetch_page(const std::string& url) {
    PageFetch fetch;
    if (url.rfind("file://", 0) == 0) {
        std::string path = url.substr(7);
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            fetch.detail = "cannot read " + path;
            return fetch;
        }
        std::ostringstream buffer;
        buffer << in.rdbuf();
        fetch.body = buffer.str();
        fetch.ok = true;
        fetch.detail = "loaded " + std::to_string(fetch.body.size()) + " bytes";
        return fetch;
    }
    if (url.rfind("http://", 0) == 0 || url.rfind("https://", 0) == 0) {
        auto [base, path] = detail::split_url(url);
        httplib::Client client(base);
        client.set_connection_timeout(kNavigateTimeoutSeconds, 0);
        client.set_read_timeout(kNavigateTimeoutSeconds, 0);
        client.set_follow_location(true);
        httplib::Result res = client.Get(path);
        if (!res) {
            fetch.detail = "connection failed";
            return fetch;
        }
        if (res->status >= 400) {
            fetch.detail = "HTTP status " + std::to_string(res->status);
            return fetch;
        }
        fetch.body = res->body;
        fetch.ok = true;
        fetch.detail = "loaded " + std::to_string(fetch.body.size()) + " bytes";
        return fetch;
    }
    fetch.detail = "unsupported URL scheme";
    return fetch;
}

long long elapsed_millis(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now() - start)
        .count();
}

ToolResult prevented_result(const std::string& toolCode, const std::string& why) {
    ToolResult result;
    result.toolCode = toolCode;
    result.standard.prevented = true;
    result.error = why;
    return result;
}

ToolResult run_builtin_test(const Act& act, const RuleRegistry& rules, const DocTree* tree) {
    auto start = std::chrono::steady_clock::now();
    if (!tree) return prevented_result(act.which, "no page loaded");
    ToolResult result;
    result.toolCode = act.which;
    try {
        result.standard = rules.run_rules(*tree, act.rules);
    } catch (const std::invalid_argument& e) {
        result = prevented_result(act.which, e.what());
    }
    result.elapsedMillis = elapsed_millis(start);
    return result;
}

ToolResult run_external_test(const Act& act, const ToolSpec& spec, const std::string& pageURL) {
    Invocation inv = invoke_tool(spec, pageURL, act);
    ToolResult result;
    result.toolCode = act.which;
    result.elapsedMillis = inv.elapsedMillis;
    if (!inv.ok) {
        result.standard.prevented = true;
        result.error = inv.error;
        return result;
    }
    result.native = inv.report.payload;
    Normalized normalized = normalize(spec, inv.report.payload);
    result.standard = std::move(normalized.standard);
    result.error = normalized.error;
    return result;
}

}  // namespace

Report run_job(const Job& job, const ToolRegistry& registry, const RuleRegistry& rules,
               const RunOptions& options) {
    std::string startTime = now_utc();
    std::vector<ActResult> results(job.acts.size(), NavOutcome{});
    std::optional<DocTree> tree;
    std::string pageURL;
    bool pageOK = false;

    auto is_external = [&](const Act& act) {
        const ToolSpec* spec = registry.find(act.which);
        return spec && spec->kind != ToolKind::builtin;
    };

    std::size_t i = 0;
    while (i < job.acts.size()) {
        const Act& act = job.acts[i];
        if (act.type == ActType::test && pageOK && is_external(act)) {
            // Run the whole stretch of consecutive external tests concurrently;
            // results keep act order.
            std::size_t end = i;
            while (end < job.acts.size() && job.acts[end].type == ActType::test &&
                   is_external(job.acts[end])) {
                ++end;
            }
            int permits = std::max(1, options.maxConcurrent);
            std::counting_semaphore<256> limiter(permits);
            std::vector<std::future<ToolResult>> futures;
            for (std::size_t k = i; k < end; ++k) {
                const Act& batched = job.acts[k];
                const ToolSpec* spec = registry.find(batched.which);
                futures.push_back(std::async(std::launch::async, [&limiter, &batched, spec,
                                                                  pageURL]() {
                    limiter.acquire();
                    ToolResult result = run_external_test(batched, *spec, pageURL);
                    limiter.release();
                    return result;
                }));
            }
            for (std::size_t k = i; k < end; ++k) {
                results[k] = futures[k - i].get();
            }
            i = end;
            continue;
        }

        auto start = std::chrono::steady_clock::now();
        switch (act.type) {
            case ActType::launch: {
                std::string browser = act.which.empty() ? "chromium" : act.which;
                results[i] = NavOutcome{true, "selected browser " + browser,
                                        elapsed_millis(start)};
                break;
            }
            case ActType::wait: {
                long long millis = std::strtoll(act.which.c_str(), nullptr, 10);
                millis = std::clamp<long long>(millis, 0, 60'000);
                std::this_thread::sleep_for(std::chrono::milliseconds(millis));
                results[i] = NavOutcome{true, "waited " + std::to_string(millis) + " ms",
                                        elapsed_millis(start)};
                break;
            }
            case ActType::navigate: {
                PageFetch fetch = fetch_page(act.which);
                NavOutcome outcome{fetch.ok, fetch.detail, 0};
                if (fetch.ok) {
                    try {
                        tree = parse_html(fetch.body);
                        pageURL = act.which;
                        pageOK = true;
                    } catch (const std::invalid_argument& e) {
                        outcome.ok = false;
                        outcome.detail = e.what();
                    }
                }
                if (!outcome.ok) {
                    tree.reset();
                    pageOK = false;
                }
                outcome.elapsedMillis = elapsed_millis(start);
                results[i] = outcome;
                break;
            }
            case ActType::test: {
                const ToolSpec* spec = registry.find(act.which);
                if (!spec) {
                    results[i] = prevented_result(act.which, "unknown tool '" + act.which + "'");
                } else if (!pageOK) {
                    results[i] = prevented_result(act.which, "no page loaded");
                } else if (spec->kind == ToolKind::builtin) {
                    results[i] = run_builtin_test(act, rules, tree ? &*tree : nullptr);
                } else {
                    results[i] = run_external_test(act, *spec, pageURL);
                }
                break;
            }
        }
        ++i;
    }

    return elaborate(job, std::move(results), {options.agentID, startTime, now_utc()});
}

}  // namespace a11yens

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "a11yens/core_model.hpp"
#include "a11yens/server.hpp"

namespace a11yens {

namespace fs = std::filesystem;

JobServer::JobServer() : server_(std::make_unique<httplib::Server>()) {}

JobServer::~JobServer() { stop(); }

std::size_t JobServer::queued() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return queue_.size();
}

bool JobServer::start(int port, const std::string& dataDir) {
    dataDir_ = dataDir;
    std::error_code ec;
    fs::create_directories(dataDir_, ec);
    if (ec) return false;

    server_->Post("/api/jobs", [this](const httplib::Request& req, httplib::Response& res) {
        Parsed<Job> parsed = parse_job(req.body);
        if (!parsed.ok()) {
            json error = {{"error", parsed.errors.empty() ? "invalid job"
                                                          : parsed.errors.front().message}};
            res.status = 400;
            res.set_content(error.dump(), "application/json");
            return;
        }
        {
            std::lock_guard<std::mutex> lock(mutex_);
            queue_.push_back(req.body);
        }
        json body = {{"id", parsed.value->id}};
        res.status = 201;
        res.set_content(body.dump(), "application/json");
    });

    server_->Get("/api/job", [this](const httplib::Request&, httplib::Response& res) {
        std::string job;
        {
            std::lock_guard<std::mutex> lock(mutex_);
            if (!queue_.empty()) {
                job = std::move(queue_.front());
                queue_.pop_front();
            }
        }
        if (job.empty()) {
            res.status = 204;
            return;
        }
        res.status = 200;
        res.set_content(job, "application/json");
    });

    server_->Post("/api/reports", [this](const httplib::Request& req, httplib::Response& res) {
        Parsed<Report> parsed = parse_report(req.body);
        if (!parsed.ok()) {
            json error = {{"error", parsed.errors.empty() ? "invalid report"
                                                          : parsed.errors.front().message}};
            res.status = 400;
            res.set_content(error.dump(), "application/json");
            return;
        }
        std::ofstream out(fs::path(dataDir_) / (parsed.value->job.id + ".json"),
                          std::ios::binary | std::ios::trunc);
        if (!out) {
            res.status = 500;
            res.set_content(R"({"error":"cannot persist report"})", "application/json");
            return;
        }
        out << req.body;
        res.status = 201;
        res.set_content(json{{"id", parsed.value->job.id}}.dump(), "application/json");
    });

    server_->Get(R"(/api/reports/([A-Za-z0-9_.\-]+))",
                 [this](const httplib::Request& req, httplib::Response& res) {
                     std::string id = req.matches[1];
                     if (!is_valid_job_id(id)) {
                         res.status = 404;
                         res.set_content(R"({"error":"not found"})", "application/json");
                         return;
                     }
                     std::ifstream in(fs::path(dataDir_) / (id + ".json"), std::ios::binary);
                     if (!in) {
                         res.status = 404;
                         res.set_content(R"({"error":"not found"})", "application/json");
                         return;
                     }
                     std::ostringstream buffer;
                     buffer << in.rdbuf();
                     res.status = 200;
                     res.set_content(buffer.str(), "application/json");
                 });

    server_->Get("/api/reports", [this](const httplib::Request&, httplib::Response& res) {
        json ids = json::array();
        std::vector<std::string> names;
        std::error_code list_ec;
        for (const auto& entry : fs::directory_iterator(dataDir_, list_ec)) {
            if (entry.path().extension() == ".json") {
                names.push_back(entry.path().stem().string());
            }
        }
        std::sort(names.begin(), names.end());
        for (const std::string& name : names) ids.push_back(name);
        res.status = 200;
        res.set_content(ids.dump(), "application/json");
    });

    if (port == 0) {
        port_ = server_->bind_to_any_port("0.0.0.0");
        if (port_ <= 0) return false;
    } else {
        if (!server_->bind_to_port("0.0.0.0", port)) return false;
        port_ = port;
    }
    thread_ = std::thread([this]() { server_->listen_after_bind(); });
    for (int i = 0; i < 200 && !server_->is_running(); ++i) {
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    return server_->is_running();
}

void JobServer::stop() {
    if (server_ && server_->is_running()) server_->stop();
    if (thread_.joinable()) thread_.join();
}

}  // namespace a11yens

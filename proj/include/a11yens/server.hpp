// HTTP job server: FIFO job queue with exactly-once dequeue and disk-backed
// report storage.
#pragma once

#include <deque>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

namespace httplib {
class Server;
}

namespace a11yens {

class JobServer {
public:
    JobServer();
    ~JobServer();
    JobServer(const JobServer&) = delete;
    JobServer& operator=(const JobServer&) = delete;

    // Binds and serves on a background thread. port 0 picks a free port.
    // Returns false when the port cannot be bound or dataDir is unusable.
    bool start(int port, const std::string& dataDir);
    void stop();

    int port() const { return port_; }
    std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }
    std::size_t queued() const;

private:
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
    mutable std::mutex mutex_;
    std::deque<std::string> queue_;  // serialized jobs, FIFO
    std::string dataDir_;
    int port_ = 0;
};

}  // namespace a11yens

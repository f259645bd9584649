#pragma once

#include <condition_variable>
#include <deque>
#include <filesystem>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <unordered_map>

#include "surrscope/app/config.hpp"
#include "surrscope/app/report.hpp"

namespace httplib {
class Server;
}

namespace surrscope {

struct ServiceOptions {
    std::size_t session_cap = 32;
    std::size_t workers = 2;
    std::size_t max_grid_resolution = 100;
    ExecPolicy exec = ExecPolicy::openmp();
    /// Base for relative dataset paths in session requests.
    std::filesystem::path data_dir = std::filesystem::current_path();
    /// Built UI assets; a placeholder page is served when empty or missing.
    std::filesystem::path static_dir;
};

struct Response {
    int status = 200;
    std::string body;
};

/// Session and job management behind the HTTP API. Every method is safe to
/// call concurrently and maps failures to {"error": {"code", "message"}}.
class Service {
public:
    explicit Service(ServiceOptions options = {});
    ~Service();

    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    Response create_session(const std::string& body);
    Response get_session(const std::string& id);
    Response query_surrogate(const std::string& id, const std::string& body);
    Response submit_job(const std::string& id, const std::string& kind, const std::string& body);
    Response poll_job(const std::string& job_id);
    Response export_session(const std::string& id);
    Response import_session(const std::string& body);
    Response healthz() const;

    /// Registers every route on `server`.
    void mount(httplib::Server& server);

    const ServiceOptions& options() const noexcept { return options_; }

private:
    struct Session {
        std::string id;
        Json request;
        RunConfig config;
        Pipeline pipeline;
        std::string created_at;
    };

    struct Job {
        std::string id;
        std::string session_id;
        AnalysisKind kind;
        RunConfig config;
        std::shared_ptr<const Session> session;
        std::mutex mu;
        std::string status = "pending";
        std::size_t done = 0;
        std::size_t total = 0;
        double reported = 0.0;
        std::string result;
        std::string error_code;
        std::string error_message;
    };

    std::shared_ptr<const Session> find_session(const std::string& id);
    std::string insert_session(std::shared_ptr<Session> s);
    std::string new_id(const char* prefix);
    void worker_loop();
    void run_job(const std::shared_ptr<Job>& job);

    ServiceOptions options_;

    std::mutex sessions_mu_;
    std::list<std::string> lru_;
    std::unordered_map<std::string, std::pair<std::shared_ptr<const Session>, std::list<std::string>::iterator>>
        sessions_;

    std::mutex jobs_mu_;
    std::condition_variable jobs_cv_;
    std::map<std::string, std::shared_ptr<Job>> jobs_;
    std::map<std::string, std::string> job_cache_;
    std::deque<std::shared_ptr<Job>> queue_;
    bool stopping_ = false;
    std::vector<std::thread> workers_;

    std::mutex id_mu_;
    std::uint64_t id_counter_ = 0;
    std::uint64_t id_key_ = 0;
};

/// Serves a Service over HTTP/1.1 on a background thread.
class HttpServer {
public:
    explicit HttpServer(Service& service);
    ~HttpServer();

    /// Binds host:port (port 0 picks a free one) and returns the bound port.
    int bind(const std::string& host, int port);
    void start();
    /// Blocks until stop() is called from another thread.
    void run();
    void stop();

private:
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
};

} // namespace surrscope

#include "surrscope/service/service.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <random>

#include <httplib.h>

#include "surrscope/core/rng.hpp"

namespace surrscope {

namespace {

Response error_response(int status, const std::string& code, const std::string& message)
{
    return Response{status, Json{{"error", {{"code", code}, {"message", message}}}}.dump()};
}

Response not_found(const std::string& what)
{
    return error_response(404, "not_found", what);
}

/// Runs f and maps library exceptions onto HTTP statuses.
template <class F>
Response guarded(F&& f)
{
    try {
        return f();
    } catch (const DimensionMismatch& e) {
        return error_response(422, "dimension_mismatch", e.what());
    } catch (const DataError& e) {
        return error_response(400, "invalid_spec", e.what());
    } catch (const ConfigError& e) {
        return error_response(400, "invalid_spec", e.what());
    } catch (const ParseError& e) {
        return error_response(400, "invalid_spec", e.what());
    } catch (const InvalidArgument& e) {
        return error_response(400, "invalid_spec", e.what());
    } catch (const Json::exception& e) {
        return error_response(400, "invalid_spec", e.what());
    } catch (const BlackBoxError& e) {
        return error_response(502, "blackbox_failure", e.what());
    } catch (const std::exception& e) {
        return error_response(500, "internal", e.what());
    }
}

Json parse_body(const std::string& body)
{
    if (body.empty()) {
        return Json::object();
    }
    try {
        auto j = parse_json(body);
        if (!j.is_object()) {
            throw ConfigError("request body must be a JSON object");
        }
        return j;
    } catch (const ParseError& e) {
        throw ConfigError(std::string("request body is not valid JSON: ") + e.what());
    }
}

void only_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where)
{
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) {
            ok = ok || key == a;
        }
        if (!ok) {
            throw ConfigError("unknown key '" + key + "' in " + where);
        }
    }
}

std::string utc_now()
{
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Seed, fit and neighbourhood overrides shared by surrogate queries and jobs.
void apply_overrides(const Json& j, RunConfig& c)
{
    try {
        if (j.contains("seed")) {
            c.seed = from_json_value<RngSeed>(j.at("seed"));
        }
        if (j.contains("fit")) {
            c.fit = parse_fit_config(j.at("fit"));
        }
        if (j.contains("neighbourhood")) {
            c.neighbourhood = from_json_value<SpecDefaults>(j.at("neighbourhood"));
        }
    } catch (const ParseError& e) {
        throw ConfigError(e.what());
    }
}

void check_radii(const std::vector<double>& radii, bool allow_zero)
{
    if (radii.empty()) {
        throw ConfigError("radii must be non-empty");
    }
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!std::isfinite(radii[i]) || radii[i] < 0.0 || (!allow_zero && radii[i] == 0.0)) {
            throw ConfigError(allow_zero ? "radii must be non-negative" : "radii must be positive");
        }
        if (i > 0 && !(radii[i - 1] < radii[i])) {
            throw ConfigError("radii must be strictly increasing");
        }
    }
}

Json session_summary(const std::string& id, const std::string& created_at, const RunConfig& c, const Pipeline& p)
{
    Json j{{"id", id},
           {"created_at", created_at},
           {"instance", p.instance},
           {"n_features", p.dataset.dim()},
           {"feature_names", p.dataset.feature_names()},
           {"bounds", p.dataset.bounds()},
           {"dataset_size", p.dataset.size()},
           {"blackbox_kind", p.blackbox->kind()},
           {"neighbourhood", c.neighbourhood},
           {"fit", c.fit},
           {"seed", c.seed}};
    j["training_accuracy"] = p.training_accuracy ? Json(*p.training_accuracy) : Json(nullptr);
    return j;
}

const char* kPlaceholderPage = R"(<!doctype html>
<html><head><meta charset="utf-8"><title>surrscope</title></head>
<body>
<h1>surrscope service</h1>
<p>The browser UI is not installed. The JSON API is available:</p>
<ul>
<li>POST /sessions</li><li>GET /sessions/{id}</li><li>POST /sessions/{id}/surrogate</li>
<li>POST /sessions/{id}/jobs/{sweep|bootstrap|path}</li><li>GET /jobs/{id}</li>
<li>GET /sessions/{id}/export</li><li>POST /sessions/import</li><li>GET /healthz</li>
</ul>
</body></html>
)";

} // namespace

Service::Service(ServiceOptions options) : options_(std::move(options))
{
    if (options_.session_cap == 0) {
        throw InvalidArgument("session cap must be positive");
    }
    std::random_device rd;
    id_key_ = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    const std::size_t n = std::max<std::size_t>(options_.workers, 1);
    for (std::size_t i = 0; i < n; ++i) {
        workers_.emplace_back([this] { worker_loop(); });
    }
}

Service::~Service()
{
    {
        std::lock_guard lock(jobs_mu_);
        stopping_ = true;
    }
    jobs_cv_.notify_all();
    for (auto& t : workers_) {
        t.join();
    }
}

std::string Service::new_id(const char* prefix)
{
    std::lock_guard lock(id_mu_);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%016llx", prefix,
                  static_cast<unsigned long long>(mix64(id_key_ ^ mix64(++id_counter_))));
    return buf;
}

std::shared_ptr<const Service::Session> Service::find_session(const std::string& id)
{
    std::lock_guard lock(sessions_mu_);
    const auto it = sessions_.find(id);
    if (it == sessions_.end()) {
        return nullptr;
    }
    lru_.splice(lru_.begin(), lru_, it->second.second);
    return it->second.first;
}

std::string Service::insert_session(std::shared_ptr<Session> s)
{
    s->id = new_id("s");
    s->created_at = utc_now();
    std::vector<std::string> evicted;
    {
        std::lock_guard lock(sessions_mu_);
        lru_.push_front(s->id);
        sessions_.emplace(s->id, std::make_pair(std::shared_ptr<const Session>(s), lru_.begin()));
        while (sessions_.size() > options_.session_cap) {
            evicted.push_back(lru_.back());
            sessions_.erase(lru_.back());
            lru_.pop_back();
        }
    }
    if (!evicted.empty()) {
        // Cached results of evicted sessions go with them; jobs already
        // queued keep their own reference to the session and still finish.
        std::lock_guard lock(jobs_mu_);
        for (auto it = job_cache_.begin(); it != job_cache_.end();) {
            const bool drop = std::any_of(evicted.begin(), evicted.end(),
                                          [&](const std::string& id) { return it->first.starts_with(id + "|"); });
            it = drop ? job_cache_.erase(it) : std::next(it);
        }
    }
    return s->id;
}

Response Service::create_session(const std::string& body)
{
    return guarded([&] {
        const Json request = parse_body(body);
        only_keys(request, {"dataset", "blackbox", "instance", "neighbourhood", "fit", "seed"}, "session request");
        auto config = parse_run_config(request, options_.data_dir);
        auto pipeline = materialize(config);
        auto s = std::make_shared<Session>(Session{"", request, std::move(config), std::move(pipeline), ""});
        insert_session(s);
        return Response{200, session_summary(s->id, s->created_at, s->config, s->pipeline).dump()};
    });
}

Response Service::get_session(const std::string& id)
{
    return guarded([&] {
        const auto s = find_session(id);
        if (!s) {
            return not_found("unknown session '" + id + "'");
        }
        return Response{200, session_summary(s->id, s->created_at, s->config, s->pipeline).dump()};
    });
}

Response Service::query_surrogate(const std::string& id, const std::string& body)
{
    return guarded([&] {
        const auto s = find_session(id);
        if (!s) {
            return not_found("unknown session '" + id + "'");
        }
        const Json j = parse_body(body);
        only_keys(j, {"radius", "fit", "seed", "neighbourhood", "grid_resolution"}, "surrogate query");
        if (!j.contains("radius") || !j.at("radius").is_number()) {
            throw ConfigError("surrogate query needs a numeric 'radius'");
        }
        RunConfig c = s->config;
        apply_overrides(j, c);
        c.explain = ExplainSpec{j.at("radius").get<double>()};
        std::size_t resolution = 50;
        if (j.contains("grid_resolution")) {
            const auto& r = j.at("grid_resolution");
            if (!r.is_number_integer() || r.get<std::int64_t>() < 2) {
                throw ConfigError("grid_resolution must be an integer >= 2");
            }
            resolution = std::min<std::size_t>(r.get<std::size_t>(), options_.max_grid_resolution);
        }
        const auto fit = run_explain(s->pipeline, c, RunOptions{options_.exec, nullptr});
        Json out{{"fit", fit}};
        if (s->pipeline.dataset.dim() == 2) {
            const auto g = boundary_grid(*s->pipeline.blackbox, fit.surrogate, s->pipeline.dataset.bounds(), resolution);
            out["boundary"] = Json{{"bounds", g.blackbox.bounds},
                                   {"resolution", g.blackbox.resolution},
                                   {"blackbox", g.blackbox.labels},
                                   {"surrogate", g.surrogate}};
        } else {
            out["boundary"] = nullptr;
        }
        return Response{200, out.dump()};
    });
}

Response Service::submit_job(const std::string& id, const std::string& kind_name, const std::string& body)
{
    return guarded([&] {
        const auto s = find_session(id);
        if (!s) {
            return not_found("unknown session '" + id + "'");
        }
        const AnalysisKind kind = analysis_from_string(kind_name);
        if (kind != AnalysisKind::sweep && kind != AnalysisKind::bootstrap && kind != AnalysisKind::path) {
            return not_found("no job type '" + kind_name + "'");
        }
        const Json j = parse_body(body);
        RunConfig c = s->config;
        apply_overrides(j, c);
        if (!j.contains("radii")) {
            throw ConfigError("job needs 'radii'");
        }
        Json key{{"kind", kind_name}, {"seed", c.seed}, {"neighbourhood", c.neighbourhood}, {"fit", c.fit}};
        const auto radii = [&] {
            try {
                return parse_radii(j.at("radii"));
            } catch (const Json::exception& e) {
                throw ConfigError(e.what());
            }
        }();
        key["radii"] = radii;
        if (kind == AnalysisKind::sweep) {
            only_keys(j, {"radii", "fit", "seed", "neighbourhood"}, "sweep job");
            check_radii(radii, false);
            c.sweep = SweepSpec{radii};
        } else if (kind == AnalysisKind::bootstrap) {
            only_keys(j, {"radii", "B", "n", "fit", "seed", "neighbourhood"}, "bootstrap job");
            check_radii(radii, true);
            BootstrapSpec b{radii};
            if (j.contains("B")) {
                b.B = j.at("B").get<std::size_t>();
            }
            if (j.contains("n")) {
                b.n = j.at("n").get<std::size_t>();
            }
            if (b.B < 2 || b.n < 1) {
                throw ConfigError("bootstrap needs B >= 2 and n >= 1");
            }
            if (c.fit.family == Family::tree) {
                throw ConfigError("bootstrap needs a linear family");
            }
            key["B"] = b.B;
            key["n"] = b.n;
            c.bootstrap = b;
        } else {
            only_keys(j, {"radii", "C_grid", "fit", "seed", "neighbourhood"}, "path job");
            check_radii(radii, true);
            PathSpec p{radii};
            if (j.contains("C_grid")) {
                const auto& g = j.at("C_grid");
                p.C_grid = g.is_string() ? parse_C_grid(g.get<std::string>()) : g.get<std::vector<double>>();
            }
            for (std::size_t k = 0; k < p.C_grid.size(); ++k) {
                if (!(p.C_grid[k] > 0.0) || (k > 0 && !(p.C_grid[k - 1] < p.C_grid[k]))) {
                    throw ConfigError("C_grid must be positive and strictly increasing");
                }
            }
            key["C_grid"] = p.C_grid;
            c.path = p;
        }
        try {
            c.neighbourhood.validate();
            if (kind != AnalysisKind::path) {
                c.fit.validate();
            }
        } catch (const InvalidArgument& e) {
            throw ConfigError(e.what());
        }

        const std::string cache_key = id + "|" + key.dump();
        std::lock_guard lock(jobs_mu_);
        if (const auto it = job_cache_.find(cache_key); it != job_cache_.end()) {
            const auto job = jobs_.at(it->second);
            std::lock_guard job_lock(job->mu);
            return Response{200, Json{{"job_id", job->id}, {"status", job->status}, {"cached", true}}.dump()};
        }
        auto job = std::make_shared<Job>();
        job->id = new_id("j");
        job->session_id = id;
        job->kind = kind;
        job->config = std::move(c);
        job->session = s;
        jobs_.emplace(job->id, job);
        job_cache_.emplace(cache_key, job->id);
        queue_.push_back(job);
        jobs_cv_.notify_one();
        return Response{200, Json{{"job_id", job->id}, {"status", "pending"}, {"cached", false}}.dump()};
    });
}

Response Service::poll_job(const std::string& job_id)
{
    std::shared_ptr<Job> job;
    {
        std::lock_guard lock(jobs_mu_);
        const auto it = jobs_.find(job_id);
        if (it == jobs_.end()) {
            return not_found("unknown job '" + job_id + "'");
        }
        job = it->second;
    }
    std::lock_guard lock(job->mu);
    if (job->status == "done") {
        return Response{200, "{\"id\":" + Json(job->id).dump() + ",\"kind\":" + Json(to_string(job->kind)).dump()
                                 + ",\"progress\":1,\"result\":" + job->result + ",\"status\":\"done\"}"};
    }
    Json out{{"id", job->id}, {"kind", to_string(job->kind)}, {"status", job->status}};
    if (job->status == "failed") {
        out["progress"] = job->reported;
        out["error"] = Json{{"code", job->error_code}, {"message", job->error_message}};
        return Response{200, out.dump()};
    }
    double fraction = job->total > 0 ? static_cast<double>(job->done) / static_cast<double>(job->total) : 0.0;
    // Pending never reports completion; monotone across polls.
    fraction = std::min(fraction, 0.99);
    job->reported = std::max(job->reported, fraction);
    out["progress"] = job->reported;
    return Response{200, out.dump()};
}

void Service::worker_loop()
{
    for (;;) {
        std::shared_ptr<Job> job;
        {
            std::unique_lock lock(jobs_mu_);
            jobs_cv_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
            if (stopping_) {
                return;
            }
            job = queue_.front();
            queue_.pop_front();
        }
        run_job(job);
    }
}

void Service::run_job(const std::shared_ptr<Job>& job)
{
    ProgressSink sink([job](std::size_t done, std::size_t total) {
        std::lock_guard lock(job->mu);
        job->done = done;
        job->total = total;
    });
    const RunOptions opts{options_.exec, &sink};
    const auto& p = job->session->pipeline;
    std::string result;
    const Response r = guarded([&] {
        switch (job->kind) {
        case AnalysisKind::sweep:
            result = serialize(run_sweep(p, job->config, opts));
            break;
        case AnalysisKind::bootstrap:
            result = serialize(run_bootstrap(p, job->config, opts));
            break;
        case AnalysisKind::path:
            result = serialize(run_path(p, job->config, opts));
            break;
        default:
            throw ConfigError("unsupported job kind");
        }
        return Response{};
    });
    std::lock_guard lock(job->mu);
    if (r.status == 200) {
        job->result = std::move(result);
        job->status = "done";
        job->reported = 1.0;
    } else {
        const auto err = Json::parse(r.body);
        job->error_code = err["error"]["code"].get<std::string>();
        job->error_message = err["error"]["message"].get<std::string>();
        job->status = "failed";
    }
}

Response Service::export_session(const std::string& id)
{
    return guarded([&] {
        const auto s = find_session(id);
        if (!s) {
            return not_found("unknown session '" + id + "'");
        }
        Json out{{"format", "surrscope-session"},
                 {"version", 1},
                 {"request", s->request},
                 {"created_at", s->created_at},
                 {"dataset", s->pipeline.dataset},
                 {"instance", s->pipeline.instance}};
        out["training_accuracy"] =
            s->pipeline.training_accuracy ? Json(*s->pipeline.training_accuracy) : Json(nullptr);
        if (const auto* mlp = dynamic_cast<const MlpClassifier*>(s->pipeline.blackbox.get())) {
            out["mlp_weights"] = mlp->weights();
        } else {
            out["mlp_weights"] = nullptr;
        }
        return Response{200, out.dump()};
    });
}

Response Service::import_session(const std::string& body)
{
    return guarded([&] {
        const Json j = parse_body(body);
        if (j.value("format", "") != "surrscope-session" || j.value("version", 0) != 1) {
            throw ConfigError("not a surrscope session export (format/version)");
        }
        auto config = parse_run_config(j.at("request"), options_.data_dir);
        auto dataset = from_json_value<Dataset>(j.at("dataset"));
        auto instance = from_json_value<Instance>(j.at("instance"));
        if (instance.dim() != dataset.dim()) {
            throw DimensionMismatch("exported instance and dataset dimensions differ");
        }
        BlackBoxRef bb;
        std::optional<double> accuracy;
        if (!j.at("mlp_weights").is_null()) {
            auto weights = from_json_value<MlpWeights>(j.at("mlp_weights"));
            if (weights.input_dim() != dataset.dim()) {
                throw DimensionMismatch("exported network and dataset dimensions differ");
            }
            bb = std::make_shared<MlpClassifier>(std::move(weights));
            if (!j.at("training_accuracy").is_null()) {
                accuracy = j.at("training_accuracy").get<double>();
            }
        } else {
            const auto* ext = std::get_if<ExternalSpec>(&config.blackbox.model);
            if (!ext) {
                throw ConfigError("export has no network weights for its MLP black-box");
            }
            bb = std::make_shared<ExternalProcessBlackBox>(
                ExternalProcessConfig{ext->command, dataset.dim(), ext->timeout});
        }
        auto s = std::make_shared<Session>(Session{"", j.at("request"), std::move(config),
                                                   Pipeline{std::move(dataset), std::move(bb), accuracy,
                                                            std::move(instance)},
                                                   ""});
        insert_session(s);
        return Response{200, session_summary(s->id, s->created_at, s->config, s->pipeline).dump()};
    });
}

Response Service::healthz() const
{
    return Response{200, R"({"status":"ok"})"};
}

void Service::mount(httplib::Server& server)
{
    const auto reply = [](httplib::Response& res, const Response& r) {
        res.status = r.status;
        res.set_content(r.body, "application/json");
    };
    server.Get("/healthz", [this, reply](const httplib::Request&, httplib::Response& res) { reply(res, healthz()); });
    server.Post("/sessions", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, create_session(req.body));
    });
    server.Post("/sessions/import", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, import_session(req.body));
    });
    server.Get(R"(/sessions/([^/]+))", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, get_session(req.matches[1]));
    });
    server.Get(R"(/sessions/([^/]+)/export)", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, export_session(req.matches[1]));
    });
    server.Post(R"(/sessions/([^/]+)/surrogate)", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, query_surrogate(req.matches[1], req.body));
    });
    server.Post(R"(/sessions/([^/]+)/jobs/([^/]+))",
                [this, reply](const httplib::Request& req, httplib::Response& res) {
                    reply(res, submit_job(req.matches[1], req.matches[2], req.body));
                });
    server.Get(R"(/jobs/([^/]+))", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, poll_job(req.matches[1]));
    });

    std::error_code ec;
    if (!options_.static_dir.empty() && std::filesystem::is_directory(options_.static_dir, ec)) {
        server.set_mount_point("/", options_.static_dir.string());
    } else {
        server.Get("/", [](const httplib::Request&, httplib::Response& res) {
            res.set_content(kPlaceholderPage, "text/html");
        });
    }
    server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
        if (res.body.empty()) {
            res.set_content(Json{{"error", {{"code", res.status == 404 ? "not_found" : "http_error"},
                                            {"message", "no such endpoint"}}}}
                                .dump(),
                            "application/json");
        }
    });
}

HttpServer::HttpServer(Service& service) : server_(std::make_unique<httplib::Server>())
{
    service.mount(*server_);
}

HttpServer::~HttpServer()
{
    stop();
}

int HttpServer::bind(const std::string& host, int port)
{
    if (port == 0) {
        const int bound = server_->bind_to_any_port(host);
        if (bound < 0) {
            throw Error("cannot bind " + host);
        }
        return bound;
    }
    if (!server_->bind_to_port(host, port)) {
        throw Error("cannot bind " + host + ":" + std::to_string(port));
    }
    return port;
}

void HttpServer::start()
{
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
}

void HttpServer::run()
{
    server_->listen_after_bind();
}

void HttpServer::stop()
{
    if (server_) {
        server_->stop();
    }
    if (thread_.joinable()) {
        thread_.join();
    }
}

} // namespace surrscope

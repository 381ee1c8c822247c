#pragma once

// HTTP front end for annotation sessions.
//
//   GET  /session/{id}/next?stratum=only_a|only_b|both
//   POST /session/{id}/judgment   {"pair_id", "category", "annotator"?}
//   GET  /session/{id}/tally
//   GET  /session/{id}/history
//   GET  /session/{id}/pair/{pair_id}
//   GET  /                         UI bundle (static directory) or a placeholder page
//
// Sessions are created on first use and share the sample set; each keeps its
// own log at <sessions_dir>/<id>.jsonl.

#include "forge/annotation.hpp"

#include <httplib.h>

#include <memory>

namespace forge {

struct AnnotationServerConfig {
  std::filesystem::path samples_dir;
  std::filesystem::path sessions_dir;  // defaults to <samples_dir>/sessions
  std::filesystem::path ui_dir;        // optional static bundle
  std::string host = "127.0.0.1";
  int port = 8080;
};

class AnnotationService {
 public:
  explicit AnnotationService(AnnotationServerConfig cfg) : cfg_(std::move(cfg)), samples_(load_samples(cfg_.samples_dir)) {
    if (cfg_.sessions_dir.empty()) cfg_.sessions_dir = cfg_.samples_dir / "sessions";
    install_routes();
  }

  httplib::Server& server() { return server_; }
  const std::vector<SamplePair>& samples() const { return samples_; }

  AnnotationSession& session(const std::string& id) {
    if (!valid_session_id(id)) throw RejectedJudgment("invalid session id");
    std::lock_guard lock(sessions_mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) {
      it = sessions_.emplace(id, std::make_unique<AnnotationSession>(id, samples_, cfg_.sessions_dir / (id + ".jsonl")))
               .first;
    }
    return *it->second;
  }

  // Binds and serves until stop(). Returns false if the port could not be bound.
  bool listen() { return server_.listen(cfg_.host, cfg_.port); }

  // Binds to an ephemeral port; returns it (tests).
  int bind_any() { return server_.bind_to_any_port(cfg_.host); }
  bool listen_after_bind() { return server_.listen_after_bind(); }
  void stop() { server_.stop(); }

 private:
  static nlohmann::ordered_json pair_json(const SamplePair& p) {
    return {{"pair_id", p.pair_id}, {"stratum", to_string(p.stratum)}, {"index", p.index}, {"en", p.en}, {"xx", p.xx}};
  }

  static void send_json(httplib::Response& res, const nlohmann::ordered_json& body, int status = 200) {
    res.status = status;
    res.set_content(body.dump(), "application/json; charset=utf-8");
  }

  static void send_error(httplib::Response& res, int status, const std::string& message) {
    send_json(res, {{"error", message}}, status);
  }

  template <class Fn>
  void guarded(httplib::Response& res, Fn&& fn) {
    try {
      fn();
    } catch (const RejectedJudgment& e) {
      send_error(res, 400, e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, e.what());
    }
  }

  void install_routes() {
    server_.Get(R"(/session/([^/]+)/next)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        auto& s = session(req.matches[1]);
        const std::string name = req.has_param("stratum") ? req.get_param_value("stratum") : "both";
        const auto stratum = parse_stratum(name);
        if (!stratum) throw RejectedJudgment("unknown stratum '" + name + "'");
        const auto p = s.next_pair(*stratum);
        nlohmann::ordered_json body = {{"session", s.id()}, {"stratum", name}};
        if (p) {
          body["exhausted"] = false;
          body["pair"] = pair_json(*p);
        } else {
          body["exhausted"] = true;
          body["pair"] = nullptr;
        }
        body["tally"] = s.export_tally()["strata"][name];
        send_json(res, body);
      });
    });

    server_.Post(R"(/session/([^/]+)/judgment)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        auto& s = session(req.matches[1]);
        nlohmann::json j;
        try {
          j = nlohmann::json::parse(req.body);
        } catch (const nlohmann::json::exception&) {
          throw RejectedJudgment("body is not JSON");
        }
        if (!j.is_object() || !j.contains("pair_id") || !j["pair_id"].is_string() || !j.contains("category") ||
            !j["category"].is_string()) {
          throw RejectedJudgment("expected {\"pair_id\": string, \"category\": string}");
        }
        const std::string annotator = j.contains("annotator") && j["annotator"].is_string() ? j["annotator"].get<std::string>() : "";
        const StratumTally t = s.record_judgment(j["pair_id"].get<std::string>(), j["category"].get<std::string>(), annotator);
        send_json(res, {{"ok", true},
                        {"pair_id", j["pair_id"]},
                        {"category", j["category"]},
                        {"stratum", to_string(t.stratum)},
                        {"tally", to_json(t)}});
      });
    });

    server_.Get(R"(/session/([^/]+)/tally)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] { send_json(res, session(req.matches[1]).export_tally()); });
    });

    server_.Get(R"(/session/([^/]+)/history)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        auto& s = session(req.matches[1]);
        nlohmann::ordered_json items = nlohmann::ordered_json::array();
        for (const auto& h : s.history()) {
          items.push_back({{"pair_id", h.pair_id}, {"category", to_string(h.category)}, {"annotator", h.annotator}});
        }
        send_json(res, {{"session", s.id()}, {"history", items}});
      });
    });

    server_.Get(R"(/session/([^/]+)/pair/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        auto& s = session(req.matches[1]);
        const auto p = s.pair(req.matches[2]);
        if (!p) return send_error(res, 404, "unknown pair_id");
        auto body = pair_json(*p);
        const auto j = s.judgment(p->pair_id);
        body["category"] = j ? nlohmann::ordered_json(to_string(*j)) : nullptr;
        send_json(res, body);
      });
    });

    if (!cfg_.ui_dir.empty() && std::filesystem::is_directory(cfg_.ui_dir)) {
      server_.set_mount_point("/", cfg_.ui_dir.string());
    } else {
      server_.Get("/", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(
            "<!doctype html><meta charset=\"utf-8\"><title>forge annotate</title>"
            "<p>UI bundle not installed. API: <code>/session/{id}/next?stratum=both</code>, "
            "<code>POST /session/{id}/judgment</code>, <code>/session/{id}/tally</code>.</p>",
            "text/html; charset=utf-8");
      });
    }
  }

  AnnotationServerConfig cfg_;
  std::vector<SamplePair> samples_;
  httplib::Server server_;
  std::mutex sessions_mutex_;
  std::map<std::string, std::unique_ptr<AnnotationSession>> sessions_;
};

}  // namespace forge

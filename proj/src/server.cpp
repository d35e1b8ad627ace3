#include "sgpad/server.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <thread>

#include "httplib.h"
#include "sgpad/annotation.hpp"
#include "sgpad/error.hpp"
#include "sgpad/image_io.hpp"

namespace sgpad {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

HttpReply error_reply(int status, const std::string& msg, const std::string& field = "") {
  json j = {{"error", msg}};
  if (!field.empty()) j["field"] = field;
  return {status, j.dump(), "application/json"};
}

bool safe_id(const std::string& s) {
  if (s.empty() || s.size() > 128 || s.find("__") != std::string::npos || s.front() == '.')
    return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_' && c != '.') return false;
  return true;
}

std::string mime_for(const fs::path& p) {
  auto ext = p.extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext == ".png") return "image/png";
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  if (ext == ".bmp") return "image/bmp";
  if (ext == ".tif" || ext == ".tiff") return "image/tiff";
  return "application/octet-stream";
}

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

AnnotationService::AnnotationService(Manifest manifest, AssignmentPlan plan, std::string storage_dir)
    : manifest_(std::move(manifest)), plan_(std::move(plan)), dir_(std::move(storage_dir)) {
  for (const auto& [a, ids] : plan_.by_annotator) {
    require(safe_id(a), ErrorCode::InvalidArgument, "annotator id '" + a + "' is not filename-safe");
    for (const auto& id : ids) {
      require(manifest_.find(id) != nullptr, ErrorCode::NotFound,
              "assigned sample '" + id + "' is not in the manifest");
      require(safe_id(id), ErrorCode::InvalidArgument, "sample id '" + id + "' is not filename-safe");
    }
  }
  fs::create_directories(fs::path(dir_) / "annotations");
}

std::string AnnotationService::export_path(const std::string& sample_id,
                                           const std::string& annotator_id) const {
  return (fs::path(dir_) / "annotations" / (sample_id + "__" + annotator_id + ".json")).string();
}

std::string AnnotationService::audit_log_path() const {
  return (fs::path(dir_) / "annotations" / "audit.log").string();
}

HttpReply AnnotationService::assignment(const std::string& annotator_id) const {
  const auto it = plan_.by_annotator.find(annotator_id);
  if (it == plan_.by_annotator.end()) return error_reply(404, "unknown annotator");
  json list = json::array();
  for (const auto& id : it->second) {
    // labels are deliberately withheld
    json d = {{"sample_id", id}, {"image_url", "/image/" + id}};
    d["submitted"] = fs::exists(export_path(id, annotator_id));
    list.push_back(d);
  }
  return {200, json{{"annotator_id", annotator_id}, {"samples", list}}.dump(), "application/json"};
}

HttpReply AnnotationService::image(const std::string& sample_id) const {
  const SampleRecord* r = manifest_.find(sample_id);
  if (!r) return error_reply(404, "unknown sample");
  try {
    return {200, read_file(r->image_path), mime_for(r->image_path)};
  } catch (const Error& e) {
    return error_reply(500, e.what());
  }
}

HttpReply AnnotationService::submit(const std::string& body) {
  AnnotationExport a;
  try {
    a = parse_annotation(body);
  } catch (const SchemaError& e) {
    return error_reply(400, e.what(), e.field());
  } catch (const Error& e) {
    return error_reply(400, e.what());
  }
  if (!plan_.assigned(a.annotator_id, a.sample_id))
    return error_reply(403, "sample '" + a.sample_id + "' is not assigned to annotator '" +
                                a.annotator_id + "'");
  const std::string path = export_path(a.sample_id, a.annotator_id);
  std::lock_guard lock(audit_mu_);
  const bool existed = fs::exists(path);
  try {
    write_file_atomic(path, body);
    if (existed) {
      std::ofstream log(audit_log_path(), std::ios::app);
      log << utc_now() << "\treplaced\t" << a.sample_id << "\t" << a.annotator_id << "\n";
    }
  } catch (const Error& e) {
    return error_reply(500, e.what());
  }
  return {existed ? 200 : 201,
          json{{"status", existed ? "replaced" : "stored"}, {"sample_id", a.sample_id},
               {"annotator_id", a.annotator_id}}
              .dump(),
          "application/json"};
}

struct AnnotationServer::Impl {
  std::shared_ptr<AnnotationService> service;
  httplib::Server http;
  std::thread worker;
};

AnnotationServer::AnnotationServer(std::shared_ptr<AnnotationService> service)
    : impl_(std::make_unique<Impl>()) {
  impl_->service = std::move(service);
  auto send = [](httplib::Response& res, const HttpReply& r) {
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };
  auto* svc = impl_->service.get();
  impl_->http.Get(R"(/assignment/([^/]+))", [svc, send](const httplib::Request& req, httplib::Response& res) {
    send(res, svc->assignment(req.matches[1]));
  });
  impl_->http.Get(R"(/image/([^/]+))", [svc, send](const httplib::Request& req, httplib::Response& res) {
    send(res, svc->image(req.matches[1]));
  });
  impl_->http.Post("/annotation", [svc, send](const httplib::Request& req, httplib::Response& res) {
    send(res, svc->submit(req.body));
  });
}

AnnotationServer::~AnnotationServer() { stop(); }

void AnnotationServer::listen(const std::string& host, int port) {
  require(impl_->http.listen(host, port), ErrorCode::Io,
          "cannot listen on " + host + ":" + std::to_string(port));
}

int AnnotationServer::start(const std::string& host) {
  const int port = impl_->http.bind_to_any_port(host);
  require(port > 0, ErrorCode::Io, "cannot bind " + host);
  impl_->worker = std::thread([this] { impl_->http.listen_after_bind(); });
  impl_->http.wait_until_ready();
  return port;
}

void AnnotationServer::stop() {
  if (!impl_) return;
  impl_->http.stop();
  if (impl_->worker.joinable()) impl_->worker.join();
}

}  // namespace sgpad

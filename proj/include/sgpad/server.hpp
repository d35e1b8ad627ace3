#pragma once

#include <memory>
#include <mutex>
#include <string>

#include "sgpad/assignment.hpp"
#include "sgpad/manifest.hpp"

namespace sgpad {

struct HttpReply {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

// Route handlers for the annotation UI. They hold no per-request state; the
// plan and manifest are read-only once the server is constructed.
class AnnotationService {
 public:
  AnnotationService(Manifest manifest, AssignmentPlan plan, std::string storage_dir);

  HttpReply assignment(const std::string& annotator_id) const;
  HttpReply image(const std::string& sample_id) const;
  HttpReply submit(const std::string& body);

  std::string export_path(const std::string& sample_id, const std::string& annotator_id) const;
  std::string audit_log_path() const;

 private:
  Manifest manifest_;
  AssignmentPlan plan_;
  std::string dir_;
  std::mutex audit_mu_;
};

class AnnotationServer {
 public:
  explicit AnnotationServer(std::shared_ptr<AnnotationService> service);
  ~AnnotationServer();
  AnnotationServer(const AnnotationServer&) = delete;
  AnnotationServer& operator=(const AnnotationServer&) = delete;

  // Binds and serves until stop(); port 0 picks a free port. Blocking.
  void listen(const std::string& host, int port);
  // Binds to a free port and serves on a background thread. Returns the port.
  int start(const std::string& host = "127.0.0.1");
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace sgpad

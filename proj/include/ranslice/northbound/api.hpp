#pragma once

// HTTP+JSON provisioning, query and subscription API.

#include <memory>
#include <optional>
#include <string>

#include "ranslice/northbound/scenario.hpp"

namespace ranslice::northbound {

class Service;

struct ApiConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::optional<std::string> scenarioPath;
};

ApiConfig parseApiConfig(const json& j);
ApiConfig loadApiConfig(const std::string& path);

class ApiServer {
 public:
  /// With a scenario, /sim/step and /sim/run replay its timeline.
  ApiServer(Service& service, std::optional<Scenario> scenario = std::nullopt);
  ~ApiServer();

  /// Binds; returns the bound port.
  int bind(const std::string& host, int port);
  /// Serves until stop(). Call after bind().
  void serve();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ranslice::northbound

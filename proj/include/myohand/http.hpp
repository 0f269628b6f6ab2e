#ifndef MYOHAND_HTTP_HPP
#define MYOHAND_HTTP_HPP

#include <string>

#include <httplib.h>

#include "myohand/service.hpp"

namespace myohand {

inline constexpr int kDefaultPort = 8765;

// Placeholder page for GET / when no UI bundle directory is mounted.
inline constexpr const char* kIndexPage = R"(<!doctype html>
<html><head><meta charset="utf-8"><title>myohand design service</title></head>
<body>
<h1>myohand design service</h1>
<ul>
<li>GET <a href="/api/project">/api/project</a></li>
<li>POST /api/evaluate-axis {"azimuth_deg", "elevation_deg", "x0_mm", "y0_mm", "targets"?}</li>
<li>POST /api/sweep {"grip": "opposed"|"lateral", "step_deg", "tau_in_Nmm"?, "omega_in_deg_s"?}</li>
</ul>
</body></html>
)";

inline void add_cors(httplib::Response& res) {
  res.set_header("Access-Control-Allow-Origin", "*");
  res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
  res.set_header("Access-Control-Allow-Headers", "Content-Type");
}

/// Wires the service handlers onto a server. `ui_dir`, when non-empty, is
/// mounted at / in place of the placeholder page.
inline void bind_routes(httplib::Server& server, const DesignService& service, const std::string& ui_dir = "") {
  auto send = [](httplib::Response& res, const ServiceResponse& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };

  server.set_post_routing_handler([](const httplib::Request&, httplib::Response& res) { add_cors(res); });
  server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  server.Get("/api/project", [&service](const httplib::Request&, httplib::Response& res) {
    res.set_content(service.project_text(), "application/json");
  });
  server.Post("/api/evaluate-axis", [&service, send](const httplib::Request& req, httplib::Response& res) {
    send(res, service.evaluate_axis(req.body));
  });
  server.Post("/api/sweep", [&service, send](const httplib::Request& req, httplib::Response& res) {
    send(res, service.sweep(req.body));
  });

  if (!ui_dir.empty() && server.set_mount_point("/", ui_dir)) return;
  server.Get("/", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(kIndexPage, "text/html; charset=utf-8");
  });
}

}  // namespace myohand

#endif  // MYOHAND_HTTP_HPP

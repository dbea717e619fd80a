// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

namespace httplib {
class Server;
}

namespace qoe::workbench {

class SessionService;

/// Binds the wire protocol routes to `service`.
void register_routes(httplib::Server& server, SessionService& service);

/// Blocks serving on host:port until the process is stopped.
void serve(SessionService& service, const std::string& host, int port);

}  // namespace qoe::workbench

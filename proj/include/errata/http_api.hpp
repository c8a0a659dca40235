#pragma once

#include <string>

#include "errata/error.hpp"
#include "errata/service.hpp"

namespace httplib {
class Server;
}

namespace errata {

/// HTTP status for a library error: 400 bad input, 404 unknown ids, 409 state conflicts.
int http_status(Errc code) noexcept;

/// Mounts the /api routes on `server`. The trainer must outlive it.
void mount_api(httplib::Server& server, Trainer& trainer);

}  // namespace errata

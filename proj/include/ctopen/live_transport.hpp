#pragma once

#include <memory>

#include "ctopen/config.hpp"
#include "ctopen/transport.hpp"

namespace ctopen {

// Live network transport over the configured backend endpoints. Grounded-LLM,
// judge and OCR backends are POSTed JSON; the web index, literature databases
// and page fetches are GETs. Never used when a replay directory is set.
std::shared_ptr<Transport> make_live_transport(const RunConfig& config);

// Full stack for a run: replay store or live client, optional recorder,
// retry policy with exponential backoff.
std::shared_ptr<Transport> make_transport_stack(const RunConfig& config);

std::string base64_encode(const std::string& bytes);

}  // namespace ctopen

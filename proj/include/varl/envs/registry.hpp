#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "varl/envs/environment.hpp"

namespace varl::envs {

/// Builds an environment by name. `instance_seed` fixes per-instance draws
/// (the grid goal); per-episode randomness comes from reset(seed).
std::unique_ptr<Environment> make_env(std::string_view name, const EnvOptions& options = {},
                                      std::uint64_t instance_seed = 0);

/// Names accepted by make_env.
std::vector<std::string> env_names();

}  // namespace varl::envs

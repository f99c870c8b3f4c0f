#include "varl/envs/registry.hpp"

#include "varl/envs/chain_mdp.hpp"
#include "varl/envs/grid_world.hpp"
#include "varl/envs/point_envs.hpp"
#include "varl/envs/tiny_mdp.hpp"
#include "varl/errors.hpp"

namespace varl::envs {

std::unique_ptr<Environment> make_env(std::string_view name, const EnvOptions& options, std::uint64_t instance_seed) {
    if (name == "SparseGridWorld") return SparseGridWorld::from_options(options, instance_seed);
    if (name == "ChainMDP") return ChainMDP::from_options(options);
    if (name == "PointReach") return PointReach::from_options(options);
    if (name == "PointPush") return PointPush::from_options(options);
    if (name == "TinyMDP") return TinyMDP::from_options(options);
    throw ConfigError("unknown environment '" + std::string(name) + "'");
}

std::vector<std::string> env_names() { return {"SparseGridWorld", "ChainMDP", "PointReach", "PointPush", "TinyMDP"}; }

}  // namespace varl::envs

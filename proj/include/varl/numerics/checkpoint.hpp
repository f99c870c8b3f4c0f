#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "varl/numerics/dense_net.hpp"

namespace varl::numerics {

struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> values;

    bool operator==(const Tensor&) const = default;
};

using TensorMap = std::map<std::string, Tensor>;

inline constexpr int kCheckpointVersion = 1;

// Text layout:
//   varl-checkpoint <version>
//   tensors <count>
//   tensor <name> <rank> <dim>...
//   <value> ...            (C99 hex floats, exact round trip)
//   end
void write_checkpoint(std::ostream& out, const TensorMap& tensors);
TensorMap read_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, const TensorMap& tensors);
TensorMap load_checkpoint(const std::filesystem::path& path);

/// Adds `<prefix>.layer<l>.weight` / `.bias` entries for every layer.
void export_net(const DenseNet& net, const std::string& prefix, TensorMap& out);

/// Copies parameters back; shapes must match the network exactly.
void import_net(DenseNet& net, const std::string& prefix, const TensorMap& in);

}  // namespace varl::numerics

#include "varl/numerics/checkpoint.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>

#include "varl/errors.hpp"

namespace varl::numerics {
namespace {

std::size_t element_count(const std::vector<std::size_t>& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string hex(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%a", v);
    return buf;
}

double parse_hex(const std::string& token) {
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end == token.c_str() || *end != '\0') throw Error("checkpoint: bad value '" + token + "'");
    return v;
}

}  // namespace

void write_checkpoint(std::ostream& out, const TensorMap& tensors) {
    out << "varl-checkpoint " << kCheckpointVersion << '\n';
    out << "tensors " << tensors.size() << '\n';
    for (const auto& [name, t] : tensors) {
        if (element_count(t.shape) != t.values.size()) {
            throw DimensionError("checkpoint: tensor '" + name + "' shape does not match its values");
        }
        if (name.find_first_of(" \t\n") != std::string::npos) {
            throw Error("checkpoint: tensor names may not contain whitespace");
        }
        out << "tensor " << name << ' ' << t.shape.size();
        for (std::size_t d : t.shape) out << ' ' << d;
        out << '\n';
        for (std::size_t i = 0; i < t.values.size(); ++i) {
            if (i) out << ' ';
            out << hex(t.values[i]);
        }
        out << '\n';
    }
    out << "end\n";
}

TensorMap read_checkpoint(std::istream& in) {
    std::string word;
    int version = 0;
    if (!(in >> word >> version) || word != "varl-checkpoint") throw Error("checkpoint: missing header");
    if (version != kCheckpointVersion) {
        throw Error("checkpoint: unsupported version " + std::to_string(version));
    }
    std::size_t count = 0;
    if (!(in >> word >> count) || word != "tensors") throw Error("checkpoint: missing tensor count");
    TensorMap tensors;
    for (std::size_t k = 0; k < count; ++k) {
        std::string name;
        std::size_t rank = 0;
        if (!(in >> word >> name >> rank) || word != "tensor") throw Error("checkpoint: malformed tensor header");
        Tensor t;
        t.shape.resize(rank);
        for (auto& d : t.shape) {
            if (!(in >> d)) throw Error("checkpoint: malformed shape for '" + name + "'");
        }
        t.values.resize(element_count(t.shape));
        for (auto& v : t.values) {
            std::string token;
            if (!(in >> token)) throw Error("checkpoint: truncated values for '" + name + "'");
            v = parse_hex(token);
        }
        if (!tensors.emplace(name, std::move(t)).second) throw Error("checkpoint: duplicate tensor '" + name + "'");
    }
    if (!(in >> word) || word != "end") throw Error("checkpoint: missing end marker");
    return tensors;
}

void save_checkpoint(const std::filesystem::path& path, const TensorMap& tensors) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    write_checkpoint(out, tensors);
}

TensorMap load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    return read_checkpoint(in);
}

void export_net(const DenseNet& net, const std::string& prefix, TensorMap& out) {
    const auto& sizes = net.layer_sizes();
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        const auto w = net.weights(l);
        const auto b = net.bias(l);
        const std::string base = prefix + ".layer" + std::to_string(l);
        out[base + ".weight"] = Tensor{{sizes[l + 1], sizes[l]}, {w.begin(), w.end()}};
        out[base + ".bias"] = Tensor{{sizes[l + 1]}, {b.begin(), b.end()}};
    }
}

void import_net(DenseNet& net, const std::string& prefix, const TensorMap& in) {
    const auto& sizes = net.layer_sizes();
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        const std::string base = prefix + ".layer" + std::to_string(l);
        const auto wit = in.find(base + ".weight");
        const auto bit = in.find(base + ".bias");
        if (wit == in.end() || bit == in.end()) throw Error("checkpoint: missing tensors for " + base);
        if (wit->second.shape != std::vector<std::size_t>{sizes[l + 1], sizes[l]} ||
            bit->second.shape != std::vector<std::size_t>{sizes[l + 1]}) {
            throw DimensionError("checkpoint: shape mismatch for " + base);
        }
        std::copy(wit->second.values.begin(), wit->second.values.end(), net.weights(l).begin());
        std::copy(bit->second.values.begin(), bit->second.values.end(), net.bias(l).begin());
    }
}

}  // namespace varl::numerics

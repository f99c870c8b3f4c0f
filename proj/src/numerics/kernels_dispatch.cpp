#include "varl/numerics/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace varl::numerics::kernels {
namespace {

const KernelTable* detect() {
    if (const char* forced = std::getenv("VARL_KERNELS")) {
        if (std::string(forced) == "scalar") return &scalar_table();
    }
    if (const KernelTable* simd = avx2_table()) return simd;
    return &scalar_table();
}

std::atomic<const KernelTable*>& slot() {
    static std::atomic<const KernelTable*> current{detect()};
    return current;
}

}  // namespace

const KernelTable& active() { return *slot().load(std::memory_order_acquire); }

bool select(std::string_view name) {
    if (name == "scalar") {
        slot().store(&scalar_table(), std::memory_order_release);
        return true;
    }
    if (name == "avx2") {
        if (const KernelTable* simd = avx2_table()) {
            slot().store(simd, std::memory_order_release);
            return true;
        }
    }
    return false;
}

}  // namespace varl::numerics::kernels

#include "support.hpp"

#include "presslab/cover.hpp"

namespace testsupport {

Point Gen::core_point(const System& sys, int n) {
    if (sys.domain() == presslab::Domain::Torus) return point(sys);
    auto core = presslab::interval_core(sys, n);
    const auto& iv = core[integer(0, static_cast<int>(core.size()) - 1)];
    return {iv[0] + uniform() * (iv[1] - iv[0]), 0.0};
}

std::vector<presslab::ZooEntry> zoo() { return presslab::system_zoo(); }

}  // namespace testsupport

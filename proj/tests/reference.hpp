#ifndef CAULK_TESTS_REFERENCE_HPP
#define CAULK_TESTS_REFERENCE_HPP

#include "caulk/function_spaces.hpp"

namespace caulk_tests {

// Reference compositions used across suites. The middle layer of both is a
// degree-1 (affine) ridge, so an oracle split around it is recoverable by a
// depth-0 adapter.
inline caulk::CompositionSpec reference3(std::uint64_t seed = 11) {
    caulk::CompositionSpec spec;
    spec.seed = seed;
    spec.layers = {
        {1, 2, 2, 2, 2.0, caulk::RoughnessMode::polynomial},
        {2, 2, 1, 2, 1.0, caulk::RoughnessMode::polynomial},
        {3, 1, 1, 1, 2.0, caulk::RoughnessMode::polynomial},
    };
    return spec;
}

inline caulk::CompositionSpec reference4(std::uint64_t seed = 23) {
    caulk::CompositionSpec spec;
    spec.seed = seed;
    spec.layers = {
        {1, 2, 2, 2, 2.0, caulk::RoughnessMode::polynomial},
        {2, 2, 1, 2, 1.0, caulk::RoughnessMode::polynomial},
        {3, 1, 1, 1, 2.0, caulk::RoughnessMode::polynomial},
        {4, 1, 1, 1, 2.0, caulk::RoughnessMode::polynomial},
    };
    return spec;
}

// Identity layer: kink with c=1, b=0, o=0, beta=1 acts as x -> x on [0,1].
inline caulk::CoordinateFn identity_coordinate() {
    caulk::CoordinateFn c;
    c.active = {0};
    c.direction = {1.0};
    c.mode = caulk::RoughnessMode::kink;
    c.beta = 1.0;
    c.scale = 1.0;
    c.kink = 0.0;
    c.offset = 0.0;
    return c;
}

inline caulk::TargetFunction identity_composition(int layers = 2) {
    caulk::TargetFunction f;
    for (int i = 1; i <= layers; ++i) {
        f.spec.layers.push_back({i, 1, 1, 1, 1.0, caulk::RoughnessMode::kink});
        caulk::TargetLayer layer;
        layer.in_dim = layer.out_dim = 1;
        layer.coords.push_back(identity_coordinate());
        f.layers.push_back(layer);
    }
    return f;
}

}  // namespace caulk_tests

#endif

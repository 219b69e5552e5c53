#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <vector>

namespace lradapt {

/// Portable seeded generator.
///
/// Engine: std::mt19937_64 (bit-exact across conforming standard libraries).
/// uniform(): top 53 bits of one engine output scaled by 2^-53, in [0, 1).
/// normal(): Box–Muller on two uniforms, both variates used in turn.
/// below(n): rejection sampling on the 64-bit output, no modulo bias.
/// The std:: distributions are avoided because their algorithms are
/// implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }
    double uniform();
    double normal();
    double normal(double mean, double stddev) { return mean + stddev * normal(); }
    std::uint64_t below(std::uint64_t n);
    void shuffle(std::vector<Eigen::Index>& items);

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace lradapt

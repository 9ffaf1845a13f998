#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace cqkit {

/// mt19937_64 with a fixed double extraction, identical across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
    std::uint64_t next() { return gen_(); }
    /// Uniform integer in [lo, hi].
    std::int64_t integer(std::int64_t lo, std::int64_t hi);

private:
    std::mt19937_64 gen_;
};

double radical_inverse(std::uint64_t index, unsigned base);

/// n Halton points in [0,1)^d (indices 1..n), Cranley-Patterson rotated by
/// a shift drawn from seed.
std::vector<Eigen::VectorXd> halton_points(std::size_t n, std::size_t d, std::uint64_t seed);

/// n points in the closed unit ball (Halton stream, rejection).
std::vector<Eigen::VectorXd> ball_points(std::size_t n, std::size_t d, std::uint64_t seed);

/// n unit vectors; d = 2 gives equally spaced angles.
std::vector<Eigen::VectorXd> sphere_points(std::size_t n, std::size_t d, std::uint64_t seed);

}  // namespace cqkit

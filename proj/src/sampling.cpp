#include "cqkit/sampling.hpp"

#include <cmath>
#include <numbers>

namespace cqkit {

namespace {

constexpr unsigned kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

}  // namespace

std::int64_t Rng::integer(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(next() % span);
}

double radical_inverse(std::uint64_t index, unsigned base) {
    double inv = 1.0 / base;
    double factor = inv;
    double r = 0.0;
    while (index > 0) {
        r += static_cast<double>(index % base) * factor;
        index /= base;
        factor *= inv;
    }
    return r;
}

std::vector<Eigen::VectorXd> halton_points(std::size_t n, std::size_t d, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::VectorXd shift(d);
    for (std::size_t i = 0; i < d; ++i) {
        shift[i] = rng.uniform();
    }
    std::vector<Eigen::VectorXd> out;
    out.reserve(n);
    for (std::size_t k = 1; k <= n; ++k) {
        Eigen::VectorXd u(d);
        for (std::size_t i = 0; i < d; ++i) {
            double v = radical_inverse(k, kPrimes[i % std::size(kPrimes)]) + shift[i];
            u[i] = v >= 1.0 ? v - 1.0 : v;
        }
        out.push_back(std::move(u));
    }
    return out;
}

std::vector<Eigen::VectorXd> ball_points(std::size_t n, std::size_t d, std::uint64_t seed) {
    std::vector<Eigen::VectorXd> out;
    out.reserve(n);
    std::size_t batch = 2 * n + 8;
    while (out.size() < n) {
        out.clear();
        for (auto& u : halton_points(batch, d, seed)) {
            Eigen::VectorXd v = 2.0 * u.array() - 1.0;
            if (v.squaredNorm() <= 1.0) {
                out.push_back(std::move(v));
                if (out.size() == n) {
                    break;
                }
            }
        }
        batch *= 2;
    }
    return out;
}

std::vector<Eigen::VectorXd> sphere_points(std::size_t n, std::size_t d, std::uint64_t seed) {
    std::vector<Eigen::VectorXd> out;
    out.reserve(n);
    if (d == 2) {
        for (std::size_t k = 0; k < n; ++k) {
            const double a = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
            Eigen::VectorXd v(2);
            v << std::cos(a), std::sin(a);
            out.push_back(std::move(v));
        }
        return out;
    }
    for (auto& v : ball_points(2 * n, d, seed)) {
        const double r = v.norm();
        if (r > 1e-3) {
            out.push_back(v / r);
            if (out.size() == n) {
                break;
            }
        }
    }
    return out;
}

}  // namespace cqkit

#ifndef MIRAGE_RANDOM_HPP
#define MIRAGE_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>

#include <Eigen/Dense>

namespace mirage {

/// splitmix64 step; used to derive independent stream seeds from one root seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic child seed for a named stream. Every random draw in the
/// simulator comes from a (root seed, stream name, index) triple so that
/// streams are independent and runs are reproducible bit for bit.
inline std::uint64_t derive_seed(std::uint64_t root, std::string_view stream,
                                 std::uint64_t index = 0) {
    std::uint64_t h = 0xcbf29ce484222325ULL; // FNV-1a over the stream tag
    for (char c : stream) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    std::uint64_t state = root ^ h;
    std::uint64_t a = splitmix64(state);
    state ^= index * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL;
    std::uint64_t b = splitmix64(state);
    return a ^ (b + 0x9e3779b97f4a7c15ULL);
}

/// Seeded generator with explicit floating-point conversions. The standard
/// distributions are implementation-defined, so uniform and normal draws are
/// produced here from raw mt19937_64 output to keep results identical across
/// standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t raw() { return gen_(); }

    /// Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform in (0, 1]; safe as a log() argument.
    double uniform_pos() {
        return (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Zero-mean Gaussian via Box-Muller. Consumes two raw draws per call;
    /// no spare is cached so the stream position is easy to reason about.
    double normal(double sigma = 1.0) {
        const double u1 = uniform_pos();
        const double u2 = uniform();
        return sigma * std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

    Eigen::Vector3d normal3(double sigma) {
        const double x = normal(sigma);
        const double y = normal(sigma);
        const double z = normal(sigma);
        return {x, y, z};
    }

    /// Uniformly distributed unit vector.
    Eigen::Vector3d unit_vector() {
        while (true) {
            Eigen::Vector3d v = normal3(1.0);
            const double n = v.norm();
            if (n > 1e-12) return v / n;
        }
    }

    /// Rotation drawn uniformly from SO(3) (normalized 4-normal quaternion).
    Eigen::Matrix3d rotation() {
        while (true) {
            const double w = normal(1.0);
            const double x = normal(1.0);
            const double y = normal(1.0);
            const double z = normal(1.0);
            const double n = std::sqrt(w * w + x * x + y * y + z * z);
            if (n > 1e-12)
                return Eigen::Quaterniond(w / n, x / n, y / n, z / n)
                    .toRotationMatrix();
        }
    }

    /// Small rotation with rotation-vector drawn from an isotropic Gaussian.
    Eigen::Matrix3d rotation_perturbation(double sigma_rad) {
        const Eigen::Vector3d v = normal3(sigma_rad);
        const double angle = v.norm();
        if (angle < 1e-15) return Eigen::Matrix3d::Identity();
        return Eigen::AngleAxisd(angle, v / angle).toRotationMatrix();
    }

private:
    std::mt19937_64 gen_;
};

} // namespace mirage

#endif

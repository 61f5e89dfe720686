#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

namespace xover {

// Splittable pseudorandom generator built on SplitMix64 (Steele, Lea & Flood;
// Vigna's fixed-increment variant). 64-bit state, full-period, passes BigCrush.
//
// Substreams: stream(key) derives an independent generator as a pure function
// of (current state, key) without advancing the parent. Callers key substreams
// by stable indices (patient index, replicate index), so adding a patient or
// replicate never perturbs the draws of the others. Derive all substreams from
// a root generator before drawing from it.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    // SplitMix64 finalizer: bijective 64-bit mixer.
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    // Independent substream for `key`; the parent state is not advanced.
    Rng stream(std::uint64_t key) const {
        return Rng(mix(state_ ^ mix(key + 0x9e3779b97f4a7c15ULL)));
    }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller; uses (0,1] for the log argument.
    double normal() {
        const double u = 1.0 - uniform01();
        const double v = uniform01();
        return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
    }

    // Unbiased integer on [0, n) (Lemire's multiply-with-rejection).
    std::uint64_t below(std::uint64_t n) {
        unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < n) {
            const std::uint64_t threshold = -n % n;
            while (lo < threshold) {
                m = static_cast<unsigned __int128>(next_u64()) * n;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    // Index draw from a normalized probability vector (CDF inversion).
    std::size_t categorical(std::span<const double> probs) {
        const double u = uniform01();
        double cum = 0.0;
        for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
            cum += probs[i];
            if (u < cum) return i;
        }
        return probs.empty() ? 0 : probs.size() - 1;
    }

    // Fisher-Yates shuffle.
    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
};

}  // namespace xover

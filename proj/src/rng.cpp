#include "a2g/rng.hpp"

namespace a2g {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

namespace {

std::uint64_t mix_key(std::uint64_t seed, const StreamId& id) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ static_cast<std::uint64_t>(id.purpose));
    h = splitmix64(h ^ id.client);
    h = splitmix64(h ^ id.round);
    return h;
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, StreamId id)
    : seed_(seed), id_(id), engine_(mix_key(seed, id)) {}

double RngStream::uniform() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
}

double RngStream::uniform(double low, double high) {
    return std::uniform_real_distribution<double>(low, high)(engine_);
}

double RngStream::normal() {
    return std::normal_distribution<double>(0.0, 1.0)(engine_);
}

bool RngStream::bernoulli(double p) { return uniform() < p; }

int RngStream::rademacher() { return (engine_() >> 63) != 0 ? 1 : -1; }

std::uint64_t RngStream::below(std::uint64_t n) {
    return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
}

}  // namespace a2g

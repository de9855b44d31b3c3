#pragma once

#include <cstdint>
#include <random>

namespace a2g {

// Purpose tags keep independent consumers of randomness on disjoint streams,
// so adding a new consumer never shifts an existing sequence.
enum class StreamPurpose : std::uint64_t {
    init = 0,
    data = 1,
    split = 2,
    partition = 3,
    training = 4,
    fidelity = 5,
    latency = 6,
    test = 7,
};

struct StreamId {
    StreamPurpose purpose = StreamPurpose::init;
    std::uint64_t client = 0;
    std::uint64_t round = 0;

    friend bool operator==(const StreamId&, const StreamId&) = default;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Deterministic random stream keyed by (seed, purpose, client, round).
// Identical keys always reproduce the identical sequence.
class RngStream {
public:
    RngStream(std::uint64_t seed, StreamId id);

    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] const StreamId& id() const noexcept { return id_; }

    double uniform();                      // [0, 1)
    double uniform(double low, double high);
    double normal();                       // standard normal
    bool bernoulli(double p);              // true with probability p
    int rademacher();                      // +1 or -1, equiprobable
    std::uint64_t below(std::uint64_t n);  // uniform integer in [0, n)

    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::uint64_t seed_;
    StreamId id_;
    std::mt19937_64 engine_;
};

}  // namespace a2g

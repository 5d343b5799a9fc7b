#include "sphtrunc/rng.hpp"

#include <boost/random/chi_squared_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

namespace sphtrunc {

namespace {

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_index)
    : seed_(seed), stream_index_(stream_index), engine_(make_engine(seed, stream_index)) {}

double RngStream::normal() {
    boost::random::normal_distribution<double> dist;
    return dist(engine_);
}

double RngStream::chi_square(double dof) {
    boost::random::chi_squared_distribution<double> dist(dof);
    return dist(engine_);
}

double RngStream::uniform() {
    boost::random::uniform_01<double> dist;
    return dist(engine_);
}

}  // namespace sphtrunc

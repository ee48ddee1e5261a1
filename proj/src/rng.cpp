#include "carlasso/rng.hpp"

#include <sstream>

#include "carlasso/error.hpp"

namespace carlasso {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_(stream_id) {
  std::uint64_t s = seed ^ (0xD1B54A32D192ED03ULL * (stream_id + 1));
  // seed_seq output is fully specified by the standard.
  std::uint32_t words[8];
  for (int i = 0; i < 4; ++i) {
    std::uint64_t v = splitmix64(s);
    words[2 * i] = static_cast<std::uint32_t>(v);
    words[2 * i + 1] = static_cast<std::uint32_t>(v >> 32);
  }
  std::seed_seq seq(std::begin(words), std::end(words));
  engine_.seed(seq);
}

std::string RngStream::serialize() const {
  std::ostringstream os;
  os << seed_ << ' ' << stream_ << ' ' << engine_;
  return os.str();
}

RngStream RngStream::deserialize(const std::string& text) {
  std::istringstream is(text);
  RngStream r;
  is >> r.seed_ >> r.stream_ >> r.engine_;
  if (is.fail()) throw Error(ErrorKind::InvalidArgument, "malformed RNG state");
  return r;
}

}  // namespace carlasso

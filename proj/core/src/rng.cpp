#include "mbae/rng.hpp"

#include <sstream>

#include "mbae/errors.hpp"

namespace mbae {

std::string Rng::serialize() const {
  std::ostringstream out;
  out << engine_;
  return out.str();
}

void Rng::deserialize(const std::string& state) {
  std::istringstream in(state);
  in >> engine_;
  if (in.fail()) {
    throw IoError("malformed rng state string");
  }
}

std::uint64_t Rng::derive_stream_seed(std::uint64_t master, std::uint64_t stream_id) {
  // splitmix64 finalizer over the combined word.
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream_id + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace mbae

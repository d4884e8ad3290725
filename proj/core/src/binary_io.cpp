#include "mbae/binary_io.hpp"

#include <bit>

namespace mbae {

void BinaryWriter::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

double BinaryReader::f64() { return std::bit_cast<double>(u64()); }

}  // namespace mbae

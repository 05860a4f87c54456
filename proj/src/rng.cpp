#include "dipolar/rng.hpp"

#include <sstream>

#include "dipolar/types.hpp"

namespace dipolar {

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32), 0x5eedu};
  engine_.seed(seq);
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0)
    throw DomainError("Rng::below(0)");
  // Rejection keeps the draw exactly uniform.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x;
  do
    x = engine_();
  while (x >= limit);
  return x % n;
}

std::string Rng::state() const {
  std::ostringstream os;
  os << engine_;
  return os.str();
}

void Rng::restore(const std::string& text) {
  std::istringstream is(text);
  is >> engine_;
  if (!is)
    throw IoError("malformed RNG state");
}

} // namespace dipolar

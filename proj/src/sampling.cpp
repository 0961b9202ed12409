#include "swd/sampling.hpp"

#include <cmath>
#include <random>

namespace swd {

namespace {

std::vector<unsigned> first_primes(std::size_t count) {
  std::vector<unsigned> primes;
  for (unsigned c = 2; primes.size() < count; ++c) {
    bool prime = true;
    for (unsigned p : primes) {
      if (p * p > c) break;
      if (c % p == 0) {
        prime = false;
        break;
      }
    }
    if (prime) primes.push_back(c);
  }
  return primes;
}

}  // namespace

double radical_inverse(std::size_t index, unsigned base) {
  double result = 0.0;
  double scale = 1.0 / base;
  while (index > 0) {
    result += static_cast<double>(index % base) * scale;
    index /= base;
    scale /= base;
  }
  return result;
}

HaltonSampler::HaltonSampler(std::size_t dimension, std::uint64_t seed)
    : bases_(first_primes(dimension)) {
  if (dimension == 0) throw Error(ErrorKind::InvalidArgument, "sampler dimension must be >= 1");
  std::mt19937_64 rng(seed);
  shifts_.reserve(dimension);
  // 53 high bits -> [0, 1); identical on every standard library, unlike the distributions.
  for (std::size_t d = 0; d < dimension; ++d) {
    shifts_.push_back(static_cast<double>(rng() >> 11) * 0x1.0p-53);
  }
}

Vec HaltonSampler::unit_point(std::size_t i) const {
  Vec p(static_cast<Eigen::Index>(shifts_.size()));
  for (std::size_t d = 0; d < shifts_.size(); ++d) {
    // index + 1 skips the all-zero first Halton point
    double v = radical_inverse(i + 1, bases_[d]) + shifts_[d];
    p[static_cast<Eigen::Index>(d)] = v - std::floor(v);
  }
  return p;
}

Vec HaltonSampler::point_in(const Box& box, std::size_t i) const {
  const Vec u = unit_point(i);
  return box.lower + (box.upper - box.lower).cwiseProduct(u);
}

}  // namespace swd

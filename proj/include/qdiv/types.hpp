#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace qdiv {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;
using Seed = std::uint64_t;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// All logarithms are base 2; divergence values are in bits.
inline double log2_safe(double x) {
  if (x <= 0.0) return -kInf;
  return std::log2(x);
}

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define QDIV_ERROR(Name)                                            \
  struct Name : Error {                                             \
    explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
  }

QDIV_ERROR(NonHermitian);
QDIV_ERROR(DomainError);
QDIV_ERROR(DimensionMismatch);
QDIV_ERROR(InvalidState);
QDIV_ERROR(InvalidChannel);
QDIV_ERROR(InvalidPOVM);
QDIV_ERROR(NotStochastic);
QDIV_ERROR(NotClassical);
QDIV_ERROR(ZeroAcceptance);
QDIV_ERROR(InfiniteRenyi);
QDIV_ERROR(PreconditionViolated);
QDIV_ERROR(BracketInverted);
QDIV_ERROR(NumericalGap);
QDIV_ERROR(CapExceeded);
QDIV_ERROR(OddDimension);
QDIV_ERROR(OddLength);
QDIV_ERROR(UnknownSuite);
QDIV_ERROR(IoError);

#undef QDIV_ERROR

// splitmix64 step; used to derive independent per-case seeds from a master seed.
inline Seed derive_seed(Seed master, Seed index) {
  Seed z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace qdiv

#include "catch_amalgamated.hpp"

#include "modrec/lasso_b2r2.hpp"
#include "modrec/fsr_admm.hpp"
#include "modrec/spectral_operators.hpp"
#include "modrec/testing/dense_reference.hpp"

#include <random>

using Catch::Matchers::WithinAbs;
using namespace modrec;
using testing::ComplexMatrix;
using testing::RealMatrix;

namespace {

RealVector random_real(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  RealVector out(n);
  for (auto& v : out) v = normal(rng);
  return out;
}

ComplexVector random_complex(Eigen::Index n, std::uint64_t seed) {
  ComplexVector out(n);
  out.real() = random_real(n, seed);
  out.imag() = random_real(n, seed + 7919);
  return out;
}

double rel_err(const RealVector& a, const RealVector& b) { return (a - b).norm() / std::max(b.norm(), 1e-300); }

}  // namespace

TEST_CASE("out_of_band_indices matches enumeration of the open interval", "[spectral]") {
  const auto small = out_of_band_indices(8, 2.0);
  CHECK(small.indices() == std::vector<Eigen::Index>{3, 4, 5});
  CHECK(small.size() == 3);

  const auto full_size = out_of_band_indices(1024, 6.0);
  CHECK(full_size.k_min() == 86);
  CHECK(full_size.k_max() == 938);
  CHECK(full_size.size() == 853);

  // Brute-force enumeration over a grid of (N, OF).
  for (Eigen::Index n : {8, 15, 16, 64, 100, 1024}) {
    for (double of : {1.5, 2.0, 2.5, 3.0, 4.0, 6.0, 9.0}) {
      std::vector<Eigen::Index> expected;
      for (Eigen::Index k = 0; k < n; ++k) {
        // pi/OF < 2 pi k/N < 2 pi - pi/OF, cleared of divisions (exact for these OF)
        if (2.0 * of * double(k) > double(n) && 2.0 * of * double(n - k) > double(n)) expected.push_back(k);
      }
      if (expected.empty()) {
        CHECK_THROWS_AS(out_of_band_indices(n, of), ConfigError);
        continue;
      }
      const auto mask = out_of_band_indices(n, of);
      INFO("N=" << n << " OF=" << of);
      CHECK(mask.indices() == expected);
      CHECK(mask.is_reversal_symmetric());
      CHECK_FALSE(mask.contains(0));
      for (Eigen::Index k : expected) CHECK(mask.contains((n - k) % n));
    }
  }
  CHECK_THROWS_AS(out_of_band_indices(8, 1.0), ConfigError);
  CHECK_THROWS_AS(out_of_band_indices(2, 2.0), ConfigError);
}

TEST_CASE("boundary bins at exactly pi/OF are excluded", "[spectral]") {
  // N/(2 OF) = 2 exactly: k = 2 and k = 6 sit on the boundary.
  const auto mask = out_of_band_indices(8, 2.0);
  CHECK_FALSE(mask.contains(2));
  CHECK_FALSE(mask.contains(6));
}

TEST_CASE("apply_V examples", "[spectral]") {
  const auto mask = out_of_band_indices(32, 2.0);
  CHECK(apply_V(RealVector::Zero(32), mask).isZero());

  RealVector impulse = RealVector::Zero(32);
  impulse[0] = 1.0;
  const ComplexVector ones = apply_V(impulse, mask);
  for (const auto& c : ones) CHECK(std::abs(c - std::complex<double>(1.0, 0.0)) < 1e-14);

  const auto sig = generate_test_signal(4, 32, 2.0, {.num_tones = 3});
  CHECK(apply_V(sig.samples, mask).norm() <= 1e-9 * sig.samples.norm());

  CHECK_THROWS_AS(apply_V(RealVector::Zero(31), mask), ConfigError);
}

TEST_CASE("apply_V and its adjoint agree with dense matrices", "[spectral]") {
  const auto mask = out_of_band_indices(32, 3.0);
  const PartialDftOperator op(mask);
  const ComplexMatrix v = testing::dense_V(mask);
  const RealMatrix vr = testing::dense_VR(mask);

  const RealVector x = random_real(32, 1);
  CHECK((op.apply(x) - v * x.cast<std::complex<double>>()).norm() <= 1e-10 * (v * x.cast<std::complex<double>>()).norm());

  const ComplexVector c = random_complex(mask.size(), 2);
  CHECK(rel_err(op.adjoint_real(c), vr.transpose() * real_stack(c)) <= 1e-10);
  CHECK(op.adjoint_real(ComplexVector::Zero(mask.size())).isZero());

  // Gram path: Re(V^H V x) = V^R^T V^R x
  const RealVector gram_dense = (v.adjoint() * v * x.cast<std::complex<double>>()).real();
  CHECK(rel_err(op.gram(x), gram_dense) <= 1e-10);
  CHECK(rel_err(op.adjoint_real(op.apply(x)), vr.transpose() * (vr * x)) <= 1e-10);

  CHECK_THROWS_AS(op.adjoint_real(ComplexVector::Zero(mask.size() + 1)), ConfigError);
}

TEST_CASE("adjoint consistency over random sizes", "[spectral][property]") {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> size(8, 256);
  std::uniform_real_distribution<double> of(1.2, 6.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = size(rng);
    const auto mask = out_of_band_indices(n, of(rng));
    const PartialDftOperator op(mask);
    const RealVector x = random_real(n, 100 + trial);
    const ComplexVector c = random_complex(mask.size(), 200 + trial);
    const double lhs = (op.apply(x).conjugate().array() * c.array()).sum().real();
    const double rhs = x.dot(op.adjoint_real(c));
    REQUIRE_THAT(lhs, WithinAbs(rhs, 1e-10 * std::max(1.0, std::abs(rhs))));
  }
}

TEST_CASE("dense Gram identity V^R^T V^R = Re(V^H V)", "[spectral]") {
  for (Eigen::Index n : {8, 17, 32, 64}) {
    const auto mask = out_of_band_indices(n, 2.5);
    const ComplexMatrix v = testing::dense_V(mask);
    const RealMatrix vr = testing::dense_VR(mask);
    const RealMatrix lhs = vr.transpose() * vr;
    const RealMatrix rhs = (v.adjoint() * v).real();
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12);
    // V = sqrt(N) S F_unit: V^H V is N times an orthogonal projector.
    const ComplexMatrix p = v.adjoint() * v / double(n);
    CHECK((p * p - p).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("real_stack layout and norm", "[spectral]") {
  ComplexVector one(1);
  one[0] = {1.0, 2.0};
  const RealVector s = real_stack(one);
  CHECK(s.size() == 2);
  CHECK(s[0] == 1.0);
  CHECK(s[1] == 2.0);

  ComplexVector real_only(3);
  real_only << 1.0, -2.0, 3.0;
  CHECK(real_stack(real_only).tail(3).isZero());

  const ComplexVector c = random_complex(40, 5);
  CHECK_THAT(real_stack(c).norm(), WithinAbs(c.norm(), 1e-12));
  CHECK(real_unstack(real_stack(c)) == c);
}

TEST_CASE("folded spectrum equals the residual spectrum on K", "[spectral]") {
  const double lambda = 0.25;
  const auto mask = out_of_band_indices(256, 4.0);

  // No folding: spectrum on K vanishes.
  const RealVector small = 0.2 * generate_test_signal(3, 256, 4.0).samples;
  const auto quiet = modulo_fold(small, lambda);
  CHECK(folded_spectrum(quiet, mask).norm() <= 1e-9 * quiet.samples.norm());

  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto sig = generate_test_signal(seed, 256, 4.0);
    const auto folded = modulo_fold(sig.samples, lambda);
    const auto z = residual(folded, sig).values;
    const ComplexVector lhs = folded_spectrum(folded, mask);
    const ComplexVector rhs = apply_V(z, mask);
    CHECK((lhs - rhs).norm() <= 1e-8 * rhs.norm());

    // Circular first difference keeps the identity.
    const ComplexVector dl = apply_V(circular_difference(folded.samples), mask);
    const ComplexVector dr = apply_V(circular_difference(z), mask);
    CHECK((dl - dr).norm() <= 1e-8 * dr.norm());
  }

  // Noisy: the gap is exactly the noise spectrum on K.
  const auto sig = generate_test_signal(9, 256, 4.0);
  auto folded = modulo_fold(sig.samples, lambda);
  const RealVector z = residual(folded, sig).values;
  const RealVector noise = add_awgn(RealVector::Zero(256), 20.0, mean_power(sig.samples), 4);
  folded.samples += noise;
  folded.noisy = true;
  const double gap = (folded_spectrum(folded, mask) - apply_V(z, mask)).norm();
  CHECK_THAT(gap, WithinAbs(apply_V(noise, mask).norm(), 1e-9 * gap));
  CHECK(gap > 0.0);
}

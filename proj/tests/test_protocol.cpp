#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dcqd/protocol.hpp"
#include "dcqd/rng.hpp"

using namespace dcqd;

namespace {

SingleQubitHamiltonian random_single(CounterRng& rng, double jmax = 1.5) {
  double v[3];
  double norm = 0.0;
  do {
    norm = 0.0;
    for (double& x : v) {
      x = 2.0 * rng.uniform() - 1.0;
      norm += x * x;
    }
    norm = std::sqrt(norm);
  } while (norm < 1e-3);
  const double j = jmax * (0.05 + 0.95 * rng.uniform());
  return SingleQubitHamiltonian{j * v[0] / norm, j * v[1] / norm, j * v[2] / norm};
}

}  // namespace

TEST_CASE("probe amplitude validation enforces the non-maximality margins") {
  const double r = 1.0 / std::sqrt(2.0);
  // Equal moduli rejected.
  CHECK_THROWS_AS(ProbeAmplitudes::validated(Complex(r, 0), Complex(0, r)), Error);
  // Real relative phase rejected.
  CHECK_THROWS_AS(
      ProbeAmplitudes::validated(Complex(std::sqrt(0.7), 0), Complex(std::sqrt(0.3), 0)),
      Error);
  // Unnormalized rejected.
  CHECK_THROWS_AS(ProbeAmplitudes::validated(Complex(1.0, 0), Complex(0, 0.1)), Error);
  // Vanishing amplitude rejected.
  CHECK_THROWS_AS(ProbeAmplitudes::validated(Complex(1.0, 0), Complex(0, 0)), Error);

  const auto ok =
      ProbeAmplitudes::validated(Complex(std::sqrt(0.7), 0), Complex(0, std::sqrt(0.3)));
  CHECK(ok.a_constant() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(ok.b_constant() == doctest::Approx(-4.0 * std::sqrt(0.21)).epsilon(1e-9));

  const auto preset = ProbeAmplitudes::preset();
  CHECK(std::abs(preset.alpha) == doctest::Approx(0.8));
  CHECK(std::abs(preset.beta) == doctest::Approx(0.6));
}

TEST_CASE("prepare_input: marginals and structure") {
  const auto amp =
      ProbeAmplitudes::validated(Complex(std::sqrt(0.7), 0), Complex(0, std::sqrt(0.3)));

  // The x-basis probe reduces on the probed qubit to a +x/-x mixture with
  // Bloch x component 0.7 - 0.3 = 0.4.
  const DensityMatrix rho_x = prepare_input(ProbeConfig::nonmax_x, amp);
  const Mat reduced = partial_trace(rho_x.m, {0}, {2, 2});
  const double bloch_x = std::real((pauli_x() * reduced).trace());
  CHECK(bloch_x == doctest::Approx(0.4).epsilon(1e-10));

  const DensityMatrix rho_bell = prepare_input(ProbeConfig::bell_z, amp);
  CHECK((rho_bell.m - bell_ket(0) * bell_ket(0).adjoint()).cwiseAbs().maxCoeff() <
        kStructuralTol);

  const DensityMatrix rho_dbl = prepare_input(ProbeConfig::double_bell, amp);
  CHECK(rho_dbl.dim() == 16);
  const Mat pair = partial_trace(rho_dbl.m, {0, 1}, {2, 2, 2, 2});
  CHECK((pair - bell_ket(0) * bell_ket(0).adjoint()).cwiseAbs().maxCoeff() < kStructuralTol);
}

TEST_CASE("bell projectors: orthogonal, complete, rank one") {
  const auto& p = bell_projectors();
  Mat sum = Mat::Zero(4, 4);
  for (int i = 0; i < 4; ++i) {
    sum += p[i];
    CHECK(std::abs(p[i].trace() - Complex(1.0, 0.0)) < kStructuralTol);
    for (int j = 0; j < 4; ++j) {
      const Mat prod = p[i] * p[j];
      if (i == j)
        CHECK((prod - p[i]).cwiseAbs().maxCoeff() < kStructuralTol);
      else
        CHECK(prod.cwiseAbs().maxCoeff() < kStructuralTol);
    }
  }
  CHECK((sum - Mat::Identity(4, 4)).cwiseAbs().maxCoeff() < kStructuralTol);
}

TEST_CASE("outcome_probabilities: BellZ reads the chi diagonal") {
  // z axis at Jt = pi/4: (1/2, 0, 0, 1/2).
  const auto dyn = Dynamics::of(SingleQubitHamiltonian{0, 0, 1});
  const auto rec = outcome_probabilities(ProbeConfig::bell_z, dyn, M_PI / 4);
  CHECK(rec.probabilities[0] == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(rec.probabilities[1] == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(rec.probabilities[2] == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(rec.probabilities[3] == doctest::Approx(0.5).epsilon(1e-10));

  // Direction (1,2,2)/3 at J = 1, t = pi/3: (1/4, 1/12, 1/3, 1/3).
  const auto dyn2 =
      Dynamics::of(SingleQubitHamiltonian{1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0});
  const auto rec2 = outcome_probabilities(ProbeConfig::bell_z, dyn2, M_PI / 3);
  CHECK(rec2.probabilities[0] == doctest::Approx(0.25).epsilon(1e-10));
  CHECK(rec2.probabilities[1] == doctest::Approx(1.0 / 12.0).epsilon(1e-10));
  CHECK(rec2.probabilities[2] == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
  CHECK(rec2.probabilities[3] == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("BellZ probabilities equal the oracle chi diagonal for any channel") {
  CounterRng rng(mix_key(31, 0));
  for (int i = 0; i < 40; ++i) {
    Dynamics dyn = Dynamics::of(random_single(rng));
    if (i % 2 == 1) {
      const double t1 = 0.4 + 2.0 * rng.uniform();
      dyn = Dynamics::of(
          RelaxationParams::make(t1, (0.1 + 0.9 * rng.uniform()) * 2.0 * t1, rng.uniform()));
    }
    const double t = 0.1 + 1.5 * rng.uniform();
    const auto rec = outcome_probabilities(ProbeConfig::bell_z, dyn, t);
    const ChiMatrix chi = process_oracle(dyn.channel_at(t));
    for (int k = 0; k < 4; ++k)
      CHECK(rec.probabilities[k] == doctest::Approx(chi.m(k, k).real()).epsilon(1e-9));
  }
}

TEST_CASE("double_bell: isotropic example and joint-outcome support") {
  const auto dyn = Dynamics::of(ExchangeHamiltonian{1, 1, 1});
  const auto rec = outcome_probabilities(ProbeConfig::double_bell, dyn, M_PI / 8);
  REQUIRE(rec.probabilities.size() == 16);
  CHECK(rec.probabilities[0] == doctest::Approx(5.0 / 8.0).epsilon(1e-10));   // Phi+,Phi+
  CHECK(rec.probabilities[15] == doctest::Approx(1.0 / 8.0).epsilon(1e-10));  // Phi-,Phi-
  CHECK(rec.probabilities[5] == doctest::Approx(1.0 / 8.0).epsilon(1e-10));   // Psi+,Psi+
  CHECK(rec.probabilities[10] == doctest::Approx(1.0 / 8.0).epsilon(1e-10));  // Psi-,Psi-
  // Mixed-label outcomes are forbidden for exchange dynamics.
  for (int j = 0; j < 4; ++j)
    for (int k = 0; k < 4; ++k)
      if (j != k) CHECK(rec.probabilities[4 * j + k] < 1e-12);
  CHECK(rec.outcome_label(3) == "Phi+:Phi-");
  CHECK(rec.outcome_label(15) == "Phi-:Phi-");
}

TEST_CASE("double_bell joint probabilities equal the oracle two-qubit chi diagonal") {
  CounterRng rng(mix_key(32, 0));
  for (int i = 0; i < 15; ++i) {
    const ExchangeHamiltonian h{1.5 * (rng.uniform() - 0.5), 1.5 * (rng.uniform() - 0.5),
                                1.5 * (rng.uniform() - 0.5)};
    const double t = 0.1 + rng.uniform();
    const auto dyn = Dynamics::of(h);
    const auto rec = outcome_probabilities(ProbeConfig::double_bell, dyn, t);
    const ChiMatrix chi = process_oracle(dyn.channel_at(t));
    // Joint outcome (j, k) reads the two-qubit Pauli-product element 4*j + k.
    for (int m = 0; m < 16; ++m)
      CHECK(rec.probabilities[m] == doctest::Approx(chi.m(m, m).real()).epsilon(1e-9));
  }
}

TEST_CASE("config/dynamics kind mismatches are rejected") {
  const auto single = Dynamics::of(SingleQubitHamiltonian{0, 0, 1});
  const auto exchange = Dynamics::of(ExchangeHamiltonian{1, 1, 1});
  CHECK_THROWS_AS(outcome_probabilities(ProbeConfig::double_bell, single, 0.1), Error);
  CHECK_THROWS_AS(outcome_probabilities(ProbeConfig::bell_z, exchange, 0.1), Error);
  CHECK_THROWS_AS(outcome_probabilities(ProbeConfig::bell_z, single, -0.1), Error);
}

TEST_CASE("sample_outcomes: determinism, edge cases, convergence") {
  const auto dyn = Dynamics::of(SingleQubitHamiltonian{0.3, 0.4, 0.5});
  const auto exact = outcome_probabilities(ProbeConfig::bell_z, dyn, 0.8);

  const auto s1 = sample_outcomes(exact, 50000, 42, 7);
  const auto s2 = sample_outcomes(exact, 50000, 42, 7);
  CHECK(s1.counts == s2.counts);
  const auto s3 = sample_outcomes(exact, 50000, 43, 7);
  CHECK(s1.counts != s3.counts);
  const auto s4 = sample_outcomes(exact, 50000, 42, 8);
  CHECK(s1.counts != s4.counts);

  std::int64_t total = 0;
  for (auto c : s1.counts) total += c;
  CHECK(total == 50000);

  // Degenerate distribution: all shots land on the certain outcome.
  auto degenerate = exact;
  degenerate.probabilities = {1.0, 0.0, 0.0, 0.0};
  const auto sd = sample_outcomes(degenerate, 1000, 1, 0);
  CHECK(sd.counts[0] == 1000);

  // 1e6 shots concentrate within 5 sigma.
  const auto big = sample_outcomes(exact, 1000000, 9, 0);
  const auto f = big.fractions();
  for (int k = 0; k < 4; ++k) {
    const double p = exact.probabilities[k];
    const double sigma = std::sqrt(p * (1 - p) / 1e6) + 1e-9;
    CHECK(std::abs(f[k] - p) < 5.0 * sigma);
  }

  CHECK_THROWS_AS(sample_outcomes(exact, 0, 1, 0), Error);
  CHECK_THROWS_AS(sample_outcomes(s1, 10, 1, 0), Error);
}

TEST_CASE("normalizer statistics: identity channel and zero-coupling edge") {
  const auto dyn = Dynamics::of(SingleQubitHamiltonian{0, 0, 0});
  const auto rec = outcome_probabilities(ProbeConfig::nonmax_z, dyn, 0.5);
  const auto st = normalizer_statistics(rec);
  CHECK(st.p_plus == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(st.p_minus == doctest::Approx(0.0).epsilon(1e-10));
  REQUIRE(st.c_plus.has_value());
  CHECK(*st.c_plus == doctest::Approx(st.a).epsilon(1e-9));
  CHECK(!st.c_minus.has_value());  // empty branch leaves c- unset
}

TEST_CASE("normalizer preparation constants match their trace definitions") {
  // a = tr(N rho), b = 2i tr(S N rho) with S the probe-axis Pauli on the
  // probed qubit and N the config normalizer; both must be real.
  struct Case {
    ProbeConfig config;
    int axis;  // 0 z, 1 x, 2 y
  };
  const Case cases[] = {{ProbeConfig::nonmax_z, 0},
                        {ProbeConfig::nonmax_x, 1},
                        {ProbeConfig::nonmax_y, 2}};
  const auto amp = ProbeAmplitudes::preset();
  const Mat axes[3] = {pauli_z(), pauli_x(), pauli_y()};
  for (const auto& c : cases) {
    const DensityMatrix rho = prepare_input(c.config, amp);
    const Mat n = c.config == ProbeConfig::nonmax_z ? tensor(pauli_x(), pauli_x())
                                                    : tensor(pauli_z(), pauli_z());
    const Complex a = (n * rho.m).trace();
    const Complex b = Complex(0, 2) * (embed_single(axes[c.axis], 2, 0) * n * rho.m).trace();
    CHECK(std::abs(a.imag()) < kStructuralTol);
    CHECK(std::abs(b.imag()) < kStructuralTol);
    CHECK(amp.a_constant() == doctest::Approx(a.real()).epsilon(1e-10));
    CHECK(amp.b_constant() == doctest::Approx(b.real()).epsilon(1e-10));
  }
}

TEST_CASE("normalizer statistics satisfy the chi linear relations (oracle check)") {
  // For every config, the grouped branch probabilities and signed normalizer
  // combinations must reproduce the linear functionals of chi they are
  // designed to measure. Pin against the independent oracle reconstruction.
  CounterRng rng(mix_key(33, 0));
  const auto amp = ProbeAmplitudes::preset();
  const double a = amp.a_constant();
  const double b = amp.b_constant();
  for (int i = 0; i < 40; ++i) {
    const auto h = random_single(rng);
    const double t = (0.05 + 0.9 * rng.uniform()) * (M_PI / 2.0) / h.magnitude();
    const auto dyn = Dynamics::of(h);
    const Mat chi = process_oracle(dyn.channel_at(t)).m;

    const auto stz = normalizer_statistics(
        outcome_probabilities(ProbeConfig::nonmax_z, dyn, t, amp));
    CHECK(stz.p_plus == doctest::Approx((chi(0, 0) + chi(3, 3)).real()).epsilon(1e-9));
    CHECK(stz.p_minus == doctest::Approx((chi(1, 1) + chi(2, 2)).real()).epsilon(1e-9));
    REQUIRE(stz.c_plus.has_value());
    CHECK(*stz.c_plus == doctest::Approx(a * (chi(0, 0) - chi(3, 3)).real() +
                                         b * chi(0, 3).imag())
                             .epsilon(1e-8));
    if (stz.c_minus)
      CHECK(*stz.c_minus == doctest::Approx(a * (chi(1, 1) - chi(2, 2)).real() -
                                            b * chi(1, 2).real())
                                .epsilon(1e-8));

    const auto stx = normalizer_statistics(
        outcome_probabilities(ProbeConfig::nonmax_x, dyn, t, amp));
    CHECK(stx.p_plus == doctest::Approx((chi(0, 0) + chi(1, 1)).real()).epsilon(1e-9));
    CHECK(stx.p_minus == doctest::Approx((chi(2, 2) + chi(3, 3)).real()).epsilon(1e-9));
    REQUIRE(stx.c_plus.has_value());
    CHECK(*stx.c_plus == doctest::Approx(a * (chi(0, 0) - chi(1, 1)).real() +
                                         b * chi(0, 1).imag())
                             .epsilon(1e-8));
    if (stx.c_minus)
      CHECK(*stx.c_minus == doctest::Approx(a * (chi(3, 3) - chi(2, 2)).real() +
                                            b * chi(2, 3).real())
                                .epsilon(1e-8));

    const auto sty = normalizer_statistics(
        outcome_probabilities(ProbeConfig::nonmax_y, dyn, t, amp));
    CHECK(sty.p_plus == doctest::Approx((chi(0, 0) + chi(2, 2)).real()).epsilon(1e-9));
    CHECK(sty.p_minus == doctest::Approx((chi(1, 1) + chi(3, 3)).real()).epsilon(1e-9));
    REQUIRE(sty.c_plus.has_value());
    CHECK(*sty.c_plus == doctest::Approx(a * (chi(0, 0) - chi(2, 2)).real() +
                                         b * chi(0, 2).imag())
                             .epsilon(1e-8));
    if (sty.c_minus)
      CHECK(*sty.c_minus == doctest::Approx(a * (chi(3, 3) - chi(1, 1)).real() -
                                            b * chi(1, 3).real())
                                .epsilon(1e-8));
  }
}

TEST_CASE("sampled normalizer statistics converge to the exact ones") {
  const auto dyn = Dynamics::of(SingleQubitHamiltonian{0.4, 0.5, 0.6});
  const auto exact = outcome_probabilities(ProbeConfig::nonmax_z, dyn, 0.7);
  const auto exact_st = normalizer_statistics(exact);
  const auto sampled_st = normalizer_statistics(sample_outcomes(exact, 2000000, 5, 0));
  CHECK(sampled_st.sampled);
  CHECK(sampled_st.p_plus == doctest::Approx(exact_st.p_plus).epsilon(5e-3));
  REQUIRE(sampled_st.c_plus.has_value());
  CHECK(*sampled_st.c_plus == doctest::Approx(*exact_st.c_plus).epsilon(2e-2));
  CHECK(sampled_st.a == exact_st.a);  // preparation constants stay exact
  CHECK(sampled_st.b == exact_st.b);
}

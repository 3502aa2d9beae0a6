// SPDX-License-Identifier: Apache-2.0
#include "oracles.hpp"

#include "jointwork/errors.hpp"
#include "jointwork/povm.hpp"

#include <doctest.h>

using namespace jointwork;

namespace {

SpectralHamiltonian ladder(int d) { return SpectralHamiltonian::diagonal(oracle::ladder(d, 1.0)); }

RealVector vec2(double a, double b) {
    RealVector v(2);
    v << a, b;
    return v;
}

ComplexMatrix hadamard() {
    ComplexMatrix h(2, 2);
    h << 1, 1, 1, -1;
    return h / std::sqrt(2.0);
}

ComplexMatrix pauli_x() {
    ComplexMatrix x(2, 2);
    x << 0, 1, 1, 0;
    return x;
}

} // namespace

TEST_CASE("povm validation") {
    CHECK_THROWS_AS(Povm(std::vector<Hermitian>{}), InvalidPovm);
    CHECK_THROWS_AS(Povm({Hermitian::diagonal(vec2(1, 0))}), InvalidPovm);
    CHECK_THROWS_AS(Povm({Hermitian::diagonal(vec2(1.2, 0.5)), Hermitian::diagonal(vec2(-0.2, 0.5))}), InvalidPovm);
    CHECK_THROWS_AS(Povm({Hermitian::identity(2), Hermitian::identity(3)}), DimMismatch);
    const Povm p({Hermitian::diagonal(vec2(1, 0)), Hermitian::diagonal(vec2(0, 1))});
    CHECK(p.size() == 2);
    CHECK_THROWS_AS(p.effect(2), IndexOutOfRange);
    const Povm t = Povm::trivial(3, 4);
    CHECK(t.size() == 4);
    CHECK(max_abs(t.effect(0).matrix() - ComplexMatrix::Identity(3, 3) / 4.0) <= 1e-15);
}

TEST_CASE("noisy effects examples") {
    const NoisyEnergyPovm sharp(ladder(3), 1.0);
    for (int a = 0; a < 3; ++a) CHECK(max_abs(sharp.povm().effect(a).matrix() - ladder(3).projector(a)) <= 1e-15);
    const NoisyEnergyPovm blind(ladder(3), 0.0);
    for (int a = 0; a < 3; ++a) {
        CHECK(max_abs(blind.povm().effect(a).matrix() - ComplexMatrix::Identity(3, 3) / 3.0) <= 1e-15);
    }
    const NoisyEnergyPovm half = noisy_effects(SpectralHamiltonian::diagonal(vec2(0, 1)), 0.5);
    CHECK(max_abs(half.povm().effect(0).matrix() - Hermitian::diagonal(vec2(0.75, 0.25)).matrix()) <= 1e-15);
    CHECK(max_abs(half.povm().effect(1).matrix() - Hermitian::diagonal(vec2(0.25, 0.75)).matrix()) <= 1e-15);
    CHECK_THROWS_AS(NoisyEnergyPovm(ladder(2), 1.5), InvalidArgument);
    CHECK_THROWS_AS(NoisyEnergyPovm(ladder(2), -0.1), InvalidArgument);
}

TEST_CASE("property: noisy effects match the defining formula in rotated frames") {
    for (int d = 2; d <= 6; ++d) {
        const ComplexMatrix frame = haar_random_unitary(d, 90 + d);
        const SpectralHamiltonian h(oracle::ladder(d, 0.7), frame);
        for (double v : {0.0, 0.25, 0.8, 1.0}) {
            const NoisyEnergyPovm p(h, v);
            for (int a = 0; a < d; ++a) REQUIRE(max_abs(p.povm().effect(a).matrix() - oracle::noisy_effect(frame, a, v)) <= 1e-12);
        }
    }
}

TEST_CASE("luders apply examples") {
    const SpectralHamiltonian h = SpectralHamiltonian::diagonal(vec2(0, 1));
    const Hermitian pi1(h.projector(1));
    const LuedersInstrument sharp(NoisyEnergyPovm(h, 1.0));
    CHECK(max_abs(luders_apply(sharp, 1, pi1).matrix() - pi1.matrix()) <= 1e-15);
    CHECK(luders_apply(sharp, 1, pi1).trace() == doctest::Approx(1.0));

    const LuedersInstrument half(NoisyEnergyPovm(h, 0.5));
    const Hermitian pi0(h.projector(0));
    CHECK(max_abs(luders_apply(half, 0, pi0).matrix() - Hermitian::diagonal(vec2(0.75, 0)).matrix()) <= 1e-15);
    CHECK(luders_apply(half, 0, pi0).trace() == doctest::Approx(0.75));
    CHECK_THROWS_AS(luders_apply(half, 2, pi0), IndexOutOfRange);
    CHECK_THROWS_AS(luders_apply(half, 0, Hermitian::identity(3) * (1.0 / 3)), DimMismatch);
    CHECK_THROWS_AS(luders_apply(half, 0, Hermitian::identity(2)), InvalidArgument);
    CHECK_THROWS_AS(luders_apply(half, 0, Hermitian::diagonal(vec2(1.5, -0.5))), NotPsd);
}

TEST_CASE("property: luders probabilities follow the born rule and sum to one") {
    std::mt19937_64 rng(60);
    for (int d = 2; d <= 5; ++d) {
        const ComplexMatrix frame = haar_random_unitary(d, d);
        const LuedersInstrument inst(NoisyEnergyPovm(SpectralHamiltonian(oracle::ladder(d, 1.0), frame), 0.6));
        for (int trial = 0; trial < 30; ++trial) {
            const Hermitian rho = Hermitian::projected(oracle::random_density(d, rng));
            double total = 0.0;
            for (int a = 0; a < d; ++a) {
                const Hermitian post = luders_apply(inst, a, rho);
                const ComplexMatrix k = oracle::noisy_effect_sqrt(frame, a, 0.6);
                REQUIRE(max_abs(post.matrix() - k * rho.matrix() * k) <= 1e-12);
                REQUIRE(post.trace() == doctest::Approx((inst.povm().effect(a).matrix() * rho.matrix()).trace().real()).epsilon(1e-11));
                total += post.trace();
            }
            REQUIRE(total == doctest::Approx(1.0).epsilon(1e-11));
        }
    }
}

TEST_CASE("instrument channel examples") {
    const SpectralHamiltonian h = ladder(2);
    const LuedersInstrument half(NoisyEnergyPovm(h, 0.5));
    CHECK(max_abs(instrument_channel(half, Hermitian::identity(2)).matrix() - ComplexMatrix::Identity(2, 2)) <= 1e-12);
    const Hermitian x(pauli_x());
    const double k = std::sqrt(0.75);
    CHECK(max_abs(instrument_channel(half, x).matrix() - k * pauli_x()) <= 1e-12);
    CHECK(max_abs(inverse_instrument_channel(half, x).matrix() - pauli_x() / k) <= 1e-12);
    CHECK(max_abs(inverse_instrument_channel(half, Hermitian::identity(2)).matrix() - ComplexMatrix::Identity(2, 2)) <= 1e-12);

    std::mt19937_64 rng(61);
    const Hermitian y = Hermitian::projected(oracle::random_hermitian(4, rng));
    const LuedersInstrument blind(NoisyEnergyPovm(ladder(4), 0.0));
    CHECK(max_abs(instrument_channel(blind, y).matrix() - y.matrix()) <= 1e-12);
}

TEST_CASE("property: instrument channel is unital and trace preserving") {
    std::mt19937_64 rng(62);
    for (int d = 2; d <= 5; ++d) {
        const LuedersInstrument inst(NoisyEnergyPovm(SpectralHamiltonian(oracle::ladder(d, 1.0), haar_random_unitary(d, 3)), 0.35));
        REQUIRE(max_abs(instrument_channel(inst, Hermitian::identity(d)).matrix() - ComplexMatrix::Identity(d, d)) <= 1e-11);
        for (int trial = 0; trial < 100; ++trial) {
            const Hermitian x = Hermitian::projected(oracle::random_hermitian(d, rng));
            REQUIRE(instrument_channel(inst, x).trace() == doctest::Approx(x.trace()).epsilon(1e-11).scale(1.0));
        }
    }
}

TEST_CASE("property: inverse instrument channel undoes the channel") {
    std::mt19937_64 rng(63);
    for (int d = 2; d <= 5; ++d) {
        const SpectralHamiltonian h(oracle::ladder(d, 1.0), haar_random_unitary(d, 11 * d));
        for (int i = 1; i <= 9; ++i) {
            const LuedersInstrument inst(NoisyEnergyPovm(h, 0.1 * i));
            for (int trial = 0; trial < 10; ++trial) {
                const Hermitian x = Hermitian::projected(oracle::random_hermitian(d, rng));
                REQUIRE(max_abs(instrument_channel(inst, inverse_instrument_channel(inst, x)).matrix() - x.matrix()) <= 1e-10);
                REQUIRE(max_abs(inverse_instrument_channel(inst, instrument_channel(inst, x)).matrix() - x.matrix()) <= 1e-10);
            }
        }
    }
}

TEST_CASE("inverse requires a noisy energy instrument") {
    CHECK_THROWS_AS(inverse_instrument_channel(LuedersInstrument(NoisyEnergyPovm(ladder(3), 1.0)), Hermitian::identity(3)),
                    NonInvertibleInstrument);
    CHECK_THROWS_AS(
        inverse_instrument_channel(LuedersInstrument(NoisyEnergyPovm(ladder(3), 1.0 - 1e-10)), Hermitian::identity(3)),
        NonInvertibleInstrument);
    const LuedersInstrument generic(Povm::trivial(2, 2));
    CHECK_THROWS_AS(inverse_instrument_channel(generic, Hermitian::identity(2)), NonInvertibleInstrument);
}

TEST_CASE("depolarize examples") {
    std::mt19937_64 rng(64);
    const Hermitian x = Hermitian::projected(oracle::random_hermitian(3, rng));
    CHECK(max_abs(depolarize(x, 1.0).matrix() - x.matrix()) <= 1e-15);
    const Hermitian rho = Hermitian::projected(oracle::random_density(3, rng));
    CHECK(max_abs(depolarize(rho, 0.0).matrix() - ComplexMatrix::Identity(3, 3) / 3.0) <= 1e-15);
    CHECK(max_abs(depolarize(Hermitian::diagonal(vec2(1, 0)), 0.5).matrix() - Hermitian::diagonal(vec2(0.75, 0.25)).matrix()) <= 1e-15);
    // Unit-trace inputs see exactly γX + (1−γ)/d·1.
    CHECK(max_abs(depolarize(rho, 0.3).matrix() - (0.3 * rho.matrix() + 0.7 / 3.0 * ComplexMatrix::Identity(3, 3))) <= 1e-15);
    CHECK_THROWS_AS(depolarize(rho, 1.2), InvalidArgument);
}

TEST_CASE("heisenberg conjugation examples") {
    const NoisyEnergyPovm sharp(ladder(2), 1.0);
    const Povm same = heisenberg_povm(sharp.povm(), ComplexMatrix::Identity(2, 2));
    for (int b = 0; b < 2; ++b) CHECK(max_abs(same.effect(b).matrix() - sharp.povm().effect(b).matrix()) <= 1e-15);
    const Povm rotated = heisenberg_povm(sharp.povm(), hadamard());
    const ComplexMatrix plus = 0.5 * (ComplexMatrix::Identity(2, 2) + pauli_x());
    const ComplexMatrix minus = 0.5 * (ComplexMatrix::Identity(2, 2) - pauli_x());
    CHECK(max_abs(rotated.effect(0).matrix() - plus) <= 1e-15);
    CHECK(max_abs(rotated.effect(1).matrix() - minus) <= 1e-15);
    ComplexMatrix bad = ComplexMatrix::Identity(2, 2);
    bad(0, 0) = 1.0 + 1e-8;
    CHECK_THROWS_AS(heisenberg_povm(sharp.povm(), bad), NotUnitary);
    CHECK_THROWS_AS(heisenberg_povm(sharp.povm(), ComplexMatrix::Identity(3, 3)), DimMismatch);
}

TEST_CASE("property: conjugation preserves spectra, positivity and completeness") {
    for (int d = 2; d <= 5; ++d) {
        for (double v : {0.2, 0.7, 1.0}) {
            const NoisyEnergyPovm b(SpectralHamiltonian(oracle::ladder(d, 1.0), haar_random_unitary(d, 5)), v);
            for (std::uint64_t s = 0; s < 10; ++s) {
                const Povm c = heisenberg_povm(b.povm(), haar_random_unitary(d, 1000 + s));
                ComplexMatrix sum = ComplexMatrix::Zero(d, d);
                for (int k = 0; k < d; ++k) {
                    sum += c.effect(k).matrix();
                    REQUIRE((eigenvalues(c.effect(k)) - eigenvalues(b.povm().effect(k))).cwiseAbs().maxCoeff() <= 1e-12);
                    REQUIRE(min_eigenvalue(c.effect(k)) >= -1e-10);
                }
                REQUIRE(max_abs(sum - ComplexMatrix::Identity(d, d)) <= 1e-10);
            }
        }
    }
}

TEST_CASE("marginal checks") {
    const int d = 3;
    const NoisyEnergyPovm a(ladder(d), 0.4);
    const Povm trivial = Povm::trivial(d, 4);
    EffectGrid w(d, 4, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < 4; ++j) w(i, j) = a.povm().effect(i).matrix() / 4.0;
    CHECK(check_marginals(w, a.povm(), trivial) <= 1e-15);

    const NoisyEnergyPovm b(ladder(d), 0.9);
    EffectGrid prod(d, d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) prod(i, j) = a.povm().effect(i).matrix() * b.povm().effect(j).matrix();
    CHECK(check_marginals(prod, a.povm(), b.povm()) <= 1e-15);

    prod(1, 2) += 0.01 * ComplexMatrix::Identity(d, d);
    CHECK(check_marginals(prod, a.povm(), b.povm()) >= 0.01 - 1e-15);
    CHECK_THROWS_AS(check_marginals(prod, a.povm(), trivial), ShapeMismatch);
}

TEST_CASE("effect grid minimum eigenvalue") {
    EffectGrid w(2, 1, 2);
    w(0, 0) = Hermitian::diagonal(vec2(0.5, 0.2)).matrix();
    w(1, 0) = Hermitian::diagonal(vec2(-0.3, 0.1)).matrix();
    CHECK(w.min_eigenvalue() == doctest::Approx(-0.3));
}

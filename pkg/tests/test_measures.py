"""Entropies, relative entropies and the two distance measures."""

import math
from dataclasses import replace

import numpy as np
import pytest

from spinotto import (
    BlochVector,
    compose_cycle,
    conditional_entropy,
    conditional_entropy_closed_form,
    distance_intermediates,
    energy_conditional_entropy,
    energy_entropy,
    iterate,
    limit_cycle,
    matrix_log,
    matrix_sqrt,
    measurement_entropy,
    quantum_distance,
    quantum_distance_closed_form,
    reconstruct_density,
    thermal_state,
    vn_entropy,
    wei_norman_alphas,
    adiabat_propagator,
    AdiabatParams,
    wootters_energy_distance,
)
from conftest import SQRT2, fig3_spec, random_bloch, random_spec


def energy_diagonal_state(rng, omega, j):
    """Random physical state diagonal in the energy basis (b3 = 0, b || field)."""
    from spinotto import vn_eigenvalues

    big = math.hypot(omega, j)
    while True:
        d = rng.uniform(-0.6, 0.6)
        b = BlochVector(
            d * omega / big, d * j / big, 0.0,
            rng.uniform(-0.3, 0.3), rng.uniform(-0.4, 0.5),
        )
        if vn_eigenvalues(b).as_array().min() >= 0.01:
            return b


# ---------------------------------------------------------------------------
# plain entropies


def test_measurement_entropy_trivials():
    assert measurement_entropy([1.0, 0.0, 0.0, 0.0]) == 0.0
    assert measurement_entropy([0.25] * 4) == pytest.approx(math.log(4), abs=1e-14)
    assert measurement_entropy([0.5, 0.5, 0.0, 0.0]) == pytest.approx(math.log(2), abs=1e-14)


def test_measurement_entropy_rejects_bad_input():
    with pytest.raises(ValueError):
        measurement_entropy([0.5, 0.1, 0.1, 0.1])
    with pytest.raises(ValueError):
        measurement_entropy([1.2, -0.2, 0.0, 0.0])


def test_vn_entropy_trivials():
    assert vn_entropy(BlochVector(0, 0, 0, 0, 0)) == pytest.approx(math.log(4), abs=1e-14)
    pure = BlochVector(SQRT2 / 2, 0, 0, 0, 0.5)  # lam = (0, 0, 0, 1)
    assert vn_entropy(pure) == pytest.approx(0.0, abs=1e-12)


def test_vn_entropy_rejects_non_physical():
    with pytest.raises(ValueError):
        vn_entropy(BlochVector(1.0, 0, 0, 0, 0))


def test_vn_entropy_thermal_matches_matrix_oracle(rng):
    for _ in range(20):
        omega, j = rng.uniform(0.5, 14.0, size=2)
        temp = rng.uniform(0.4, 10.0)
        b = thermal_state(omega, j, temp)
        rho = reconstruct_density(b)
        oracle = -float(np.real(np.trace(rho @ matrix_log(rho))))
        assert abs(vn_entropy(b) - oracle) < 1e-12


def test_energy_entropy_equals_vn_for_thermal(rng):
    for _ in range(20):
        omega, j = rng.uniform(0.5, 14.0, size=2)
        temp = rng.uniform(0.4, 10.0)
        b = thermal_state(omega, j, temp)
        assert abs(energy_entropy(b, omega, j) - vn_entropy(b)) < 1e-12


def test_energy_entropy_dominates_vn(rng):
    for _ in range(200):
        b = random_bloch(rng)
        omega, j = rng.uniform(0.5, 14.0, size=2)
        assert energy_entropy(b, omega, j) >= vn_entropy(b) - 1e-12


def test_energy_entropy_strictly_larger_off_diagonal():
    omega, j, temp = 9.0, 2.0, 3.0
    b = thermal_state(omega, j, temp)
    perturbed = replace(b, b3=0.05)
    assert energy_entropy(perturbed, omega, j) > vn_entropy(perturbed) + 1e-6


# ---------------------------------------------------------------------------
# conditional entropies


def test_conditional_entropy_zero_on_equal_states(rng):
    for _ in range(20):
        b = random_bloch(rng)
        assert abs(conditional_entropy(b, b)) < 1e-12


def test_conditional_entropy_nonnegative(rng):
    for _ in range(100):
        val = conditional_entropy(random_bloch(rng), random_bloch(rng))
        assert val >= -1e-12


def test_conditional_entropy_support_sentinel():
    pure_ref = BlochVector(SQRT2 / 4, 0, 0, 0, 0.5)
    mixed = BlochVector(0, 0, 0, 0, 0)
    assert conditional_entropy(mixed, pure_ref) == math.inf
    assert not math.isnan(conditional_entropy(mixed, pure_ref))


def test_conditional_entropy_contracts_under_cycle_map(rng):
    for _ in range(10):
        spec = random_spec(rng, dephasing=rng.uniform() < 0.5)
        cycle = compose_cycle(spec).cycle
        b, ref = random_bloch(rng), random_bloch(rng)
        before = conditional_entropy(b, ref)
        after = conditional_entropy(cycle.apply(b), cycle.apply(ref))
        if math.isinf(before):
            continue
        assert after <= before + 1e-12


def test_conditional_entropy_closed_form_agrees(rng):
    worst = 0.0
    for _ in range(200):
        b, ref = random_bloch(rng), random_bloch(rng)
        direct = conditional_entropy(b, ref)
        closed = conditional_entropy_closed_form(b, ref)
        if math.isinf(direct):
            continue
        worst = max(worst, abs(direct - closed))
    assert worst < 1e-8


def test_energy_conditional_entropy_basics(rng):
    omega, j = 9.0, 2.0
    b = random_bloch(rng)
    assert abs(energy_conditional_entropy(b, b, omega, j)) < 1e-12
    for _ in range(50):
        x, y = random_bloch(rng), random_bloch(rng)
        assert energy_conditional_entropy(x, y, omega, j) >= -1e-12


def test_energy_conditional_entropy_vanishes_only_at_convergence(rng):
    spec = random_spec(rng)
    b_lc = limit_cycle(spec).b_a
    b0 = thermal_state(spec.omega_b, spec.j, spec.t_cold)
    states = iterate(spec, b0, 40)
    first = energy_conditional_entropy(states[0], b_lc, spec.omega_b, spec.j)
    last = energy_conditional_entropy(states[-1], b_lc, spec.omega_b, spec.j)
    assert first > 1e-4
    assert 0.0 - 1e-12 <= last < 1e-10


def test_energy_conditional_entropy_matches_quantum_on_diagonal_states(rng):
    omega, j = 9.0, 2.0
    for _ in range(30):
        b = energy_diagonal_state(rng, omega, j)
        ref = energy_diagonal_state(rng, omega, j)
        classical = energy_conditional_entropy(b, ref, omega, j)
        quantum = conditional_entropy(b, ref)
        assert abs(classical - quantum) < 1e-10


# ---------------------------------------------------------------------------
# distances


def test_wootters_distance_trivials(rng):
    omega, j = 9.0, 2.0
    b = random_bloch(rng)
    assert wootters_energy_distance(b, b, omega, j) == 0.0
    # disjoint supports: outer-pure vs inner-pure
    outer = BlochVector(SQRT2 / 4, 0, 0, 0, 0.5)
    inner = BlochVector(0, 0, 0, SQRT2 / 4, -0.5)
    assert wootters_energy_distance(outer, inner, omega, 0.0) == pytest.approx(
        math.pi / 2, abs=1e-12
    )


def test_wootters_distance_range_and_symmetry(rng):
    omega, j = 9.0, 2.0
    for _ in range(100):
        x, y = random_bloch(rng), random_bloch(rng)
        d_xy = wootters_energy_distance(x, y, omega, j)
        d_yx = wootters_energy_distance(y, x, omega, j)
        assert 0.0 <= d_xy <= math.pi / 2
        assert abs(d_xy - d_yx) < 1e-13


def test_wootters_distance_triangle_inequality(rng):
    omega, j = 9.0, 2.0
    for _ in range(100):
        x, y, z = (random_bloch(rng) for _ in range(3))
        d_xz = wootters_energy_distance(x, z, omega, j)
        d_xy = wootters_energy_distance(x, y, omega, j)
        d_yz = wootters_energy_distance(y, z, omega, j)
        assert d_xz <= d_xy + d_yz + 1e-12


def test_quantum_distance_trivials(rng):
    b = random_bloch(rng)
    assert quantum_distance(b, b) == 0.0
    for _ in range(50):
        x, y = random_bloch(rng), random_bloch(rng)
        assert abs(quantum_distance(x, y) - quantum_distance(y, x)) < 1e-13


def test_quantum_distance_closed_form_matches_matrix_oracle(rng):
    worst = 0.0
    for _ in range(1000):
        x, y = random_bloch(rng), random_bloch(rng)
        worst = max(worst, abs(quantum_distance(x, y) - quantum_distance_closed_form(x, y)))
    print(f"closed form vs matrix oracle, max deviation: {worst:.3e}")
    assert worst < 1e-7


def test_distance_intermediates_trace_identity(rng):
    for _ in range(300):
        x, y = random_bloch(rng), random_bloch(rng)
        ints = distance_intermediates(x, y)
        assert ints.zeta1 >= -1e-12 and ints.zeta4 >= -1e-12
        assert abs(ints.zeta1 + ints.zeta4 - 2.0 * ints.q_gen) < 1e-12
        # outer-block trace of the matrix oracle equals 2 Q
        root = matrix_sqrt(reconstruct_density(x))
        m = root @ reconstruct_density(y) @ root
        outer_trace = float(np.real(m[0, 0] + m[3, 3]))
        assert abs(outer_trace - 2.0 * ints.q_gen) < 1e-12
        inner = np.real(np.diag(m))[1:3]
        assert abs(inner[0] - ints.lam2_prod) < 1e-12
        assert abs(inner[1] - ints.lam3_prod) < 1e-12


def test_quantum_distance_contracts_under_cycle_map(rng):
    for _ in range(10):
        spec = random_spec(rng)
        cycle = compose_cycle(spec).cycle
        b, ref = random_bloch(rng), random_bloch(rng)
        before = quantum_distance(b, ref)
        after = quantum_distance(cycle.apply(b), cycle.apply(ref))
        assert after <= before + 1e-12


def test_vn_entropy_invariant_under_sweep_propagation(rng):
    prop = adiabat_propagator(
        wei_norman_alphas(AdiabatParams(12.0, 5.0, 2.0, 0.3)).final
    )
    for _ in range(50):
        b = random_bloch(rng)
        assert abs(vn_entropy(prop.apply(b)) - vn_entropy(b)) < 1e-12


def test_dephasing_collapses_the_two_distances():
    # strong dephasing wipes the off-diagonal content, so the quantum and
    # energy-projected distances agree along the tail of the approach
    spec = fig3_spec(tau_adiabat=0.01, dephasing_hot=0.01, dephasing_cold=0.03)
    b_lc = limit_cycle(spec).b_a
    b0 = thermal_state(spec.omega_b, spec.j, spec.t_cold)
    states = iterate(spec, b0, 40)
    for b in states[25:35]:
        qd = quantum_distance(b, b_lc)
        wd = wootters_energy_distance(b, b_lc, spec.omega_b, spec.j)
        assert abs(qd - wd) < 1e-3


def test_energy_distance_oscillates_without_dephasing():
    # starting the engine from its own mid-cycle state leaves a deviation in
    # the rotating sector; its projection onto the energy axis zig-zags even
    # though the quantum distance contracts strictly
    from spinotto import thermo_ledger

    spec = fig3_spec(tau_adiabat=0.01, dephasing_hot=0.0, dephasing_cold=0.0)
    ledger = thermo_ledger(spec)
    states = iterate(spec, ledger.b_c, 30)
    wd = [wootters_energy_distance(b, ledger.b_a, spec.omega_b, spec.j) for b in states]
    qd = [quantum_distance(b, ledger.b_a) for b in states]
    increases = sum(1 for k in range(len(wd) - 1) if wd[k + 1] > wd[k] + 1e-12)
    assert increases >= 1
    assert all(qd[k + 1] <= qd[k] + 1e-12 for k in range(len(qd) - 1))

"""Independent reference constructions used by the tests.

Nothing here calls the package's matrix builders: operators are assembled from ladder
operators on a truncated full tensor space and then restricted to a sector.
"""

import numpy as np


def ladder_ops(n_photons):
    """Single-cavity ``(a, sigma)`` on ``atom (g, e) x mode (0..n_photons)``."""
    a_mode = np.diag(np.sqrt(np.arange(1, n_photons + 1)), 1)
    sigma = np.array([[0.0, 1.0], [0.0, 0.0]])  # |g><e| with g = 0, e = 1
    return np.kron(np.eye(2), a_mode), np.kron(sigma, np.eye(n_photons + 1))


def two_cavity_ops(n_photons):
    a, s = ladder_ops(n_photons)
    one = np.eye(a.shape[0])
    return np.kron(a, one), np.kron(s, one), np.kron(one, a), np.kron(one, s)


def full_index(atom1, p1, atom2, p2, n_photons):
    m = n_photons + 1
    single = lambda atom, p: (atom == "e") * m + p
    return single(atom1, p1) * 2 * m + single(atom2, p2)


def sector_isometry(states, n_photons):
    """Columns embed sector states (``BareState``-like objects) into the full space."""
    dim = (2 * (n_photons + 1)) ** 2
    v = np.zeros((dim, len(states)))
    for k, s in enumerate(states):
        v[full_index(s.atom1, s.photons1, s.atom2, s.photons2, n_photons), k] = 1.0
    return v


def brute_force_operators(states, beta, delta, n_photons=3):
    """``(H0, K)`` restricted to ``states`` from ladder-operator algebra."""
    a1, s1, a2, s2 = two_cavity_ops(n_photons)
    dag = lambda x: x.conj().T
    h0 = sum(delta * dag(s) @ s + beta * (dag(s) @ a + s @ dag(a)) for a, s in ((a1, s1), (a2, s2)))
    k = dag(a1) @ a2 + dag(a2) @ a1
    v = sector_isometry(states, n_photons)
    return v.T @ h0 @ v, v.T @ k @ v, (h0, k, v)


def rk4_propagator(h, duration, steps):
    """Propagator of ``i dU/dt = h U`` by fixed-step RK4 (no eigendecomposition)."""
    h = np.asarray(h, dtype=complex)
    u = np.eye(h.shape[0], dtype=complex)
    dt = duration / steps
    f = lambda x: -1j * (h @ x)
    for _ in range(steps):
        k1 = f(u)
        k2 = f(u + 0.5 * dt * k1)
        k3 = f(u + 0.5 * dt * k2)
        k4 = f(u + dt * k3)
        u = u + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return u


def square_pulse_propagator(h0, k_unit, period, kappa_tau, tau, pulse_steps, free_steps):
    """One period with the kick replaced by ``H0 + (kappa_tau / tau) K`` over ``[0, tau]``."""
    pulse = rk4_propagator(h0 + (kappa_tau / tau) * k_unit, tau, pulse_steps)
    free = rk4_propagator(h0, period - tau, free_steps)
    return free @ pulse


def find_peak_near(xs, ys, target, rel=0.05):
    """Return the x of a strict interior maximum of ``ys`` inside ``target*(1 +- rel)``, else None."""
    xs, ys = np.asarray(xs), np.asarray(ys)
    win = np.flatnonzero((xs >= target * (1 - rel)) & (xs <= target * (1 + rel)))
    if win.size < 3:
        return None
    k = win[np.argmax(ys[win])]
    if k in (win[0], win[-1]):
        return None
    return float(xs[k])


def first_transfer_kick(values, threshold):
    """Kick (1-based) of the minimum of the first excursion of ``values`` below ``threshold``."""
    values = np.asarray(values)
    below = np.flatnonzero(values < threshold)
    if below.size == 0:
        return None
    start = below[0]
    after = np.flatnonzero(values[start:] >= threshold)
    stop = start + (after[0] if after.size else len(values) - start)
    return int(start + np.argmin(values[start:stop]) + 1)

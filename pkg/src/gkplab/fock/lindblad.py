"""Fixed-step RK4 integration of the Lindblad master equation.

drho/dt = -i[H, rho] + sum_i rate_i (L_i rho L_i^dag - {L_i^dag L_i, rho}/2).

A fixed step keeps runs bit-reproducible; the step must satisfy
dt * max_i(rate_i * ||L_i^dag L_i||) <= 0.1 or StepTooLarge is raised.
"""

import numpy as np

from ..errors import NumericalInstability, StepTooLarge


def stability_limit(dissipators, rates=None, hamiltonian=None) -> float:
    """Largest allowed dt for the RK4 stepper."""
    rates = [1.0] * len(dissipators) if rates is None else list(rates)
    scale = 0.0
    for L, g in zip(dissipators, rates):
        scale = max(scale, g * np.linalg.norm(L.conj().T @ L, 2))
    if hamiltonian is not None:
        scale = max(scale, np.linalg.norm(hamiltonian, 2))
    return 0.1 / scale if scale > 0 else np.inf


def lindblad_evolve(rho0: np.ndarray, hamiltonian, dissipators, dt: float, steps: int,
                    rates=None, observables=None, record_every: int = 1,
                    trace_tol: float = 1e-6):
    """Integrate and record Re<O> for each requested observable.

    `observables` maps name -> operator.  Returns {'times', <name>: array,
    'trace': array, 'rho': final density matrix}.  Trace drift beyond
    trace_tol aborts with NumericalInstability.
    """
    rho = np.asarray(rho0, complex).copy()
    if rho.ndim == 1:
        rho = np.outer(rho, rho.conj())
    rates = [1.0] * len(dissipators) if rates is None else list(rates)
    limit = stability_limit(dissipators, rates, hamiltonian)
    if dt > limit:
        raise StepTooLarge(f"dt = {dt:.3e} exceeds stability limit {limit:.3e}")
    observables = observables or {}

    Ls = [np.asarray(L, complex) for L in dissipators]
    Lds = [L.conj().T for L in Ls]
    LdLs = [Ld @ L for L, Ld in zip(Ls, Lds)]

    def rhs(r):
        out = np.zeros_like(r)
        if hamiltonian is not None:
            out += -1j * (hamiltonian @ r - r @ hamiltonian)
        for L, Ld, LdL, g in zip(Ls, Lds, LdLs, rates):
            out += g * (L @ r @ Ld - 0.5 * (LdL @ r + r @ LdL))
        return out

    rec = {name: [] for name in observables}
    traces = []
    times = []
    for step in range(1, steps + 1):
        k1 = rhs(rho)
        k2 = rhs(rho + 0.5 * dt * k1)
        k3 = rhs(rho + 0.5 * dt * k2)
        k4 = rhs(rho + dt * k3)
        rho = rho + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        tr = float(np.real(np.trace(rho)))
        if abs(tr - 1.0) > trace_tol:
            raise NumericalInstability(f"trace drifted to {tr} at step {step}")
        if step % record_every == 0 or step == steps:
            times.append(step * dt)
            traces.append(tr)
            for name, op in observables.items():
                rec[name].append(float(np.real(np.trace(op @ rho))))
    out = {name: np.array(vals) for name, vals in rec.items()}
    out["times"] = np.array(times)
    out["trace"] = np.array(traces)
    out["rho"] = rho
    return out

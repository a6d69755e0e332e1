"""Wigner function via the displaced-parity representation.

W(q, p) = (1/pi) Tr[rho D(alpha) Pi D(alpha)^dag] with alpha = (q+ip)/sqrt2,
evaluated through the identity D(alpha) Pi D(alpha)^dag = D(2 alpha) Pi and a
scaled Laguerre recurrence along the Fock-matrix diagonals (stable: every
scaled term is bounded by 1, being a unitary matrix element).
"""

import numpy as np


def wigner(state_or_rho: np.ndarray, q_grid: np.ndarray, p_grid: np.ndarray) -> np.ndarray:
    """Wigner function on the outer grid; rows index q, columns index p.

    Normalized so that the full (q, p) integral is 1; vacuum gives
    W(0,0) = 1/pi.
    """
    arr = np.asarray(state_or_rho, complex)
    rho = np.outer(arr, arr.conj()) if arr.ndim == 1 else arr
    D = rho.shape[0]
    q = np.asarray(q_grid, float)
    p = np.asarray(p_grid, float)
    Q, P = np.meshgrid(q, p, indexing="ij")
    beta = np.sqrt(2.0) * (Q + 1j * P)        # 2 alpha
    x = (np.abs(beta) ** 2).ravel()
    theta = np.angle(beta).ravel()

    total = np.zeros(x.size)
    signs = (-1.0) ** np.arange(D)
    log_xk = np.log(np.where(x > 0, x, 1.0))
    for k in range(D):
        diag = np.diag(rho, k)                 # rho[n, n+k]
        if not np.any(diag):
            continue
        # T_n = sqrt(n!/(n+k)!) x^{k/2} e^{-x/2} L_n^k(x)
        if k == 0:
            T = np.exp(-x / 2.0)
            phase = None
        else:
            log_fact = sum(np.log(j) for j in range(1, k + 1))
            T = np.where(x > 0, np.exp(0.5 * k * log_xk - x / 2.0 - 0.5 * log_fact), 0.0)
            phase = np.exp(1j * k * theta)
        T_prev = np.zeros_like(T)
        for n in range(D - k):
            if diag[n] != 0:
                if k == 0:
                    total += signs[n] * np.real(diag[n]) * T
                else:
                    total += signs[n] * 2.0 * np.real(diag[n] * phase) * T
            c1 = (2 * n + 1 + k - x) / np.sqrt((n + 1) * (n + k + 1))
            c2 = np.sqrt(n * (n + k) / ((n + 1.0) * (n + k + 1)))
            T, T_prev = c1 * T - c2 * T_prev, T
    return (total / np.pi).reshape(Q.shape)

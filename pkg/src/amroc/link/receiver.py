"""Linear MMSE receiver with ideal channel knowledge."""
import numpy as np


def per_subcarrier_sinr(A, noise_var):
    """Post-MMSE SINR per stream for channel matrices ``A[..., rx, tx]``.

    ``SINR_i = 1 / [(I + A^H A / noise_var)^-1]_ii - 1``. The 2x2 case uses
    the closed-form inverse.
    """
    A = np.asarray(A, dtype=np.complex128)
    noise_var = np.asarray(noise_var, dtype=np.float64)
    if np.any(noise_var <= 0):
        raise ValueError("noise_var must be > 0")
    nv = noise_var[..., None, None] if noise_var.ndim else noise_var
    gram = np.swapaxes(A.conj(), -1, -2) @ A / nv
    n = A.shape[-1]
    if n == 2:
        a = 1.0 + gram[..., 0, 0].real
        d = 1.0 + gram[..., 1, 1].real
        det = a * d - np.abs(gram[..., 0, 1]) ** 2
        return np.stack([det / d - 1.0, det / a - 1.0], axis=-1)
    m = np.eye(n) + gram
    diag = np.real(np.diagonal(np.linalg.inv(m), axis1=-2, axis2=-1))
    return 1.0 / diag - 1.0


def mmse_equalize(A, y, noise_var):
    """Unbiased MMSE estimates and their post-equalization SINRs.

    ``A`` is ``(N, rx, tx)``, ``y`` is ``(N, rx)``. Returns ``(x_hat (N, tx),
    sinr (N, tx))``; the residual on ``x_hat[:, i]`` has variance
    ``1 / sinr[:, i]``.
    """
    A = np.asarray(A, dtype=np.complex128)
    n_tx = A.shape[-1]
    ah = np.swapaxes(A.conj(), -1, -2)
    m = ah @ A + noise_var * np.eye(n_tx)
    w = np.linalg.solve(m, ah)  # (N, tx, rx)
    x_hat = (w @ y[..., None])[..., 0]
    bias = np.real(np.diagonal(w @ A, axis1=-2, axis2=-1))
    bias = np.clip(bias, 1e-300, None)
    sinr = per_subcarrier_sinr(A, noise_var)
    return x_hat / bias, sinr

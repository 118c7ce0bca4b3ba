"""Symbol/Fourier extraction for disk-basis operators.

A smooth disk operator splits as

    T = sum_d f_d * (shift)^d  +  residual,

where the d-th matrix diagonal of T stabilizes to the Fourier coefficient
f_d of the boundary symbol as the index grows, and the residual (the part
killed by the symbol map) has entries <j+1|R|k+1> = r_{jk} that decay
rapidly.  Operators whose diagonals fail to stabilize are flagged as lying
outside the smooth subalgebra; that is a diagnostic, not an exception.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import BandedOp, DiskBasis


@dataclass
class GeometricFit:
    """Least-squares fit |x_k| ~ C * rate^k over a tail window."""

    rate: float
    log_const: float
    n_points: int
    max_value: float

    @property
    def is_rapid_decay(self) -> bool:
        return self.max_value == 0.0 or self.rate < 1.0


def geometric_fit(values: np.ndarray, tail_frac: float = 0.5, floor: float = 1e-300) -> GeometricFit:
    """Fit a geometric envelope to |values| over the trailing fraction.

    All-(near-)zero tails fit rate 0.  Indices are the array positions.
    """
    v = np.abs(np.asarray(values, dtype=float))
    if v.size == 0:
        return GeometricFit(0.0, -np.inf, 0, 0.0)
    lo = int(np.floor((1 - tail_frac) * v.size))
    tail = v[lo:]
    mx = float(tail.max()) if tail.size else 0.0
    if mx <= floor:
        return GeometricFit(0.0, -np.inf, int(tail.size), mx)
    ks = np.arange(lo, v.size)
    keep = tail > max(floor, mx * 1e-250)
    if keep.sum() < 2:
        return GeometricFit(0.0, float(np.log(mx)), int(keep.sum()), mx)
    slope, intercept = np.polyfit(ks[keep], np.log(tail[keep]), 1)
    return GeometricFit(float(np.exp(slope)), float(intercept), int(keep.sum()), mx)


@dataclass
class SmoothDecomposition:
    """Fourier data and residual of a disk-basis operator."""

    fourier: dict               # d -> f_d
    fourier_spread: dict        # d -> spread of the estimation window
    residual: BandedOp
    residual_frame: np.ndarray  # r_{jk} frame coefficients on the window
    residual_fit: GeometricFit  # envelope of max |r| per antidiagonal j+k
    stabilized: bool
    stab_tol: float

    @property
    def in_smooth_algebra(self) -> bool:
        return self.stabilized and self.residual_fit.is_rapid_decay

    def symbol_mean(self) -> float:
        """(1/2pi) integral of the boundary symbol = f_0."""
        return self.fourier.get(0, 0.0)


def smooth_decompose(T: BandedOp, stab_tol: float = 1e-9, window_frac: float = 0.1) -> SmoothDecomposition:
    """Split a banded disk operator into Fourier part plus residual.

    f_d is estimated as the value of the d-th diagonal at the edge of the
    valid window, accepted only if the last `window_frac` of the diagonal
    has spread <= stab_tol.
    """
    if not isinstance(T.basis, DiskBasis):
        raise ValueError("smooth decomposition is defined on the disk basis")
    n = T.basis.size
    v = min(T.valid, n)
    fourier: dict[int, float] = {}
    spread: dict[int, float] = {}
    stabilized = True
    for d in sorted(T.bands):
        diag = T.offset_diagonal(d)          # ordered by column index
        m = v - abs(d)                       # entries fully inside the window
        if m < 3:
            stabilized = False
            continue
        diag = diag[:m]
        lo = max(0, int(np.ceil((1 - window_frac) * m)) - 1)
        win = diag[lo:]
        sp = float(win.max() - win.min())
        est = float(win[-1])
        spread[d] = sp
        if sp > stab_tol:
            stabilized = False
            est = float(np.mean(win))
        if est != 0.0:
            fourier[d] = est

    # residual = T - sum_d f_d shift^d
    rows, cols, vals = [], [], []
    for d, f in fourier.items():
        for j in range(max(0, -d), min(n, n - d)):
            rows.append(j + d)
            cols.append(j)
            vals.append(f)
    fpart = BandedOp.from_coo(T.basis, rows, cols, vals, bands=T.bands or {0}, valid=T.valid)
    residual = T - fpart

    mask = residual.window_mask(v)
    frame = residual.mat[np.ix_(mask, mask)].toarray()
    # max |r_{jk}| per antidiagonal s = j+k, for the decay envelope
    s_max = np.zeros(2 * frame.shape[0] - 1) if frame.size else np.zeros(0)
    if frame.size:
        absf = np.abs(frame)
        for s in range(s_max.size):
            jlo = max(0, s - frame.shape[0] + 1)
            jhi = min(s, frame.shape[0] - 1)
            s_max[s] = max(absf[j, s - j] for j in range(jlo, jhi + 1))
    fit = geometric_fit(s_max, tail_frac=0.6)
    return SmoothDecomposition(
        fourier=fourier,
        fourier_spread=spread,
        residual=residual,
        residual_frame=frame,
        residual_fit=fit,
        stabilized=stabilized,
        stab_tol=stab_tol,
    )

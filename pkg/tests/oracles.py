"""Brute-force oracles for 2 x 2 problems, independent of the solver code paths."""

import itertools

import numpy as np

# supports of d_1, d_2 for n = 2
CORNER_MASKS = np.array([[[1, 0], [0, 0]], [[0, 1], [1, 1]]], dtype=bool)
AUGMENTED_MASKS = np.array([[[1, 0], [0, 1]], [[0, 1], [1, 0]]], dtype=bool)


def _eig2(a, b, d):
    """Eigenvalues of the Hermitian [[a, b], [conj b, d]] (vectorised)."""
    mid = 0.5 * (a + d)
    rad = np.sqrt(0.25 * (a - d) ** 2 + np.abs(b) ** 2)
    return mid - rad, mid + rad


def _sq_fn(w, masks, p, column):
    # w: (N, 2, 2); returns the square-function norm per row
    d = masks[None] * w[:, None]
    if column:
        g = np.einsum("nkji,nkjl->nil", d.conj(), d)
    else:
        g = np.einsum("nkij,nklj->nil", d, d.conj())
    lo, hi = _eig2(g[:, 0, 0].real, g[:, 0, 1], g[:, 1, 1].real)
    lo = np.clip(lo, 0, None)
    hi = np.clip(hi, 0, None)
    return (lo ** (p / 2) + hi ** (p / 2)) ** (1 / p)


def hardy_low_grid(x, masks, p, coarse=5, tol=1e-7):
    """min_z col(x - z) + row(z) by a coarse tensor grid over the 8 real
    coordinates of z followed by a 3^8 stencil search with step halving."""
    x = np.asarray(x, dtype=complex)

    def f(zr):
        z = zr[:, :4] + 1j * zr[:, 4:]
        z = z.reshape(-1, 2, 2)
        return _sq_fn(x[None] - z, masks, p, True) + _sq_fn(z, masks, p, False)

    radius = 1.5 * np.max(np.abs(x))
    center = np.concatenate([x.real.ravel(), x.imag.ravel()]) * 0.5
    axes = np.linspace(-radius, radius, coarse)
    grid = center + np.array(list(itertools.product(axes, repeat=8)))
    vals = f(grid)
    i = int(np.argmin(vals))
    best, best_val = grid[i], vals[i]
    step = axes[1] - axes[0]
    stencil = np.array(list(itertools.product((-1.0, 0.0, 1.0), repeat=8)))
    while step > tol * radius:
        pts = best + step * stencil
        vals = f(pts)
        i = int(np.argmin(vals))
        if vals[i] < best_val - 1e-15:
            best, best_val = pts[i], vals[i]
        else:
            step *= 0.5
    return float(best_val)


def hardy_max_grid_p1(xs, points=41, levels=40):
    """min Tr(y) over 2 x 2 Hermitian y >= x_k.

    For fixed y11 and y12 the least feasible y22 follows from the Schur
    complement, y22 >= x22 + |y12 - x12|^2 / (y11 - x11), leaving a grid over
    three real parameters that is refined around the best point."""
    xs = [np.asarray(x, dtype=complex) for x in xs]
    x11 = np.array([x[0, 0].real for x in xs])
    x22 = np.array([x[1, 1].real for x in xs])
    x12 = np.array([x[0, 1] for x in xs])
    scale = max(np.abs(x).max() for x in xs)

    def f(y11, re, im):
        b = re + 1j * im
        gap = y11[..., None] - x11
        need = x22 + np.abs(b[..., None] - x12) ** 2 / np.where(gap > 0, gap, np.nan)
        y22 = np.nanmax(need, axis=-1)
        # y22 must also keep y - x_k PSD when gap is tiny; need already encodes it
        val = y11 + y22
        return np.where(np.all(gap > 0, axis=-1), val, np.inf)

    lo = np.array([x11.max(), -2 * scale, -2 * scale])
    hi = np.array([x11.max() + 4 * scale, 2 * scale, 2 * scale])
    best_val = np.inf
    for _ in range(levels):
        axes = [np.linspace(lo[i], hi[i], points) for i in range(3)]
        g = np.meshgrid(*axes, indexing="ij")
        vals = f(*g)
        idx = np.unravel_index(np.argmin(vals), vals.shape)
        best_val = min(best_val, float(vals[idx]))
        centre = np.array([axes[i][idx[i]] for i in range(3)])
        width = (hi - lo) / 4
        lo = centre - width
        hi = centre + width
        lo[0] = max(lo[0], x11.max())
    return best_val


def t_inf_2x2_grid(points=90):
    """max ||T u||_inf over 2 x 2 unitaries u, by a grid over U(2)."""
    th, a, b, c = np.meshgrid(
        np.linspace(0, np.pi / 2, points),
        np.linspace(0, 2 * np.pi, 24, endpoint=False),
        np.linspace(0, 2 * np.pi, 24, endpoint=False),
        np.linspace(0, 2 * np.pi, 24, endpoint=False),
        indexing="ij",
    )
    u11 = np.exp(1j * a) * np.cos(th)
    u12 = np.exp(1j * b) * np.sin(th)
    u22 = np.exp(1j * (c - a)) * np.cos(th)
    # T u = [[u11, u12], [0, u22]]
    fro2 = np.abs(u11) ** 2 + np.abs(u12) ** 2 + np.abs(u22) ** 2
    det = np.abs(u11 * u22)
    smax = np.sqrt(0.5 * (fro2 + np.sqrt(np.clip(fro2**2 - 4 * det**2, 0, None))))
    return float(smax.max())

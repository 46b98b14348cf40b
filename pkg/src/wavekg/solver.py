"""Radial finite-difference evolution of the coupled system.

Unknowns u (wave) and v (Klein-Gordon) on a uniform r-grid, evolved by
classical four-stage Runge-Kutta from data at t = 2:

    d_t^2 u = Lap_r u + b00 (d_t u)(d_t v) + bd (d_r u)(d_r v)
    d_t^2 v = [(1 + pd u) Lap_r v - c^2 v] / (1 - p00 u)

with Lap_r w = w_rr + (2/r) w_r and the axis limit 3 w_rr at r = 0.
The axis uses an even ghost extension; the outer boundary is homogeneous
Dirichlet at r_max >= t_end, provably outside the support cone.

Every accepted step is stored (up to a radius cap slightly beyond the
support cone, where the fields are identically zero), which gives the
dense time coverage needed to sample fields and their derivative jets
on hyperboloids t = sqrt(s^2 + r^2) and along characteristic curves.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .scenario import Scenario

__all__ = [
    "SolverError",
    "FieldState",
    "SliceHistory",
    "initial_state",
    "rhs",
    "evolve",
    "sample_on_hyperboloid",
    "sample_along_curve",
    "HistorySampler",
]

log = logging.getLogger(__name__)

_FIELDS = ("u", "ut", "v", "vt")


class SolverError(RuntimeError):
    pass


@dataclass
class FieldState:
    """Fields (u, d_t u, v, d_t v) on the uniform r-grid at one time."""

    t: float
    r: np.ndarray
    u: np.ndarray
    ut: np.ndarray
    v: np.ndarray
    vt: np.ndarray


@dataclass
class SliceHistory:
    """Uniformly spaced time slices of the four fields.

    Arrays have shape (n_slices, n_radii); the stored radial range may be
    shorter than the computational grid (fields vanish beyond the support
    cone r <= t - 1).
    """

    scenario: Scenario
    t0: float
    dt: float
    r: np.ndarray
    u: np.ndarray
    ut: np.ndarray
    v: np.ndarray
    vt: np.ndarray

    @property
    def n_slices(self):
        return self.u.shape[0]

    @property
    def t_last(self):
        return self.t0 + (self.n_slices - 1) * self.dt

    def times(self):
        return self.t0 + self.dt * np.arange(self.n_slices)

    def state(self, index):
        return FieldState(t=self.t0 + index * self.dt, r=self.r,
                          u=self.u[index], ut=self.ut[index],
                          v=self.v[index], vt=self.vt[index])


# -- spatial operators --------------------------------------------------------


def _laplacian(w, r, dr):
    """Radial Laplacian with even ghost at the axis, Dirichlet outer edge."""
    lap = np.empty_like(w)
    lap[1:-1] = (w[2:] - 2.0 * w[1:-1] + w[:-2]) / dr**2 \
        + (w[2:] - w[:-2]) / (dr * r[1:-1])
    lap[0] = 6.0 * (w[1] - w[0]) / dr**2
    lap[-1] = 0.0
    return lap


def _ddr(w, dr):
    """Centered first derivative; odd symmetry at the axis, zero outer edge."""
    d = np.empty_like(w)
    d[1:-1] = (w[2:] - w[:-2]) / (2.0 * dr)
    d[0] = 0.0
    d[-1] = 0.0
    return d


def initial_state(scn):
    """Data at t = 2: eps-scaled named profiles on the uniform grid."""
    n = int(round(scn.r_max / scn.dr))
    r = scn.dr * np.arange(n + 1)
    return FieldState(
        t=2.0, r=r,
        u=scn.eps * scn.u0(r), ut=scn.eps * scn.u1(r),
        v=scn.eps * scn.v0(r), vt=scn.eps * scn.v1(r))


def _rhs_arrays(u, ut, v, vt, r, dr, scn):
    denom = 1.0 - scn.p00 * u
    if np.min(np.abs(denom)) < 0.5:
        raise SolverError(
            "quasilinear degeneracy: |1 - p00*u| < 1/2 on the grid "
            f"(min {np.min(np.abs(denom)):.3e})")
    ur = _ddr(u, dr)
    vr = _ddr(v, dr)
    dut = _laplacian(u, r, dr) + scn.b00 * ut * vt + scn.bd * ur * vr
    dvt = ((1.0 + scn.pd * u) * _laplacian(v, r, dr) - scn.c**2 * v) / denom
    return ut, dut, vt, dvt


def rhs(state, scn):
    """Time derivative of a FieldState under the coupled system."""
    du, dut, dv, dvt = _rhs_arrays(state.u, state.ut, state.v, state.vt,
                                   state.r, scn.dr, scn)
    return FieldState(t=state.t, r=state.r, u=du, ut=dut, v=dv, vt=dvt)


def evolve(scn, store_margin=20):
    """Run the scenario to t_end, returning the full SliceHistory."""
    state = initial_state(scn)
    r, dr = state.r, scn.dr
    n_steps = max(1, int(np.ceil((scn.t_end - 2.0) / (scn.cfl * dr))))
    dt = (scn.t_end - 2.0) / n_steps

    r_cap = min(scn.r_max, scn.t_end - 1.0 + store_margin * dr)
    n_store = int(round(r_cap / dr)) + 1
    shape = (n_steps + 1, n_store)
    hist = {name: np.empty(shape) for name in _FIELDS}

    y = [state.u.copy(), state.ut.copy(), state.v.copy(), state.vt.copy()]
    for name, arr in zip(_FIELDS, y):
        hist[name][0] = arr[:n_store]

    report_every = max(1, n_steps // 10)
    for step in range(1, n_steps + 1):
        k1 = _rhs_arrays(*y, r, dr, scn)
        y2 = [a + 0.5 * dt * k for a, k in zip(y, k1)]
        k2 = _rhs_arrays(*y2, r, dr, scn)
        y3 = [a + 0.5 * dt * k for a, k in zip(y, k2)]
        k3 = _rhs_arrays(*y3, r, dr, scn)
        y4 = [a + dt * k for a, k in zip(y, k3)]
        k4 = _rhs_arrays(*y4, r, dr, scn)
        y = [a + (dt / 6.0) * (p + 2.0 * q + 2.0 * s + w)
             for a, p, q, s, w in zip(y, k1, k2, k3, k4)]
        if not np.isfinite(y[0][::16]).all() or not np.isfinite(y[2][::16]).all():
            raise SolverError(f"non-finite field values at slice {step} "
                              f"(t = {2.0 + step * dt:.4f})")
        for name, arr in zip(_FIELDS, y):
            hist[name][step] = arr[:n_store]
        if step % report_every == 0:
            log.info("evolve: t = %.2f (%d/%d), max|u| = %.3e, max|v| = %.3e",
                     2.0 + step * dt, step, n_steps,
                     np.max(np.abs(y[0])), np.max(np.abs(y[2])))

    return SliceHistory(scenario=scn, t0=2.0, dt=dt, r=r[:n_store].copy(),
                        u=hist["u"], ut=hist["ut"], v=hist["v"], vt=hist["vt"])


# -- interpolation machinery --------------------------------------------------
#
# Both samplers gather, for each query point, a window of 8 radial nodes
# around the point on a few bracketing time slices.  Negative window
# indices are mapped through the axis mirror (all four base fields are
# even in r); indices beyond the stored range are clamped to zero (the
# fields vanish outside the support cone).  Working with signed node
# radii keeps the parity bookkeeping automatic: derived odd fields pick
# up their signs from the mirrored even data.

_WINDOW = 8
_CENTER = slice(2, 6)  # the 4 interpolation nodes inside the window


def _gather(history, ts, rs, n_slices):
    ts = np.asarray(ts, dtype=float).ravel()
    rs = np.asarray(rs, dtype=float).ravel()
    nt, nr = history.u.shape
    dt, dr = history.dt, history.scenario.dr
    if nt < n_slices:
        raise SolverError("history too short for interpolation")
    tmin, tmax = history.t0, history.t_last
    if np.any(ts < tmin - 1e-9 * dt) or np.any(ts > tmax + 1e-9 * dt):
        raise SolverError(
            f"requested times [{ts.min():.4f}, {ts.max():.4f}] outside stored "
            f"range [{tmin:.4f}, {tmax:.4f}]")
    offset = 0 if n_slices == 2 else 1
    j0 = np.clip(np.floor((ts - tmin) / dt).astype(int) - offset, 0, nt - n_slices)
    idx_t = j0[:, None] + np.arange(n_slices)

    i0 = np.floor(rs / dr).astype(int) - 3
    idx_r = i0[:, None] + np.arange(_WINDOW)
    mirrored = np.abs(idx_r)
    valid = mirrored <= nr - 1
    safe = np.where(valid, mirrored, 0)

    fields = {}
    for name in _FIELDS:
        arr = getattr(history, name)
        vals = arr[idx_t[:, :, None], safe[:, None, :]]
        fields[name] = np.where(valid[:, None, :], vals, 0.0)
    r_nodes = idx_r * dr  # signed radii
    t_nodes = tmin + idx_t * dt
    return fields, r_nodes, t_nodes, ts, rs


def _lagrange_weights(nodes, target):
    """Barycentric-free Lagrange weights, nodes shape (P, k), target (P,)."""
    P, k = nodes.shape
    w = np.ones((P, k))
    for i in range(k):
        for m in range(k):
            if m == i:
                continue
            w[:, i] *= (target - nodes[:, m]) / (nodes[:, i] - nodes[:, m])
    return w


def _slice_derived(fields, r_nodes, scn, order):
    """Per-slice derived jets at the 4 central window nodes.

    fields: dict of (P, S, 8) arrays; returns dict[(field, a, b)] of
    (P, S, 4) arrays with a + b <= order, time derivatives eliminated
    through the evolution equations.
    """
    dr = scn.dr
    c2 = scn.c**2
    rc = r_nodes[:, None, _CENTER]
    on_axis = np.abs(rc) < 0.5 * dr
    r_safe = np.where(on_axis, 1.0, rc)

    def d1(x):
        return (x[..., 3:7] - x[..., 1:5]) / (2.0 * dr)

    def d2(x):
        return (x[..., 3:7] - 2.0 * x[..., 2:6] + x[..., 1:5]) / dr**2

    def d3(x):
        return (x[..., 4:8] - 2.0 * x[..., 3:7]
                + 2.0 * x[..., 1:5] - x[..., 0:4]) / (2.0 * dr**3)

    def lap(x, x1, x2):
        del x
        return np.where(on_axis, 3.0 * x2, x2 + 2.0 * x1 / r_safe)

    def lap_r(x1, x2, x3):
        # d_r of the radial Laplacian; odd, so it vanishes on the axis
        return np.where(on_axis, 0.0, x3 + 2.0 * x2 / r_safe - 2.0 * x1 / r_safe**2)

    out = {}
    U, UT = fields["u"], fields["ut"]
    V, VT = fields["v"], fields["vt"]
    for name, X in (("u", U), ("ut", UT), ("v", V), ("vt", VT)):
        out[name] = (X[..., _CENTER], d1(X), d2(X), d3(X))

    jets = {}
    for f, base, dot in (("u", "u", "ut"), ("v", "v", "vt")):
        w0, w1, w2, w3 = out[base]
        jets[(f, 0, 0)], jets[(f, 0, 1)] = w0, w1
        if order >= 2:
            jets[(f, 0, 2)] = w2
        if order >= 3:
            jets[(f, 0, 3)] = w3
        wt0, wt1, wt2, _ = out[dot]
        jets[(f, 1, 0)] = wt0
        if order >= 2:
            jets[(f, 1, 1)] = wt1
        if order >= 3:
            jets[(f, 1, 2)] = wt2
    if order < 2:
        return jets

    u0, u1, u2, u3 = out["u"]
    ut0, ut1, ut2, _ = out["ut"]
    v0, v1, v2, v3 = out["v"]
    vt0, vt1, vt2, _ = out["vt"]
    lap_u = lap(u0, u1, u2)
    lap_v = lap(v0, v1, v2)
    lap_ut = lap(ut0, ut1, ut2)
    lap_vt = lap(vt0, vt1, vt2)
    denom = 1.0 - scn.p00 * u0

    utt = lap_u + scn.b00 * ut0 * vt0 + scn.bd * u1 * v1
    numer = (1.0 + scn.pd * u0) * lap_v - c2 * v0
    vtt = numer / denom
    jets[("u", 2, 0)] = utt
    jets[("v", 2, 0)] = vtt
    if order < 3:
        return jets

    uttr = lap_r(u1, u2, u3) + scn.b00 * (ut1 * vt0 + ut0 * vt1) \
        + scn.bd * (u2 * v1 + u1 * v2)
    numer_r = scn.pd * u1 * lap_v + (1.0 + scn.pd * u0) * lap_r(v1, v2, v3) - c2 * v1
    vttr = numer_r / denom + numer * scn.p00 * u1 / denom**2
    uttt = lap_ut + scn.b00 * (utt * vt0 + ut0 * vtt) \
        + scn.bd * (ut1 * v1 + u1 * vt1)
    vttt = (scn.pd * ut0 * lap_v + (1.0 + scn.pd * u0) * lap_vt
            - c2 * vt0 + scn.p00 * ut0 * vtt) / denom
    jets[("u", 2, 1)] = uttr
    jets[("v", 2, 1)] = vttr
    jets[("u", 3, 0)] = uttt
    jets[("v", 3, 0)] = vttt
    return jets


class HistorySampler:
    """Derivative jets of a run at scattered spacetime points.

    Four bracketing time slices are combined by Lagrange interpolation;
    spatial derivatives come from centered stencils per slice, with time
    derivatives of order >= 2 eliminated through the evolution equations
    rather than differenced.
    """

    def __init__(self, history):
        self.history = history

    def jets(self, ts, rs, order=3):
        if order > 3:
            raise ValueError("jets available up to total order 3")
        fields, r_nodes, t_nodes, ts, rs = _gather(self.history, ts, rs, 4)
        derived = _slice_derived(fields, r_nodes, self.history.scenario, order)
        wt = _lagrange_weights(t_nodes, ts)  # (P, 4)
        rc = r_nodes[:, _CENTER]
        wr = _lagrange_weights(rc, rs)  # (P, 4)
        out = {"u": {}, "v": {}}
        for (f, a, b), arr in derived.items():
            in_t = np.einsum("ps,psn->pn", wt, arr)
            out[f][(a, b)] = np.einsum("pn,pn->p", wr, in_t)
        return out


def _hermite_sample(history, ts, rs):
    """Fields and first derivatives by cubic Hermite in t, Lagrange-4 in r."""
    fields, r_nodes, t_nodes, ts, rs = _gather(history, ts, rs, 2)
    scn = history.scenario
    derived = _slice_derived(fields, r_nodes, scn, order=2)

    dt = history.dt
    theta = ((ts - t_nodes[:, 0]) / dt)[:, None]
    h00 = 1.0 - 3.0 * theta**2 + 2.0 * theta**3
    h10 = dt * theta * (1.0 - theta) ** 2
    h01 = 3.0 * theta**2 - 2.0 * theta**3
    h11 = dt * theta**2 * (theta - 1.0)

    pairs = {
        "u": (("u", 0, 0), ("u", 1, 0)),
        "v": (("v", 0, 0), ("v", 1, 0)),
        "ut": (("u", 1, 0), ("u", 2, 0)),
        "vt": (("v", 1, 0), ("v", 2, 0)),
        "ur": (("u", 0, 1), ("u", 1, 1)),
        "vr": (("v", 0, 1), ("v", 1, 1)),
    }
    rc = r_nodes[:, _CENTER]
    wr = _lagrange_weights(rc, rs)
    out = {}
    for name, (val_key, dot_key) in pairs.items():
        w = derived[val_key]
        wd = derived[dot_key]
        nodal = (h00 * w[:, 0, :] + h10 * wd[:, 0, :]
                 + h01 * w[:, 1, :] + h11 * wd[:, 1, :])
        out[name] = np.einsum("pn,pn->p", wr, nodal)
    return out


def sample_on_hyperboloid(history, s, r_nodes):
    """Fields and first derivatives on H_s at the given radii.

    Cubic Hermite interpolation in time from stored (value, time
    derivative) pairs; spatial derivatives by centered stencils before
    interpolation.  Returns a dict with u, ut, ur, v, vt, vr plus the
    coordinate arrays.
    """
    r_nodes = np.asarray(r_nodes, dtype=float)
    ts = np.hypot(float(s), r_nodes)
    out = _hermite_sample(history, ts, r_nodes)
    out.update(s=float(s), r=r_nodes, t=ts)
    return out


def sample_along_curve(history, curve, tau_grid):
    """Fields and first derivatives along the hyperbola at times tau."""
    tau = np.asarray(tau_grid, dtype=float)
    rr = curve.radius(tau)
    out = _hermite_sample(history, tau, rr)
    out.update(t=tau, r=rr, curve=curve)
    return out

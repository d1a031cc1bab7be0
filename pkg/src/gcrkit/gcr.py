"""Position-vector analysis and surface classification.

Splits the position vector of a hypersurface point into tangential and
normal parts, tests whether the tangential part is a principal direction
(the defining property of a position-principal, or "generalized constant
ratio", surface), evaluates the first-order structural identities such
surfaces must satisfy, and aggregates grid sweeps into a classification
report (position-principal / isoparametric / constant mean curvature /
spectral-split / vanishing top curvature).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from collections.abc import Sequence

import numpy as np

from . import jet
from .expr import ExprError
from .geometry import (
    EPS_REG,
    GeometryError,
    Immersion,
    PointGeometry,
    PrincipalData,
    SingularPointError,
    curvature_invariants,
    default_step,
    normal_jets,
    point_geometry,
    principal_data,
)

__all__ = [
    "DegeneratePointError",
    "EmptyReportError",
    "PositionAngles",
    "position_angles",
    "GcrResidual",
    "gcr_residual",
    "StructuralResiduals",
    "structural_residuals",
    "delta2_ideal_test",
    "GridSpec",
    "Tolerances",
    "PointRecord",
    "SurfaceReport",
    "classify_surface",
]


class DegeneratePointError(ValueError):
    """The tangential position part (or the position itself) vanishes."""


class EmptyReportError(RuntimeError):
    """Every grid point was singular; no geometry could be computed."""


# -- position decomposition ------------------------------------------------------------


@dataclass
class PositionAngles:
    """Length/angle split of the position vector at one surface point.

    mu is the distance to the origin, theta in [0, pi] the angle between the
    position and the unit normal (so the normal part is mu*cos(theta) and the
    tangential part has length mu*sin(theta)).  Chart gradients of theta and
    mu come from exact jet evaluation and are None at degenerate points.
    """

    mu: float
    cos_theta: float
    theta: float
    xT: np.ndarray
    xT_norm: float
    degenerate: bool
    e1: np.ndarray | None
    theta_grad: np.ndarray | None
    mu_grad: np.ndarray | None


def position_angles(
    m: Immersion | None,
    p: Sequence[float],
    pg: PointGeometry,
    eps_tan_rel: float = 1e-8,
) -> PositionAngles:
    """Tangential/normal split of the position vector at a regular point."""
    pos = pg.position
    mu = float(np.linalg.norm(pos))
    b = pg.jac.T @ pos
    xT = np.linalg.solve(pg.metric, b)
    xT_norm = float(math.sqrt(max(xT @ pg.metric @ xT, 0.0)))
    eps_tan = eps_tan_rel * max(1.0, mu)
    degenerate = xT_norm < eps_tan or mu < eps_tan

    if mu < eps_tan:
        # surface passes (numerically) through the origin: angles undefined
        return PositionAngles(mu, 1.0, 0.0, xT, xT_norm, True, None, None, None)

    cos_theta = float(np.clip(pos @ pg.normal / mu, -1.0, 1.0))
    theta = math.acos(cos_theta)
    if degenerate:
        return PositionAngles(mu, cos_theta, theta, xT, xT_norm, True, None, None, None)

    mu_sq = pg.jets[0] * pg.jets[0]
    for component in pg.jets[1:]:
        mu_sq = mu_sq + component * component
    mu_jet = jet.sqrt(mu_sq)
    njets = normal_jets(pg.jets)
    dot = pg.jets[0].truncated(1) * njets[0]
    for component, nj in zip(pg.jets[1:], njets[1:]):
        dot = dot + component.truncated(1) * nj
    cos_jet = dot * (1.0 / mu_jet.truncated(1))
    theta_jet = jet.acos(cos_jet)
    return PositionAngles(
        mu=mu,
        cos_theta=cos_theta,
        theta=theta,
        xT=xT,
        xT_norm=xT_norm,
        degenerate=False,
        e1=xT / xT_norm,
        theta_grad=theta_jet.grad.copy(),
        mu_grad=mu_jet.grad.copy(),
    )


# -- the position-principal test --------------------------------------------------------


@dataclass(frozen=True)
class GcrResidual:
    """Primary: g-norm of the part of S e1 orthogonal to e1 (e1 = unit
    tangential position).  Secondary: largest angle derivative |Y(theta)|
    over unit tangents Y orthogonal to e1 — an equivalent criterion computed
    along an independent route."""

    primary: float
    secondary: float


def g_complement_basis(g: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Columns: a g-orthonormal basis of the g-orthogonal complement of v."""
    n = g.shape[0]
    vn = v / math.sqrt(v @ g @ v)
    # seed with the chart axes least aligned with v, for determinism
    overlaps = np.abs(g @ vn)
    order = np.argsort(overlaps, kind="stable")
    cols = [vn]
    for axis in order:
        cand = np.zeros(n)
        cand[axis] = 1.0
        for c in cols:
            cand = cand - (cand @ g @ c) * c
        norm = math.sqrt(max(cand @ g @ cand, 0.0))
        if norm > 1e-10:
            cols.append(cand / norm)
        if len(cols) == n:
            break
    return np.column_stack(cols[1:])


def gcr_residual(pa: PositionAngles, pd: PrincipalData, pg: PointGeometry) -> GcrResidual:
    """Both position-principal residuals at a nondegenerate point."""
    if pa.degenerate:
        raise DegeneratePointError(
            "tangential position vanishes; the position-principal test is vacuous here"
        )
    g = pg.metric
    e1 = pa.e1
    se1 = pg.shape @ e1
    tail = se1 - (se1 @ g @ e1) * e1
    primary = float(math.sqrt(max(tail @ g @ tail, 0.0)))
    comp = g_complement_basis(g, e1)
    secondary = float(np.max(np.abs(comp.T @ pa.theta_grad))) if comp.size else 0.0
    return GcrResidual(primary=primary, secondary=secondary)


def delta2_ideal_test(k: Sequence[float], tol: float) -> bool:
    """True when one curvature equals the sum of the other two within tol.

    This is the spectral form of the ideal split {a, b, a + b} that the
    classification flags report as is_delta2_ideal.
    """
    k = np.asarray(k, dtype=float)
    if k.size < 3:
        raise ValueError("spectral split test needs at least three curvatures")
    total = float(k.sum())
    # k_i = k_j + k_l  <=>  2 k_i = k_1 + k_2 + k_3
    return bool(np.min(np.abs(2.0 * k - total)) <= tol)


# -- structural identities ---------------------------------------------------------------


@dataclass
class StructuralResiduals:
    """Residuals of the first-order identities of position-principal surfaces.

    r_geodesic:   acceleration of the e1 field along itself
    r_k1:         k1 - e1(theta) + cos(theta)/mu
    r_theta_flat: largest |e_i(theta)|, |e_i(mu)| over complement directions
    r_shape_coeff: nabla_{e_i} e1 minus its predicted multiple of e_i
    r_omega:      connection forms omega_12(e3), omega_13(e2)
    r_codazzi_system: worst residual of the curvature-transport system
    details:      per-identity breakdown of the transport system
    skipped:      transport checks not evaluated here, with reasons
    """

    r_geodesic: float
    r_k1: float
    r_theta_flat: float
    r_shape_coeff: float
    r_omega: float
    r_codazzi_system: float
    details: dict[str, float] = field(default_factory=dict)
    skipped: tuple[str, ...] = ()


def _eigh2(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a symmetric 2x2 (or 1x1) matrix, ascending."""
    if a.shape == (1, 1):
        return np.array([a[0, 0]]), np.eye(1)
    half_diff = 0.5 * (a[1, 1] - a[0, 0])
    b = a[0, 1]
    disc = math.hypot(half_diff, b)
    mean = 0.5 * (a[0, 0] + a[1, 1])
    vals = np.array([mean - disc, mean + disc])
    if disc < 1e-300:
        return vals, np.eye(2)
    # eigenvector for the smaller eigenvalue, stable choice of formula
    if half_diff >= 0:
        v0 = np.array([half_diff + disc, -b])
    else:
        v0 = np.array([b, half_diff - disc])
    norm = np.linalg.norm(v0)
    if norm == 0.0:
        return vals, np.eye(2)
    v0 /= norm
    vecs = np.column_stack([v0, [-v0[1], v0[0]]])
    return vals, vecs


@dataclass
class _StructuralFrame:
    """Position-adapted frame: e1 along the tangential position, the rest
    diagonalizing the shape operator on the g-complement of e1."""

    frame: np.ndarray    # columns, g-orthonormal
    values: np.ndarray   # values[0] = Rayleigh curvature of e1; rest ascending
    pg: PointGeometry
    pa: PositionAngles


def _structural_frame(pg: PointGeometry, pa: PositionAngles) -> _StructuralFrame:
    g = pg.metric
    e1 = pa.e1
    comp = g_complement_basis(g, e1)
    restricted = comp.T @ g @ pg.shape @ comp
    restricted = 0.5 * (restricted + restricted.T)
    vals, vecs = _eigh2(restricted)
    cols = comp @ vecs
    for i in range(cols.shape[1]):
        lead = int(np.argmax(np.abs(cols[:, i])))
        if cols[lead, i] < 0:
            cols[:, i] = -cols[:, i]
    k1 = float(e1 @ g @ pg.shape @ e1)
    frame = np.column_stack([e1, cols])
    values = np.concatenate([[k1], vals])
    return _StructuralFrame(frame=frame, values=values, pg=pg, pa=pa)


def _frame_sample(m: Immersion, q: np.ndarray, eps_reg: float) -> _StructuralFrame:
    pg = point_geometry(m, q, eps_reg=eps_reg, check_domain=False)
    pa = position_angles(m, q, pg)
    if pa.degenerate:
        raise DegeneratePointError(f"degenerate probe at {q.tolist()}")
    return _structural_frame(pg, pa)


def _match_complement(
    ref: _StructuralFrame, sample: _StructuralFrame
) -> tuple[np.ndarray, np.ndarray]:
    """Reorder/sign-align the complement columns of a nearby frame sample
    against the reference, using reference-metric inner products."""
    g = ref.pg.metric
    ref_cols = ref.frame[:, 1:]
    cand_cols = sample.frame[:, 1:]
    overlap = ref_cols.T @ g @ cand_cols
    ncols = ref_cols.shape[1]
    taken: set[int] = set()
    perm = []
    for i in range(ncols):
        best, best_j = -1.0, -1
        for j in range(ncols):
            if j in taken:
                continue
            if abs(overlap[i, j]) > best:
                best, best_j = abs(overlap[i, j]), j
        perm.append(best_j)
        taken.add(best_j)
    cols = cand_cols[:, perm].copy()
    vals = sample.values[1:][perm].copy()
    for i in range(ncols):
        if overlap[i, perm[i]] < 0:
            cols[:, i] = -cols[:, i]
    return cols, vals


def structural_residuals(
    m: Immersion,
    p: Sequence[float],
    pg: PointGeometry | None = None,
    pd: PrincipalData | None = None,
    pa: PositionAngles | None = None,
    step: float | None = None,
    tol_gap: float = 1e-4,
    nested_factor: float = 20.0,
    eps_reg: float = EPS_REG,
) -> StructuralResiduals:
    """Residuals of the identities that hold along a position-principal
    surface, estimated by sign-aligned central differencing of the
    position-adapted frame.

    The e1 field is smooth wherever the point is nondegenerate, so the
    geodesic/shape/connection checks need no eigenvalue gap; the transport
    checks that differentiate the complement eigenvectors are skipped when
    the two complement curvatures are closer than tol_gap.
    """
    q = np.asarray(p, dtype=float)
    if pg is None:
        pg = point_geometry(m, q, eps_reg=eps_reg, check_domain=False)
    if pa is None:
        pa = position_angles(m, q, pg)
    if pa.degenerate:
        raise DegeneratePointError("structural identities are vacuous at this point")
    if pd is None:
        pd = principal_data(pg, tol_gap)
    if step is None:
        step = default_step(m)

    n = pg.n
    g = pg.metric
    gamma = pg.christoffel
    base = _structural_frame(pg, pa)
    frame, values = base.frame, base.values
    mu, cos_t = pa.mu, pa.cos_theta
    sin_t = pa.xT_norm / mu

    def gnorm(v: np.ndarray) -> float:
        return float(math.sqrt(max(v @ g @ v, 0.0)))

    # identities that only need exact jet gradients of theta and mu
    k1_index = int(np.argmax(np.abs(frame[:, 0] @ g @ pd.directions)))
    k1 = float(pd.curvatures[k1_index])
    r_k1 = abs(k1 - frame[:, 0] @ pa.theta_grad + cos_t / mu)
    r_theta_flat = 0.0
    for i in range(1, n):
        r_theta_flat = max(
            r_theta_flat,
            abs(float(frame[:, i] @ pa.theta_grad)),
            abs(float(frame[:, i] @ pa.mu_grad)),
        )

    # covariant derivatives of the e1 field along every frame direction
    def e1_at(qq: np.ndarray) -> np.ndarray:
        sample = _frame_sample(m, qq, eps_reg)
        return sample.frame[:, 0]

    cov_e1 = np.empty((n, n))
    for l in range(n):
        disp = step * frame[:, l]
        diff = (e1_at(q + disp) - e1_at(q - disp)) / (2.0 * step)
        cov_e1[l] = diff + np.einsum("kab,a,b->k", gamma, frame[:, l], frame[:, 0])

    r_geodesic = gnorm(cov_e1[0])
    r_shape_coeff = 0.0
    for i in range(1, n):
        coeff = (1.0 + mu * cos_t * values[i]) / (mu * sin_t)
        r_shape_coeff = max(r_shape_coeff, gnorm(cov_e1[i] - coeff * frame[:, i]))

    if n == 2:
        return StructuralResiduals(
            r_geodesic=r_geodesic,
            r_k1=float(r_k1),
            r_theta_flat=r_theta_flat,
            r_shape_coeff=r_shape_coeff,
            r_omega=0.0,
            r_codazzi_system=0.0,
            details={},
            skipped=("curvature transport system (3-dimensional charts only)",),
        )

    r_omega = max(
        abs(float(cov_e1[2] @ g @ frame[:, 1])),   # omega_12(e3)
        abs(float(cov_e1[1] @ g @ frame[:, 2])),   # omega_13(e2)
    )

    details: dict[str, float] = {}
    skipped: list[str] = []

    # k1 as a smooth field: Rayleigh quotient of the shape operator on e1
    def k1_at(qq: np.ndarray) -> float:
        sample = _frame_sample(m, qq, eps_reg)
        return float(sample.values[0])

    def directional(fn, direction: np.ndarray, h: float):
        return (fn(q + h * direction) - fn(q - h * direction)) / (2.0 * h)

    details["k1-flat-2"] = abs(directional(k1_at, frame[:, 1], step))
    details["k1-flat-3"] = abs(directional(k1_at, frame[:, 2], step))

    # nested second-order check: the e1-derivative of k1 stays flat sideways
    def e1_of_k1(qq: np.ndarray) -> float:
        sample = _frame_sample(m, qq, eps_reg)
        direction = sample.frame[:, 0]
        return float(
            (k1_at(qq + step * direction) - k1_at(qq - step * direction)) / (2.0 * step)
        )

    outer = nested_factor * step
    details["k1-flat-nested-2"] = abs(directional(e1_of_k1, frame[:, 1], outer))
    details["k1-flat-nested-3"] = abs(directional(e1_of_k1, frame[:, 2], outer))

    gap23 = abs(values[2] - values[1])
    if gap23 < tol_gap:
        skipped.extend(
            [
                "k2-transport (complement curvatures coincide)",
                "k3-transport (complement curvatures coincide)",
                "frame-twist (complement curvatures coincide)",
                "k3-cross (complement curvatures coincide)",
                "k2-cross (complement curvatures coincide)",
            ]
        )
    else:
        lam2, lam3 = float(values[1]), float(values[2])

        def complement_at(qq: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
            return _match_complement(base, _frame_sample(m, qq, eps_reg))

        dvals = np.empty((n, 2))
        cov_e2 = np.empty((n, n))
        for l in range(n):
            disp = step * frame[:, l]
            cols_p, vals_p = complement_at(q + disp)
            cols_m, vals_m = complement_at(q - disp)
            dvals[l] = (vals_p - vals_m) / (2.0 * step)
            diff = (cols_p[:, 0] - cols_m[:, 0]) / (2.0 * step)
            cov_e2[l] = diff + np.einsum("kab,a,b->k", gamma, frame[:, l], frame[:, 1])

        omega23 = np.array([float(cov_e2[l] @ g @ frame[:, 2]) for l in range(n)])
        coeff2 = (1.0 + mu * cos_t * lam2) / (mu * sin_t)
        coeff3 = (1.0 + mu * cos_t * lam3) / (mu * sin_t)
        details["k2-transport"] = abs(dvals[0, 0] - coeff2 * (k1 - lam2))
        details["k3-transport"] = abs(dvals[0, 1] - coeff3 * (k1 - lam3))
        details["frame-twist"] = abs(omega23[0] * (lam2 - lam3))
        details["k3-cross"] = abs(dvals[1, 1] - omega23[2] * (lam2 - lam3))
        details["k2-cross"] = abs(dvals[2, 0] - omega23[1] * (lam2 - lam3))

    r_codazzi_system = max(details.values()) if details else 0.0
    return StructuralResiduals(
        r_geodesic=r_geodesic,
        r_k1=float(r_k1),
        r_theta_flat=r_theta_flat,
        r_shape_coeff=r_shape_coeff,
        r_omega=r_omega,
        r_codazzi_system=r_codazzi_system,
        details=details,
        skipped=tuple(skipped),
    )


# -- grid classification ---------------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    """Inclusive uniform grid: counts[i] samples along domain axis i."""

    counts: tuple[int, ...]

    def __post_init__(self):
        if any(c < 1 for c in self.counts):
            raise ValueError("grid counts must be at least 1")

    def axes(self, domain: Sequence[Sequence[float]]) -> list[np.ndarray]:
        if len(self.counts) != len(domain):
            raise ValueError("grid rank does not match the domain")
        out = []
        for count, (lo, hi) in zip(self.counts, domain):
            if count == 1:
                out.append(np.array([(lo + hi) / 2.0]))
            else:
                out.append(np.linspace(lo, hi, count))
        return out

    def points(self, domain: Sequence[Sequence[float]]) -> np.ndarray:
        axes = self.axes(domain)
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds for classification flags."""

    tol_gcr: float = 1e-7
    tol_const_rel: float = 1e-6
    tol_gap: float = 1e-4
    eps_reg: float = EPS_REG
    eps_tan_rel: float = 1e-8
    step_rel: float = 1e-4

    def as_dict(self) -> dict:
        return {
            "tol_gcr": self.tol_gcr,
            "tol_const_rel": self.tol_const_rel,
            "tol_gap": self.tol_gap,
            "eps_reg": self.eps_reg,
            "eps_tan_rel": self.eps_tan_rel,
            "step_rel": self.step_rel,
        }


@dataclass
class PointRecord:
    point: tuple[float, ...]
    mu: float
    theta: float
    curvatures: tuple[float, ...]
    means: tuple[float, ...]
    distinct_count: int
    degenerate: bool
    gcr_primary: float | None
    gcr_secondary: float | None
    delta2: bool | None
    structural: StructuralResiduals | None = None
    structural_note: str | None = None


@dataclass
class SurfaceReport:
    name: str
    n: int
    grid: GridSpec
    tolerances: Tolerances
    records: list[PointRecord]
    skipped: list[tuple[tuple[float, ...], str]]
    is_gcr: bool
    is_isoparametric: bool
    is_cmc: bool
    is_3_minimal: bool | None
    is_delta2_ideal: bool | None
    distinct_curvature_count: int
    max_gcr_primary: float | None
    max_gcr_secondary: float | None
    fraction_degenerate: float
    structural_max: dict[str, float]


def _classify_point(
    m: Immersion, p: np.ndarray, tols: Tolerances, include_structural: bool, step: float
):
    try:
        pg = point_geometry(m, p, eps_reg=tols.eps_reg, check_domain=False)
        pd = principal_data(pg, tols.tol_gap)
        pa = position_angles(m, p, pg, eps_tan_rel=tols.eps_tan_rel)
    except SingularPointError as exc:
        return ("skip", tuple(p), f"singular metric (det g = {exc.det_g:.3e})")
    except (GeometryError, ExprError) as exc:
        return ("skip", tuple(p), f"evaluation failed: {exc}")
    ci = curvature_invariants(pd.curvatures)
    n = pg.n

    gcr_primary = gcr_secondary = None
    if not pa.degenerate:
        res = gcr_residual(pa, pd, pg)
        gcr_primary, gcr_secondary = res.primary, res.secondary

    delta2 = None
    if n >= 3:
        tol_d2 = tols.tol_const_rel * (1.0 + float(np.max(np.abs(pd.curvatures))))
        delta2 = delta2_ideal_test(pd.curvatures, tol_d2)

    structural = None
    note = None
    if include_structural:
        if pa.degenerate:
            note = "degenerate point: no tangential direction to adapt a frame to"
        elif gcr_primary is not None and gcr_primary >= tols.tol_gcr:
            note = "not position-principal here: structural identities not expected"
        else:
            try:
                structural = structural_residuals(
                    m, p, pg=pg, pd=pd, pa=pa, step=step,
                    tol_gap=tols.tol_gap, eps_reg=tols.eps_reg,
                )
            except (GeometryError, DegeneratePointError, ExprError) as exc:
                note = f"structural probe failed: {exc}"

    record = PointRecord(
        point=tuple(p),
        mu=pa.mu,
        theta=pa.theta,
        curvatures=tuple(float(k) for k in pd.curvatures),
        means=tuple(float(h) for h in ci.mean),
        distinct_count=pd.distinct_count,
        degenerate=pa.degenerate,
        gcr_primary=gcr_primary,
        gcr_secondary=gcr_secondary,
        delta2=delta2,
        structural=structural,
        structural_note=note,
    )
    return ("ok", record, None)


def classify_surface(
    m: Immersion,
    grid: GridSpec,
    tols: Tolerances = Tolerances(),
    include_structural: bool = False,
    workers: int | None = None,
) -> SurfaceReport:
    """Sweep a grid and aggregate per-point geometry into classification flags.

    Evaluation order never affects the result: points are keyed by grid
    index and merged deterministically, so any worker count produces an
    identical report.  Worker count defaults to the GCRKIT_THREADS
    environment variable (1 if unset).
    """
    points = grid.points(m.domain)
    if points.size == 0:
        raise EmptyReportError("empty grid")
    step = tols.step_rel * max(hi - lo for lo, hi in m.domain)

    if workers is None:
        workers = int(os.environ.get("GCRKIT_THREADS", "1") or "1")
    workers = max(1, workers)

    def job(p):
        return _classify_point(m, p, tols, include_structural, step)

    if workers == 1:
        outcomes = [job(p) for p in points]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(job, points))

    records: list[PointRecord] = []
    skipped: list[tuple[tuple[float, ...], str]] = []
    for outcome in outcomes:
        kind, payload, reason = outcome
        if kind == "ok":
            records.append(payload)
        else:
            skipped.append((payload, reason))

    if not records:
        first = skipped[0] if skipped else (tuple(points[0]), "no points")
        where = [float(v) for v in first[0]]
        raise EmptyReportError(
            f"no regular grid point: first failure at {where} ({first[1]})"
        )

    n = m.n
    nondeg = [r for r in records if not r.degenerate]
    primaries = [r.gcr_primary for r in nondeg]
    secondaries = [r.gcr_secondary for r in nondeg]
    is_gcr = bool(nondeg) and all(v < tols.tol_gcr for v in primaries)

    k_matrix = np.array([r.curvatures for r in records])
    h_matrix = np.array([r.means for r in records])

    def nearly_constant(column: np.ndarray) -> bool:
        tol = tols.tol_const_rel * (1.0 + abs(float(np.mean(column))))
        return float(np.ptp(column)) < tol

    is_isoparametric = all(nearly_constant(k_matrix[:, i]) for i in range(n))
    is_cmc = nearly_constant(h_matrix[:, 0])
    is_3_minimal = None
    is_delta2 = None
    if n >= 3:
        is_3_minimal = bool(np.max(np.abs(h_matrix[:, 2])) < tols.tol_gcr)
        is_delta2 = all(r.delta2 for r in records)

    counts = np.bincount([r.distinct_count for r in records])
    distinct_modal = int(np.argmax(counts))

    structural_max: dict[str, float] = {}
    for r in records:
        if r.structural is None:
            continue
        for key in (
            "r_geodesic",
            "r_k1",
            "r_theta_flat",
            "r_shape_coeff",
            "r_omega",
            "r_codazzi_system",
        ):
            value = getattr(r.structural, key)
            structural_max[key] = max(structural_max.get(key, 0.0), value)

    return SurfaceReport(
        name=m.name,
        n=n,
        grid=grid,
        tolerances=tols,
        records=records,
        skipped=skipped,
        is_gcr=is_gcr,
        is_isoparametric=is_isoparametric,
        is_cmc=is_cmc,
        is_3_minimal=is_3_minimal,
        is_delta2_ideal=is_delta2,
        distinct_curvature_count=distinct_modal,
        max_gcr_primary=max(primaries) if primaries else None,
        max_gcr_secondary=max(secondaries) if secondaries else None,
        fraction_degenerate=1.0 - len(nondeg) / len(records),
        structural_max=structural_max,
    )

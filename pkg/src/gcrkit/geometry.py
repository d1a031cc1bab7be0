"""Per-point differential geometry of parametrized hypersurfaces.

An :class:`Immersion` maps an n-dimensional chart (n = 2 or 3) into
Euclidean (n+1)-space.  Everything here is computed pointwise from exact
jet evaluations: first fundamental form, oriented unit normal, second
fundamental form, Christoffel symbols, shape operator, principal
curvatures/directions, mean-curvature ladder, and the residuals of the
Gauss and Codazzi equations (which hold for every immersion and therefore
double as an end-to-end self-test of the derivative pipeline).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from collections.abc import Callable, Sequence

import numpy as np

from .jet import Jet, jet_variable, sqrt as jsqrt
from .expr import Expr, ExprError, eval_expr, parse_expr

__all__ = [
    "EPS_REG",
    "GeometryError",
    "OutOfDomainError",
    "SingularPointError",
    "EvaluationError",
    "NearUmbilicError",
    "Immersion",
    "evaluate_jets",
    "cross_jets",
    "normal_jets",
    "PointGeometry",
    "point_geometry",
    "PrincipalData",
    "principal_data",
    "CurvatureInvariants",
    "curvature_invariants",
    "DerivativeBundle",
    "derivative_bundle",
    "codazzi_residual",
    "gauss_residual",
    "frame_connection_forms",
]

EPS_REG = 1e-10


class GeometryError(Exception):
    """Base class for geometry failures."""


class OutOfDomainError(GeometryError):
    def __init__(self, point, domain):
        where = [float(v) for v in point]
        super().__init__(f"point {where} outside domain box {domain}")
        self.point = tuple(where)


class SingularPointError(GeometryError):
    """The first fundamental form is numerically degenerate."""

    def __init__(self, point, det_g: float):
        super().__init__(
            f"metric is singular at {list(point)} (det g = {det_g:.3e})"
        )
        self.point = tuple(point)
        self.det_g = det_g


class EvaluationError(GeometryError):
    """A component expression failed to evaluate at a chart point."""

    def __init__(self, point, cause: Exception):
        super().__init__(f"component evaluation failed at {list(point)}: {cause}")
        self.point = tuple(point)


class NearUmbilicError(GeometryError):
    """Principal directions are too ill-conditioned for frame differencing."""


# -- immersion ---------------------------------------------------------------------


@dataclass(frozen=True)
class Immersion:
    """Parametrized hypersurface patch x: chart box -> E^(n+1).

    Components are either expression trees over the chart variables or an
    opaque jet-to-jet mapping (used by catalog families whose normals or
    frames have no closed form).  ``exact_order`` is the highest derivative
    order the component evaluation delivers exactly; order-3 requests above
    it are completed by differencing exact lower-order jets.
    """

    name: str
    var_names: tuple[str, ...]
    domain: tuple[tuple[float, float], ...]
    components: tuple[Expr, ...] | None = None
    mapping: Callable[[tuple[Jet, ...]], Sequence[Jet]] | None = None
    exact_order: int = 3

    def __post_init__(self):
        n = len(self.var_names)
        if n not in (2, 3):
            raise ValueError(f"chart dimension must be 2 or 3, got {n}")
        if len(self.domain) != n:
            raise ValueError("domain box must have one interval per chart variable")
        for lo, hi in self.domain:
            if not lo < hi:
                raise ValueError(f"empty domain interval [{lo}, {hi}]")
        if (self.components is None) == (self.mapping is None):
            raise ValueError("exactly one of components/mapping must be given")
        if self.components is not None and len(self.components) != n + 1:
            raise ValueError(
                f"need {n + 1} ambient components, got {len(self.components)}"
            )
        if self.exact_order not in (2, 3):
            raise ValueError("exact_order must be 2 or 3")

    @property
    def n(self) -> int:
        return len(self.var_names)

    @property
    def ambient_dim(self) -> int:
        return self.n + 1

    @classmethod
    def from_exprs(
        cls,
        name: str,
        components: Sequence[str | Expr],
        var_names: Sequence[str],
        domain: Sequence[Sequence[float]],
    ) -> "Immersion":
        names = tuple(var_names)
        parsed = tuple(
            parse_expr(c, names) if isinstance(c, str) else c for c in components
        )
        box = tuple((float(lo), float(hi)) for lo, hi in domain)
        return cls(name, names, box, components=parsed)

    @classmethod
    def from_mapping(
        cls,
        name: str,
        mapping: Callable[[tuple[Jet, ...]], Sequence[Jet]],
        var_names: Sequence[str],
        domain: Sequence[Sequence[float]],
        exact_order: int = 3,
    ) -> "Immersion":
        box = tuple((float(lo), float(hi)) for lo, hi in domain)
        return cls(
            name, tuple(var_names), box, mapping=mapping, exact_order=exact_order
        )

    def contains(self, p: Sequence[float], slack: float = 1e-12) -> bool:
        for value, (lo, hi) in zip(p, self.domain):
            pad = slack * max(1.0, abs(lo), abs(hi))
            if not lo - pad <= value <= hi + pad:
                return False
        return True


def _evaluate_at_order(m: Immersion, p: np.ndarray, order: int) -> list[Jet]:
    n = m.n
    seeds = tuple(jet_variable(i, p[i], n, order) for i in range(n))
    try:
        if m.components is not None:
            env = dict(zip(m.var_names, seeds))
            return [eval_expr(c, env) for c in m.components]
        return list(m.mapping(seeds))
    except (ExprError, ArithmeticError, ValueError) as exc:
        raise EvaluationError(p, exc) from exc


def _complete_third_order(m: Immersion, p: np.ndarray) -> list[Jet]:
    """Order-3 jets for an immersion whose components are exact to order 2.

    The third-derivative tensor is reconstructed by central-differencing the
    exact Hessians at six shifted points and symmetrizing; with steps near
    cbrt(eps) the slots are accurate to about 1e-10.
    """
    n = m.n
    base = _evaluate_at_order(m, p, 2)
    steps = np.cbrt(np.finfo(float).eps) * np.maximum(1.0, np.abs(p))
    dhess = np.zeros((m.ambient_dim, n, n, n))
    for axis in range(n):
        q = p.copy()
        q[axis] += steps[axis]
        plus = _evaluate_at_order(m, q, 2)
        q[axis] = p[axis] - steps[axis]
        minus = _evaluate_at_order(m, q, 2)
        for c in range(m.ambient_dim):
            dhess[c, axis] = (plus[c].hess - minus[c].hess) / (2.0 * steps[axis])
    out = []
    for c, jet2 in enumerate(base):
        d = dhess[c]
        third = (d + d.transpose(1, 0, 2) + d.transpose(2, 1, 0)) / 3.0
        out.append(Jet(n, 3, jet2.value, jet2.grad, jet2.hess, third))
    return out


def evaluate_jets(
    m: Immersion, p: Sequence[float], order: int = 3, check_domain: bool = True
) -> list[Jet]:
    """Jets of all ambient components of ``m`` at chart point ``p``."""
    if order not in (1, 2, 3):
        raise ValueError(f"evaluation order must be 1, 2 or 3, got {order}")
    q = np.asarray(p, dtype=float)
    if q.shape != (m.n,):
        raise ValueError(f"expected a chart point with {m.n} coordinates")
    if check_domain and not m.contains(q):
        raise OutOfDomainError(q, m.domain)
    if order <= m.exact_order:
        return _evaluate_at_order(m, q, order)
    return _complete_third_order(m, q)


# -- generalized cross product -------------------------------------------------------


def _cross_float(columns: np.ndarray) -> np.ndarray:
    """Vector orthogonal to the columns with <v, w> = det[columns | w]."""
    amb, n = columns.shape
    assert amb == n + 1
    v = np.empty(amb)
    rows = np.arange(amb)
    for a in range(amb):
        minor = columns[rows != a, :]
        v[a] = (-1.0) ** (a + n) * np.linalg.det(minor)
    return v


def _det2_jets(m) -> Jet:
    return m[0][0] * m[1][1] - m[0][1] * m[1][0]


def _det3_jets(m) -> Jet:
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )


def cross_jets(columns: list[list[Jet]]) -> list[Jet]:
    """Generalized cross product with Jet entries; columns[c] is one vector.

    The result v satisfies <v, w> = det[columns | w], so the frame
    (columns..., v) is always positively oriented.
    """
    n = len(columns)
    amb = n + 1
    det = _det2_jets if n == 2 else _det3_jets
    out = []
    for a in range(amb):
        minor = [[columns[c][r] for c in range(n)] for r in range(amb) if r != a]
        out.append(det(minor) * ((-1.0) ** (a + n)))
    return out


def normal_jets(jets: list[Jet]) -> list[Jet]:
    """Unit normal as jets, one order below the position jets."""
    n = jets[0].n
    tangents = [[x.partial(i) for x in jets] for i in range(n)]
    v = cross_jets(tangents)
    norm_sq = v[0] * v[0]
    for comp in v[1:]:
        norm_sq = norm_sq + comp * comp
    inv_norm = 1.0 / jsqrt(norm_sq)
    return [comp * inv_norm for comp in v]


# -- first/second order data ----------------------------------------------------------


@dataclass
class PointGeometry:
    """First- and second-order surface data at one chart point."""

    point: np.ndarray
    position: np.ndarray       # ambient position x
    jac: np.ndarray            # (n+1, n) tangent vectors x_i as columns
    second: np.ndarray         # (n+1, n, n) second partials of x
    metric: np.ndarray         # g_ij
    det_metric: float
    normal: np.ndarray         # oriented unit normal
    second_form: np.ndarray    # h_ij = <x_ij, N>
    christoffel: np.ndarray    # [l, i, j] -> Gamma^l_ij
    shape: np.ndarray          # S = g^{-1} h
    jets: list[Jet] = field(repr=False, default_factory=list)

    @property
    def n(self) -> int:
        return self.metric.shape[0]


def _assemble_point_geometry(
    m: Immersion, p: np.ndarray, jets: list[Jet], eps_reg: float
) -> PointGeometry:
    pos = np.array([j.value for j in jets])
    jac = np.stack([j.grad for j in jets])
    sec = np.stack([j.hess for j in jets])
    g = jac.T @ jac
    det_g = float(np.linalg.det(g))
    if not det_g > eps_reg:
        raise SingularPointError(p, det_g)
    normal = _cross_float(jac)
    normal = normal / np.linalg.norm(normal)
    h = np.einsum("cij,c->ij", sec, normal)
    h = 0.5 * (h + h.T)
    dg = np.einsum("cki,cj->kij", sec, jac)
    dg = dg + dg.transpose(0, 2, 1)
    ginv = np.linalg.inv(g)
    # A[m,i,j] = dg[i,m,j] + dg[j,m,i] - dg[m,i,j]
    a = np.einsum("imj->mij", dg) + np.einsum("jmi->mij", dg) - dg
    gamma = 0.5 * np.einsum("lm,mij->lij", ginv, a)
    shape = np.linalg.solve(g, h)
    return PointGeometry(
        point=p.copy(),
        position=pos,
        jac=jac,
        second=sec,
        metric=g,
        det_metric=det_g,
        normal=normal,
        second_form=h,
        christoffel=gamma,
        shape=shape,
        jets=jets,
    )


def point_geometry(
    m: Immersion,
    p: Sequence[float],
    eps_reg: float = EPS_REG,
    check_domain: bool = True,
) -> PointGeometry:
    """Fundamental forms, normal, Christoffel symbols and shape operator."""
    q = np.asarray(p, dtype=float)
    jets = evaluate_jets(m, q, order=2, check_domain=check_domain)
    return _assemble_point_geometry(m, q, jets, eps_reg)


# -- principal curvatures ---------------------------------------------------------------


def _cyclic_jacobi(a: np.ndarray, sweeps: int = 50) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a small symmetric matrix by cyclic Jacobi sweeps."""
    n = a.shape[0]
    a = a.copy()
    v = np.eye(n)
    scale = max(1.0, float(np.max(np.abs(a))))
    for _ in range(sweeps):
        off = math.sqrt(sum(a[p, q] ** 2 for p in range(n) for q in range(p + 1, n)))
        if off <= 1e-15 * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-18 * scale:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, tau) / (abs(tau) + math.hypot(1.0, tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                rot = np.eye(n)
                rot[p, p] = rot[q, q] = c
                rot[p, q] = s
                rot[q, p] = -s
                a = rot.T @ a @ rot
                v = v @ rot
    return np.diag(a).copy(), v


@dataclass
class PrincipalData:
    """Sorted principal curvatures with g-orthonormal direction columns."""

    curvatures: np.ndarray     # ascending
    directions: np.ndarray     # column i is the direction for curvatures[i]
    gaps: float                # smallest pairwise eigenvalue separation
    distinct_count: int

    @property
    def n(self) -> int:
        return self.curvatures.size


def _fix_direction_signs(directions: np.ndarray) -> np.ndarray:
    out = directions.copy()
    for i in range(out.shape[1]):
        col = out[:, i]
        lead = int(np.argmax(np.abs(col)))
        if col[lead] < 0:
            out[:, i] = -col
    return out


def principal_data(pg: PointGeometry, tol_gap: float = 1e-4) -> PrincipalData:
    """Solve h v = k g v via Cholesky reduction plus cyclic Jacobi."""
    try:
        chol = np.linalg.cholesky(pg.metric)
    except np.linalg.LinAlgError as exc:
        raise SingularPointError(pg.point, pg.det_metric) from exc
    li = np.linalg.inv(chol)
    a = li @ pg.second_form @ li.T
    a = 0.5 * (a + a.T)
    w, y = _cyclic_jacobi(a)
    order = np.argsort(w, kind="stable")
    w = w[order]
    vecs = np.linalg.solve(chol.T, y[:, order])
    vecs = _fix_direction_signs(vecs)
    n = w.size
    gaps = float(min(abs(w[i] - w[j]) for i in range(n) for j in range(i + 1, n)))
    distinct = 1 + int(np.sum(np.diff(w) > tol_gap))
    return PrincipalData(
        curvatures=w, directions=vecs, gaps=gaps, distinct_count=distinct
    )


@dataclass
class CurvatureInvariants:
    """Elementary symmetric functions s_k and normalized means H_k (1-based)."""

    sym: np.ndarray   # sym[k-1] = s_k
    mean: np.ndarray  # mean[k-1] = H_k = s_k / C(n, k)

    @property
    def gauss_kronecker(self) -> float:
        return float(self.mean[-1])


def curvature_invariants(curvatures: Sequence[float]) -> CurvatureInvariants:
    k = np.asarray(curvatures, dtype=float)
    n = k.size
    # Vieta: expanding prod (x + k_i) yields the elementary symmetric functions
    coeffs = np.array([1.0])
    for ki in k:
        coeffs = np.convolve(coeffs, np.array([1.0, ki]))
    sym = coeffs[1:]
    binom = np.array([math.comb(n, j) for j in range(1, n + 1)], dtype=float)
    return CurvatureInvariants(sym=sym, mean=sym / binom)


# -- third-order data and identity residuals ------------------------------------------------


@dataclass
class DerivativeBundle:
    """Everything needed for the Gauss/Codazzi identities at one point."""

    pg: PointGeometry
    third: np.ndarray          # (n+1, n, n, n) third partials of x
    dnormal: np.ndarray        # [i, c] -> d_i N_c
    dsecond_form: np.ndarray   # [i, j, k] -> d_i h_jk
    dchristoffel: np.ndarray   # [k, l, i, j] -> d_k Gamma^l_ij
    riemann: np.ndarray        # [i, j, k, l] -> <R(d_i, d_j) d_k, d_l>

    def sectional_curvature(self, u: np.ndarray, v: np.ndarray) -> float:
        g = self.pg.metric
        num = float(np.einsum("ijkl,i,j,k,l->", self.riemann, u, v, v, u))
        gu = u @ g @ u
        gv = v @ g @ v
        guv = u @ g @ v
        return num / (gu * gv - guv * guv)


def derivative_bundle(
    m: Immersion,
    p: Sequence[float],
    eps_reg: float = EPS_REG,
    check_domain: bool = True,
) -> DerivativeBundle:
    q = np.asarray(p, dtype=float)
    jets = evaluate_jets(m, q, order=3, check_domain=check_domain)
    pg = _assemble_point_geometry(m, q, jets, eps_reg)
    n = pg.n
    jac, sec = pg.jac, pg.second
    thr = np.stack([j.third for j in jets])
    g, ginv = pg.metric, np.linalg.inv(pg.metric)
    gamma = pg.christoffel

    njets = normal_jets(jets)
    normal = np.array([nj.value for nj in njets])
    if normal @ pg.normal < 0:  # defensive; construction fixes orientation
        normal = -normal
        dn = -np.stack([nj.grad for nj in njets], axis=1)
    else:
        dn = np.stack([nj.grad for nj in njets], axis=1)

    dh = np.einsum("cijk,c->ijk", thr, normal) + np.einsum("cjk,ic->ijk", sec, dn)

    dg = np.einsum("cki,cj->kij", sec, jac)
    dg = dg + dg.transpose(0, 2, 1)
    d2g = (
        np.einsum("ckli,cj->klij", thr, jac)
        + np.einsum("cli,ckj->klij", sec, sec)
        + np.einsum("cki,clj->klij", sec, sec)
        + np.einsum("ci,cklj->klij", jac, thr)
    )
    a = np.einsum("imj->mij", dg) + np.einsum("jmi->mij", dg) - dg
    da = (
        np.einsum("kimj->kmij", d2g)
        + np.einsum("kjmi->kmij", d2g)
        - d2g
    )
    dginv = -np.einsum("la,kab,bm->klm", ginv, dg, ginv)
    dgamma = 0.5 * (
        np.einsum("klm,mij->klij", dginv, a) + np.einsum("lm,kmij->klij", ginv, da)
    )

    rup = (
        np.einsum("iljk->ijkl", dgamma)
        - np.einsum("jlik->ijkl", dgamma)
        + np.einsum("mjk,lim->ijkl", gamma, gamma)
        - np.einsum("mik,ljm->ijkl", gamma, gamma)
    )
    riemann = np.einsum("ijkm,ml->ijkl", rup, g)

    return DerivativeBundle(
        pg=pg,
        third=thr,
        dnormal=dn,
        dsecond_form=dh,
        dchristoffel=dgamma,
        riemann=riemann,
    )


def codazzi_residual_from_bundle(
    bundle: DerivativeBundle, second_form: np.ndarray | None = None
) -> float:
    """Max norm of the antisymmetrized covariant derivative of h.

    ``second_form`` substitutes for the bundle's h array, which lets tests
    verify the residual reacts to a corrupted second fundamental form.
    """
    h = bundle.pg.second_form if second_form is None else second_form
    gamma = bundle.pg.christoffel
    dh = bundle.dsecond_form
    c = (
        dh
        - np.einsum("jik->ijk", dh)
        - np.einsum("mik,jm->ijk", gamma, h)
        + np.einsum("mjk,im->ijk", gamma, h)
    )
    return float(np.max(np.abs(c)))


def gauss_residual_from_bundle(bundle: DerivativeBundle) -> float:
    h = bundle.pg.second_form
    rhs = np.einsum("jk,il->ijkl", h, h) - np.einsum("ik,jl->ijkl", h, h)
    return float(np.max(np.abs(bundle.riemann - rhs)))


def codazzi_residual(m: Immersion, p: Sequence[float], **kwargs) -> float:
    """Residual of the Codazzi identity; near zero for any smooth immersion."""
    return codazzi_residual_from_bundle(derivative_bundle(m, p, **kwargs))


def gauss_residual(m: Immersion, p: Sequence[float], **kwargs) -> float:
    """Residual of the Gauss identity; near zero for any smooth immersion."""
    return gauss_residual_from_bundle(derivative_bundle(m, p, **kwargs))


# -- frame differencing ---------------------------------------------------------------


def default_step(m: Immersion) -> float:
    extent = max(hi - lo for lo, hi in m.domain)
    return 1e-4 * extent


def match_frames(
    g: np.ndarray, ref: np.ndarray, cand: np.ndarray, values: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Permute and sign-align candidate frame columns against a reference.

    Matching maximizes |<ref_i, cand_j>_g| greedily, which tracks smooth
    eigenvector fields across nearby points when eigenvalue gaps are open.
    """
    n = ref.shape[1]
    overlap = ref.T @ g @ cand
    taken: set[int] = set()
    perm = np.empty(n, dtype=int)
    for i in range(n):
        best, best_j = -1.0, -1
        for j in range(n):
            if j in taken:
                continue
            mag = abs(overlap[i, j])
            if mag > best:
                best, best_j = mag, j
        perm[i] = best_j
        taken.add(best_j)
    cols = cand[:, perm].copy()
    vals = values[perm].copy()
    for i in range(n):
        if overlap[i, perm[i]] < 0:
            cols[:, i] = -cols[:, i]
    return cols, vals


def frame_derivatives(
    m: Immersion,
    p: np.ndarray,
    pg: PointGeometry,
    frame: np.ndarray,
    values: np.ndarray,
    frame_at: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]],
    step: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Central differences of a frame field along its own directions.

    Returns ``omega[i, j, l]`` = <nabla_{e_l} e_i, e_j> (antisymmetrized in
    i, j) and ``dvalues[l, i]`` = directional derivative e_l(values_i).
    """
    n = pg.n
    g = pg.metric
    gamma = pg.christoffel
    domega = np.zeros((n, n, n))
    dvalues = np.zeros((n, n))
    for l in range(n):
        disp = step * frame[:, l]
        plus_frame, plus_vals = frame_at(p + disp)
        minus_frame, minus_vals = frame_at(p - disp)
        plus_frame, plus_vals = match_frames(g, frame, plus_frame, plus_vals)
        minus_frame, minus_vals = match_frames(g, frame, minus_frame, minus_vals)
        dframe = (plus_frame - minus_frame) / (2.0 * step)
        dvalues[l] = (plus_vals - minus_vals) / (2.0 * step)
        for i in range(n):
            cov = dframe[:, i] + np.einsum(
                "kab,a,b->k", gamma, frame[:, l], frame[:, i]
            )
            domega[i, :, l] = cov @ g @ frame
    omega = 0.5 * (domega - domega.transpose(1, 0, 2))
    return omega, dvalues


def frame_connection_forms(
    m: Immersion,
    p: Sequence[float],
    pd: PrincipalData | None = None,
    step: float | None = None,
    tol_gap: float = 1e-4,
    check_gaps: bool = True,
) -> np.ndarray:
    """Connection forms omega[i, j, l] = <nabla_{e_l} e_i, e_j> of the
    principal frame, estimated by sign-aligned central differencing.

    Requires open eigenvalue gaps; points closer than ``tol_gap`` to an
    umbilic raise :class:`NearUmbilicError` unless ``check_gaps`` is off.
    """
    q = np.asarray(p, dtype=float)
    pg = point_geometry(m, q, check_domain=False)
    if pd is None:
        pd = principal_data(pg, tol_gap)
    if check_gaps and pd.gaps < tol_gap:
        raise NearUmbilicError(
            f"eigenvalue gap {pd.gaps:.3e} below {tol_gap:.1e} at {q.tolist()}"
        )
    if step is None:
        step = default_step(m)

    def frame_at(qq: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        pgq = point_geometry(m, qq, check_domain=False)
        pdq = principal_data(pgq, tol_gap)
        return pdq.directions, pdq.curvatures

    omega, _ = frame_derivatives(
        m, q, pg, pd.directions, pd.curvatures, frame_at, step
    )
    return omega

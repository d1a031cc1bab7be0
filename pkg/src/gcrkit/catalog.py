"""Built-in hypersurface families and the curve machinery behind them.

Eight named families cover rotational cylinders, cones, doubly-rotational
surfaces, position-cone and curve-tube constructions, and generic products
with a line.  Profiles can be closed-form expressions or the output of a
unit-speed plane-curve integrator; frames with no closed form (the normal
frame of a spherical curve) are integrated once and then evaluated through
a C^2 piecewise-quintic Hermite interpolant, whose jets are exact.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from collections.abc import Callable, Sequence

import numpy as np

from . import jet
from .expr import (
    BinOp,
    Call,
    Const,
    Expr,
    ExprError,
    Var,
    eval_expr,
    eval_real,
    parse_expr,
    to_text,
    variables_of,
)
from .geometry import Immersion, cross_jets

__all__ = [
    "CatalogError",
    "PartialCurveError",
    "FAMILY_TAGS",
    "FamilySpec",
    "make_family",
    "family_catalog",
    "HermiteCurve",
    "ProfileCurve",
    "integrate_profile",
    "NormalFrame",
    "build_normal_frame",
    "hypercylinder_rotational",
    "conical_hypercylinder",
    "so2_x_so2",
    "rotational",
    "tangent_cone",
    "curve_tube",
    "special_sqrt2",
    "product_cylinder",
    "spherical_hypercylinder",
    "circular_hypercylinder",
    "hyperplane",
    "tangent_developable_cylinder",
]

_TWO_PI = 2.0 * math.pi


class CatalogError(ValueError):
    """Invalid family tag, parameter, or sub-object."""


class PartialCurveError(CatalogError):
    """Profile integration aborted mid-range; carries the last good abscissa."""

    def __init__(self, message: str, last_s: float):
        super().__init__(message)
        self.last_s = last_s


# -- piecewise-quintic Hermite interpolation -------------------------------------------

# Maps (p0, h*d0, h^2*q0, p1, h*d1, h^2*q1) to monomial coefficients in the
# normalized coordinate tau = (x - knot)/h; row k is the coefficient of tau^k.
_QUINTIC = np.array(
    [
        [1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.5, 0.0, 0.0, 0.0],
        [-10.0, -6.0, -1.5, 10.0, -4.0, 0.5],
        [15.0, 8.0, 1.5, -15.0, 7.0, -1.0],
        [-6.0, -3.0, -0.5, 6.0, -3.0, 0.5],
    ]
)


class HermiteCurve:
    """C^2 quintic Hermite interpolant of a sampled R^d curve.

    Built from values plus exact first and second derivatives at the knots;
    inside an interval the interpolant is a polynomial, so jet evaluation
    returns its derivatives exactly (the third derivative jumps by O(h^3)
    across knots).
    """

    def __init__(
        self,
        knots: np.ndarray,
        values: np.ndarray,
        deriv1: np.ndarray,
        deriv2: np.ndarray,
    ):
        knots = np.asarray(knots, dtype=float)
        values = np.atleast_2d(np.asarray(values, dtype=float).T).T
        if knots.ndim != 1 or knots.size < 2:
            raise ValueError("need at least two knots")
        if np.any(np.diff(knots) <= 0):
            raise ValueError("knots must be strictly increasing")
        deriv1 = np.asarray(deriv1, dtype=float).reshape(values.shape)
        deriv2 = np.asarray(deriv2, dtype=float).reshape(values.shape)
        if values.shape[0] != knots.size:
            raise ValueError("one sample row per knot required")
        self.knots = knots
        self.values = values
        h = np.diff(knots)[:, None]
        data = np.stack(
            [
                values[:-1],
                deriv1[:-1] * h,
                deriv2[:-1] * h * h,
                values[1:],
                deriv1[1:] * h,
                deriv2[1:] * h * h,
            ],
            axis=1,
        )
        # (intervals, power, dim)
        self._coeffs = np.einsum("pb,kbd->kpd", _QUINTIC, data)
        self._h = h[:, 0]

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    @property
    def span(self) -> tuple[float, float]:
        return float(self.knots[0]), float(self.knots[-1])

    def _locate(self, x: float) -> int:
        i = int(np.searchsorted(self.knots, x, side="right")) - 1
        return min(max(i, 0), self.knots.size - 2)

    def component(self, c: int, x):
        """Evaluate component c at x, which may be a float or a Jet."""
        xv = x.value if isinstance(x, jet.Jet) else float(x)
        i = self._locate(xv)
        tau = (x - self.knots[i]) * (1.0 / self._h[i])
        poly = self._coeffs[i, :, c]
        acc = poly[5]
        for k in (4, 3, 2, 1, 0):
            acc = acc * tau + poly[k]
        return acc

    def evaluate(self, x) -> list:
        return [self.component(c, x) for c in range(self.dim)]


# -- unit-speed profile curves ---------------------------------------------------------


@dataclass
class ProfileCurve:
    """Planar unit-speed curve (f, g) integrated from its curvature.

    Stores the sample arrays and a Hermite interpolant whose knot data
    (f' = cos(angle), g' = sin(angle), second derivatives from the curvature)
    comes straight from the generating ODE.
    """

    s: np.ndarray
    f: np.ndarray
    g: np.ndarray
    angle: np.ndarray
    kappa_text: str
    curve: HermiteCurve = field(repr=False)

    @property
    def span(self) -> tuple[float, float]:
        return float(self.s[0]), float(self.s[-1])

    def f_at(self, x):
        return self.curve.component(0, x)

    def g_at(self, x):
        return self.curve.component(1, x)

    def unit_speed_error(self) -> float:
        return float(np.max(np.abs(np.cos(self.angle) ** 2 + np.sin(self.angle) ** 2 - 1.0)))


def _kappa_callable(kappa) -> tuple[Callable[[float], float], str]:
    if isinstance(kappa, (int, float)):
        value = float(kappa)
        return (lambda s: value), repr(value)
    expr = parse_expr(kappa, ("s",)) if isinstance(kappa, str) else kappa
    extra = variables_of(expr) - {"s"}
    if extra:
        raise CatalogError(f"curvature must be a function of s only, found {sorted(extra)}")
    return (lambda s: eval_real(expr, {"s": s})), to_text(expr)


def integrate_profile(
    kappa,
    s_range: Sequence[float],
    init: Sequence[float] = (0.0, 0.0, 0.0),
    step: float = 1e-3,
) -> ProfileCurve:
    """Integrate angle' = kappa(s), f' = cos(angle), g' = sin(angle) with RK4.

    ``kappa`` is a number, an expression string in s, or a parsed expression.
    The classical fixed-step scheme keeps the global error at O(step^4).
    """
    lo, hi = float(s_range[0]), float(s_range[1])
    if not hi > lo:
        raise CatalogError(f"empty integration range [{lo}, {hi}]")
    if not step > 0:
        raise CatalogError("integration step must be positive")
    if len(init) != 3:
        raise CatalogError("init must be (f0, g0, angle0)")
    kfun, ktext = _kappa_callable(kappa)
    nsteps = max(1, math.ceil((hi - lo) / step))
    h = (hi - lo) / nsteps

    s_arr = lo + h * np.arange(nsteps + 1)
    f_arr = np.empty(nsteps + 1)
    g_arr = np.empty(nsteps + 1)
    a_arr = np.empty(nsteps + 1)
    k_arr = np.empty(nsteps + 1)
    f_arr[0], g_arr[0], a_arr[0] = (float(v) for v in init)

    def rhs(s: float, phi: float) -> np.ndarray:
        return np.array([math.cos(phi), math.sin(phi), kfun(s)])

    state = np.array([f_arr[0], g_arr[0], a_arr[0]])
    last_good = lo
    try:
        k_arr[0] = kfun(float(s_arr[0]))
        for i in range(nsteps):
            s0 = float(s_arr[i])
            k1 = rhs(s0, state[2])
            k2 = rhs(s0 + h / 2, state[2] + h / 2 * k1[2])
            k3 = rhs(s0 + h / 2, state[2] + h / 2 * k2[2])
            k4 = rhs(s0 + h, state[2] + h * k3[2])
            state = state + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            f_arr[i + 1], g_arr[i + 1], a_arr[i + 1] = state
            k_arr[i + 1] = kfun(float(s_arr[i + 1]))
            last_good = float(s_arr[i + 1])
    except (ExprError, ArithmeticError, ValueError) as exc:
        raise PartialCurveError(
            f"curvature evaluation failed during integration: {exc}; "
            f"curve is valid on [{lo}, {last_good}]",
            last_s=last_good,
        ) from exc

    cos_a, sin_a = np.cos(a_arr), np.sin(a_arr)
    values = np.column_stack([f_arr, g_arr])
    d1 = np.column_stack([cos_a, sin_a])
    d2 = np.column_stack([-sin_a * k_arr, cos_a * k_arr])
    curve = HermiteCurve(s_arr, values, d1, d2)
    return ProfileCurve(s=s_arr, f=f_arr, g=g_arr, angle=a_arr, kappa_text=ktext, curve=curve)


# -- orthonormal normal frames of spherical curves in E^4 ------------------------------


@dataclass
class NormalFrame:
    """Sampled orthonormal frame (A, B) of the normal space of a curve on the
    unit 3-sphere, with Hermite interpolants for exact-jet evaluation."""

    w: np.ndarray
    a: np.ndarray
    b: np.ndarray
    a_curve: HermiteCurve = field(repr=False)
    b_curve: HermiteCurve = field(repr=False)
    gram_error: float = 0.0


def _parse_curve_exprs(
    exprs, var_names: tuple[str, ...], count: int, what: str
) -> tuple[Expr, ...]:
    if len(exprs) != count:
        raise CatalogError(
            f"{what} needs {count} component expressions, got {len(exprs)}"
        )
    allowed = set(var_names)
    out = []
    for e in exprs:
        parsed = parse_expr(e, var_names) if isinstance(e, str) else e
        extra = variables_of(parsed) - allowed
        if extra:
            raise CatalogError(
                f"{what} must depend on {', '.join(var_names)} only, found {sorted(extra)}"
            )
        out.append(parsed)
    return tuple(out)


_SEED_PAIRS = ((2, 3), (1, 3), (1, 2), (0, 3), (0, 2), (0, 1))


def build_normal_frame(
    alpha: Sequence, w_range: Sequence[float], samples: int = 801
) -> NormalFrame:
    """Orthonormal (A, B) spanning the normal space of a spherical curve.

    The pair is seeded at the left endpoint by Gram-Schmidt of canonical
    basis vectors against span{alpha, alpha'} and continued by integrating
    the drift-minimizing transport A' = -(<A, alpha''>/|alpha'|^2) alpha'
    (RK4 predictor) with a projection/re-orthonormalization corrector, so
    the six orthogonality constraints hold to ~1e-12 at every sample.
    """
    alpha_exprs = _parse_curve_exprs(alpha, ("w",), 4, "spherical curve")
    lo, hi = float(w_range[0]), float(w_range[1])
    if not hi > lo:
        raise CatalogError(f"empty frame range [{lo}, {hi}]")
    if samples < 2:
        raise CatalogError("need at least two frame samples")

    def alpha_jets(w: float) -> list[jet.Jet]:
        env = {"w": jet.jet_variable(0, w, 1, 3)}
        return [eval_expr(e, env) for e in alpha_exprs]

    def alpha_data(w: float) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        js = alpha_jets(w)
        val = np.array([j.value for j in js])
        d1 = np.array([j.grad[0] for j in js])
        d2 = np.array([j.hess[0, 0] for j in js])
        d3 = np.array([j.third[0, 0, 0] for j in js])
        return val, d1, d2, d3

    w_arr = np.linspace(lo, hi, samples)
    h = w_arr[1] - w_arr[0]

    a0, d1_0, *_ = alpha_data(lo)
    if abs(a0 @ a0 - 1.0) > 1e-8:
        raise CatalogError("curve must lie on the unit 3-sphere")
    speed0 = np.linalg.norm(d1_0)
    if speed0 < 1e-8:
        raise CatalogError("curve is not regular at the left endpoint")

    t0 = d1_0 / speed0
    frame_a = frame_b = None
    for ia, ib in _SEED_PAIRS:
        cand = np.zeros(4)
        cand[ia] = 1.0
        cand = cand - (cand @ a0) * a0 - (cand @ t0) * t0
        na = np.linalg.norm(cand)
        if na < 0.1:
            continue
        cand_a = cand / na
        cand = np.zeros(4)
        cand[ib] = 1.0
        cand = cand - (cand @ a0) * a0 - (cand @ t0) * t0 - (cand @ cand_a) * cand_a
        nb = np.linalg.norm(cand)
        if nb < 0.1:
            continue
        frame_a, frame_b = cand_a, cand / nb
        break
    if frame_a is None:  # pragma: no cover - impossible in E^4
        raise CatalogError("could not seed the normal frame")

    def transport_rhs(vecs: np.ndarray, d1: np.ndarray, d2: np.ndarray) -> np.ndarray:
        speed_sq = d1 @ d1
        lam = -(vecs @ d2) / speed_sq
        return lam[:, None] * d1[None, :]

    a_rows = np.empty((samples, 4))
    b_rows = np.empty((samples, 4))
    a_d1 = np.empty((samples, 4))
    b_d1 = np.empty((samples, 4))
    a_d2 = np.empty((samples, 4))
    b_d2 = np.empty((samples, 4))
    gram_error = 0.0

    node = alpha_data(lo)
    pair = np.stack([frame_a, frame_b])
    for i, wv in enumerate(w_arr):
        val, d1, d2, d3 = node
        speed_sq = d1 @ d1
        that = d1 / math.sqrt(speed_sq)
        # corrector: project onto the normal space and re-orthonormalize
        pair = pair - np.outer(pair @ val, val) - np.outer(pair @ that, that)
        pair[0] /= np.linalg.norm(pair[0])
        pair[1] -= (pair[1] @ pair[0]) * pair[0]
        pair[1] /= np.linalg.norm(pair[1])

        basis = np.vstack([val, that, pair])
        gram_error = max(gram_error, float(np.max(np.abs(basis @ basis.T - np.eye(4)))))

        a_rows[i], b_rows[i] = pair
        deriv = transport_rhs(pair, d1, d2)
        a_d1[i], b_d1[i] = deriv
        # second derivative from differentiating the transport rule
        lam = -(pair @ d2) / speed_sq
        dlam = (
            -(deriv @ d2) / speed_sq
            - (pair @ d3) / speed_sq
            + 2.0 * (pair @ d2) * (d1 @ d2) / speed_sq**2
        )
        second = dlam[:, None] * d1[None, :] + lam[:, None] * d2[None, :]
        a_d2[i], b_d2[i] = second

        if i == samples - 1:
            break
        mid = alpha_data(wv + h / 2)
        nxt = alpha_data(wv + h)
        k1 = transport_rhs(pair, d1, d2)
        k2 = transport_rhs(pair + (h / 2) * k1, mid[1], mid[2])
        k3 = transport_rhs(pair + (h / 2) * k2, mid[1], mid[2])
        k4 = transport_rhs(pair + h * k3, nxt[1], nxt[2])
        pair = pair + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        node = nxt
        if abs(nxt[0] @ nxt[0] - 1.0) > 1e-8:
            raise CatalogError(f"curve leaves the unit 3-sphere near w = {wv + h:.6g}")
        if nxt[1] @ nxt[1] < 1e-16:
            raise CatalogError(f"curve is not regular near w = {wv + h:.6g}")

    a_curve = HermiteCurve(w_arr, a_rows, a_d1, a_d2)
    b_curve = HermiteCurve(w_arr, b_rows, b_d1, b_d2)
    return NormalFrame(
        w=w_arr, a=a_rows, b=b_rows, a_curve=a_curve, b_curve=b_curve, gram_error=gram_error
    )


# -- small AST builders ----------------------------------------------------------------


def _mul(a: Expr, b: Expr) -> Expr:
    return BinOp("*", a, b)


def _fn(name: str, arg: Expr) -> Expr:
    return Call(name, arg)


def _parse_profile(f, g) -> tuple[Expr, Expr]:
    fe = parse_expr(f, ("s",)) if isinstance(f, str) else f
    ge = parse_expr(g, ("s",)) if isinstance(g, str) else g
    for label, e in (("f", fe), ("g", ge)):
        extra = variables_of(e) - {"s"}
        if extra:
            raise CatalogError(
                f"profile component {label} must depend on s only, found {sorted(extra)}"
            )
    return fe, ge


def _box(domain, defaults) -> tuple[tuple[float, float], ...]:
    if domain is None:
        return tuple(defaults)
    if len(domain) != len(defaults):
        raise CatalogError(f"domain needs {len(defaults)} intervals")
    return tuple((float(lo), float(hi)) for lo, hi in domain)


def _padded(interval: tuple[float, float], rel: float = 0.06) -> tuple[float, float]:
    lo, hi = interval
    pad = max(rel * (hi - lo), 1e-3)
    return lo - pad, hi + pad


# -- family builders -------------------------------------------------------------------


def hypercylinder_rotational(
    f="2+cos(s)", g="sin(s)", profile: ProfileCurve | None = None, domain=None
) -> Immersion:
    """(f(s) cos t, f(s) sin t, g(s), u): cylinder over a rotational surface."""
    box = _box(domain, ((0.0, _TWO_PI), (0.0, _TWO_PI), (-1.0, 1.0)))
    name = "hypercylinder_rotational"
    if profile is not None:
        def mapping(seeds):
            s, t, u = seeds
            fs, gs = profile.f_at(s), profile.g_at(s)
            return [fs * jet.cos(t), fs * jet.sin(t), gs, u]

        return Immersion.from_mapping(name, mapping, ("s", "t", "u"), box)
    fe, ge = _parse_profile(f, g)
    comps = (
        _mul(fe, _fn("cos", Var("t"))),
        _mul(fe, _fn("sin", Var("t"))),
        ge,
        Var("u"),
    )
    return Immersion.from_exprs(name, comps, ("s", "t", "u"), box)


def conical_hypercylinder(c1=0.6, c2=0.8, domain=None) -> Immersion:
    """((c1 s + c2) cos t, (c1 s + c2) sin t, c2 s, u): cylinder over a cone."""
    c1, c2 = float(c1), float(c2)
    if c1 == 0.0 and c2 == 0.0:
        raise CatalogError("c1 and c2 cannot both vanish")
    box = _box(domain, ((0.5, 2.5), (0.0, _TWO_PI), (-1.0, 1.0)))
    radius = f"({c1!r}*s+{c2!r})"
    comps = (f"{radius}*cos(t)", f"{radius}*sin(t)", f"{c2!r}*s", "u")
    return Immersion.from_exprs("conical_hypercylinder", comps, ("s", "t", "u"), box)


def so2_x_so2(
    f="2+cos(s)", g="sin(s)", profile: ProfileCurve | None = None, domain=None
) -> Immersion:
    """(f(s) cos t, f(s) sin t, g(s) cos u, g(s) sin u): doubly rotational."""
    box = _box(domain, ((0.3, 2.8), (0.0, _TWO_PI), (0.0, _TWO_PI)))
    name = "so2_x_so2"
    if profile is not None:
        def mapping(seeds):
            s, t, u = seeds
            fs, gs = profile.f_at(s), profile.g_at(s)
            return [fs * jet.cos(t), fs * jet.sin(t), gs * jet.cos(u), gs * jet.sin(u)]

        return Immersion.from_mapping(name, mapping, ("s", "t", "u"), box)
    fe, ge = _parse_profile(f, g)
    comps = (
        _mul(fe, _fn("cos", Var("t"))),
        _mul(fe, _fn("sin", Var("t"))),
        _mul(ge, _fn("cos", Var("u"))),
        _mul(ge, _fn("sin", Var("u"))),
    )
    return Immersion.from_exprs(name, comps, ("s", "t", "u"), box)


def rotational(
    f="sin(s)", g="cos(s)", profile: ProfileCurve | None = None, domain=None
) -> Immersion:
    """(f(s), g(s) cos t, g(s) sin t sin u, g(s) sin t cos u): rotational."""
    box = _box(domain, ((-0.7, 0.7), (0.35, 2.79), (0.0, _TWO_PI)))
    name = "rotational"
    if profile is not None:
        def mapping(seeds):
            s, t, u = seeds
            fs, gs = profile.f_at(s), profile.g_at(s)
            sin_t = jet.sin(t)
            return [
                fs,
                gs * jet.cos(t),
                gs * sin_t * jet.sin(u),
                gs * sin_t * jet.cos(u),
            ]

        return Immersion.from_mapping(name, mapping, ("s", "t", "u"), box)
    fe, ge = _parse_profile(f, g)
    comps = (
        fe,
        _mul(ge, _fn("cos", Var("t"))),
        _mul(_mul(ge, _fn("sin", Var("t"))), _fn("sin", Var("u"))),
        _mul(_mul(ge, _fn("sin", Var("t"))), _fn("cos", Var("u"))),
    )
    return Immersion.from_exprs(name, comps, ("s", "t", "u"), box)


_DEFAULT_CONE_BASE = (
    "cos(v)*cos(w)",
    "cos(v)*sin(w)",
    "sin(v)*cos(w)",
    "sin(v)*sin(w)",
)


def tangent_cone(c=0.25, y: Sequence | None = None, domain=None) -> Immersion:
    """s y(v,w) + c n(v,w): cone over a surface of the unit 3-sphere, offset
    along its spherical normal n (sign fixed so {y, y_v, y_w, n} is positive).
    """
    c = float(c)
    y_exprs = _parse_curve_exprs(
        y if y is not None else _DEFAULT_CONE_BASE, ("v", "w"), 4, "base surface"
    )
    box = _box(domain, ((0.75, 2.25), (0.0, _TWO_PI), (0.0, _TWO_PI)))
    _validate_unit_sphere(y_exprs, ("v", "w"), box[1:], what="base surface")

    def mapping(seeds):
        s, v, w = seeds
        order = s.order
        # the spherical normal consumes one derivative order, so the base
        # surface is re-seeded one order higher to keep the output exact
        env = {
            "v": jet.jet_variable(1, v.value, 3, order + 1),
            "w": jet.jet_variable(2, w.value, 3, order + 1),
        }
        y_hi = [eval_expr(e, env) for e in y_exprs]
        y_lo = [comp.truncated(order) for comp in y_hi]
        y_v = [comp.partial(1) for comp in y_hi]
        y_w = [comp.partial(2) for comp in y_hi]
        raw = cross_jets([y_lo, y_v, y_w])
        norm_sq = raw[0] * raw[0]
        for comp in raw[1:]:
            norm_sq = norm_sq + comp * comp
        inv_norm = 1.0 / jet.sqrt(norm_sq)
        return [s * y_lo[k] + c * (raw[k] * inv_norm) for k in range(4)]

    return Immersion.from_mapping(
        "tangent_cone", mapping, ("s", "v", "w"), box, exact_order=2
    )


_DEFAULT_TUBE_CURVE = ("cos(w)", "sin(w)", "0", "0")


def curve_tube(
    c=0.5, alpha: Sequence | None = None, domain=None, samples: int = 801
) -> Immersion:
    """s a(w) + c (cos(v/c) A(w) + sin(v/c) B(w)) for a curve a on the unit
    3-sphere with normal frame (A, B); c must be positive."""
    c = float(c)
    if not c > 0:
        raise CatalogError("curve_tube requires c > 0")
    alpha_exprs = _parse_curve_exprs(
        alpha if alpha is not None else _DEFAULT_TUBE_CURVE, ("w",), 4, "spherical curve"
    )
    box = _box(domain, ((0.5, 2.0), (0.0, math.pi), (0.0, _TWO_PI)))
    frame = build_normal_frame(alpha_exprs, _padded(box[2]), samples=samples)

    def mapping(seeds):
        s, v, w = seeds
        env = {"w": w}
        a_of_w = [eval_expr(e, env) for e in alpha_exprs]
        frame_a = frame.a_curve.evaluate(w)
        frame_b = frame.b_curve.evaluate(w)
        phase = v * (1.0 / c)
        cos_p, sin_p = jet.cos(phase), jet.sin(phase)
        return [
            s * a_of_w[k] + c * (cos_p * frame_a[k] + sin_p * frame_b[k])
            for k in range(4)
        ]

    return Immersion.from_mapping("curve_tube", mapping, ("s", "v", "w"), box)


def special_sqrt2(domain=None) -> Immersion:
    """(sqrt(2) s cos t, sqrt(2) s sin t, sqrt(2) s cos u, sqrt(2) s sin u)."""
    box = _box(domain, ((0.5, 2.5), (0.0, _TWO_PI), (0.0, _TWO_PI)))
    comps = (
        "sqrt(2)*s*cos(t)",
        "sqrt(2)*s*sin(t)",
        "sqrt(2)*s*cos(u)",
        "sqrt(2)*s*sin(u)",
    )
    return Immersion.from_exprs("special_sqrt2", comps, ("s", "t", "u"), box)


_DEFAULT_PRODUCT_BASE = (
    "(2+cos(s))*cos(t)",
    "(2+cos(s))*sin(t)",
    "sin(s)",
)


def product_cylinder(base: Sequence | None = None, domain=None) -> Immersion:
    """(b1(s,t), b2(s,t), b3(s,t), u): product of a surface in E^3 with a line."""
    base_exprs = _parse_curve_exprs(
        base if base is not None else _DEFAULT_PRODUCT_BASE, ("s", "t"), 3, "base surface"
    )
    box = _box(domain, ((0.0, _TWO_PI), (0.0, _TWO_PI), (-1.0, 1.0)))
    comps = base_exprs + (Var("u"),)
    return Immersion.from_exprs("product_cylinder", comps, ("s", "t", "u"), box)


def _validate_unit_sphere(exprs, var_names, box, what: str, samples: int = 7) -> None:
    grids = [np.linspace(lo, hi, samples) for lo, hi in box]
    for point in itertools.product(*grids):
        env = dict(zip(var_names, point))
        norm_sq = sum(eval_real(e, env) ** 2 for e in exprs)
        if abs(norm_sq - 1.0) > 1e-8:
            raise CatalogError(f"{what} must lie on the unit 3-sphere")


# -- convenience constructors (not separate catalog tags) ------------------------------


def spherical_hypercylinder(r=1.0, domain=None) -> Immersion:
    """Sphere of radius r times a line, as a rotational-cylinder instance."""
    r = float(r)
    if not r > 0:
        raise CatalogError("radius must be positive")
    box = ((-1.1 * r, 1.1 * r), (0.0, _TWO_PI), (-1.0, 1.0)) if domain is None else domain
    return hypercylinder_rotational(
        f=f"{r!r}*cos(s/{r!r})", g=f"{r!r}*sin(s/{r!r})", domain=box
    )


def circular_hypercylinder(r=1.0, domain=None) -> Immersion:
    """Circle of radius r times a plane, as a rotational-cylinder instance."""
    r = float(r)
    if not r > 0:
        raise CatalogError("radius must be positive")
    box = ((-1.5, 1.5), (0.0, _TWO_PI), (-1.0, 1.0)) if domain is None else domain
    return hypercylinder_rotational(f=f"{r!r}", g="s", domain=box)


def hyperplane(offset=1.0, domain=None) -> Immersion:
    """Flat hyperplane (s, t, u, offset)."""
    box = ((0.5, 2.0), (0.5, 2.0), (0.5, 2.0)) if domain is None else domain
    return Immersion.from_exprs(
        "hyperplane", ("s", "t", "u", repr(float(offset))), ("s", "t", "u"), box
    )


def tangent_developable_cylinder(r=1.0, a=0.8, domain=None) -> Immersion:
    """Cylinder over the tangent developable of the curve rho(s) u(phi(s)),
    where u traces a circle of radius a at fixed height on the unit sphere,
    rho = sqrt(s^2 + r^2) and phi = arctan(s/r).

    The generating curve satisfies <curve, curve''> = 0, which makes the
    developable (and hence this product) position-principal at every regular
    point.  Not expressible in the spec-file language (needs arctan).
    """
    r, a = float(r), float(a)
    if not r > 0 or not 0 < a < 1:
        raise CatalogError("need r > 0 and 0 < a < 1")
    height = math.sqrt(1.0 - a * a)
    box = _box(domain, ((-1.0, 1.0), (0.2, 1.2), (-1.0, 1.0)))

    def mapping(seeds):
        s, t, u = seeds
        rho = jet.sqrt(s * s + r * r)
        inv_rho = 1.0 / rho
        ang = jet.atan(s * (1.0 / r)) * (1.0 / a)
        cos_a, sin_a = jet.cos(ang), jet.sin(ang)
        circle = (cos_a * a, sin_a * a)
        circle_d = (-sin_a, cos_a)
        radial = s * inv_rho
        swirl = r * inv_rho
        gamma = (rho * circle[0], rho * circle[1], rho * height)
        gamma_d = (
            radial * circle[0] + swirl * circle_d[0],
            radial * circle[1] + swirl * circle_d[1],
            radial * height,
        )
        return [
            gamma[0] + t * gamma_d[0],
            gamma[1] + t * gamma_d[1],
            gamma[2] + t * gamma_d[2],
            u,
        ]

    return Immersion.from_mapping(
        "tangent_developable_cylinder", mapping, ("s", "t", "u"), box
    )


# -- registry --------------------------------------------------------------------------


@dataclass(frozen=True)
class FamilySpec:
    """A catalog tag plus its construction parameters."""

    tag: str
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class _FamilyInfo:
    builder: Callable[..., Immersion]
    description: str
    variables: tuple[str, ...]
    params_doc: dict


_FAMILIES: dict[str, _FamilyInfo] = {
    "hypercylinder_rotational": _FamilyInfo(
        hypercylinder_rotational,
        "(f(s) cos t, f(s) sin t, g(s), u) - cylinder over a rotational surface",
        ("s", "t", "u"),
        {
            "f": "radius profile, expression in s (default '2+cos(s)')",
            "g": "height profile, expression in s (default 'sin(s)')",
            "kappa": "optional profile curvature; replaces f, g via ODE integration",
            "init": "profile initial data (f0, g0, angle0) when kappa is given",
            "step": "profile integration step when kappa is given",
        },
    ),
    "conical_hypercylinder": _FamilyInfo(
        conical_hypercylinder,
        "((c1 s + c2) cos t, (c1 s + c2) sin t, c2 s, u) - cylinder over a cone",
        ("s", "t", "u"),
        {"c1": "slope of the line profile (default 0.6)", "c2": "offset (default 0.8)"},
    ),
    "so2_x_so2": _FamilyInfo(
        so2_x_so2,
        "(f(s) cos t, f(s) sin t, g(s) cos u, g(s) sin u) - doubly rotational",
        ("s", "t", "u"),
        {
            "f": "first radius profile, expression in s (default '2+cos(s)')",
            "g": "second radius profile, expression in s (default 'sin(s)')",
            "kappa": "optional profile curvature; replaces f, g via ODE integration",
            "init": "profile initial data (f0, g0, angle0) when kappa is given",
            "step": "profile integration step when kappa is given",
        },
    ),
    "rotational": _FamilyInfo(
        rotational,
        "(f(s), g(s) cos t, g(s) sin t sin u, g(s) sin t cos u) - rotational",
        ("s", "t", "u"),
        {
            "f": "axis profile, expression in s (default 'sin(s)')",
            "g": "radius profile, expression in s (default 'cos(s)')",
            "kappa": "optional profile curvature; replaces f, g via ODE integration",
            "init": "profile initial data (f0, g0, angle0) when kappa is given",
            "step": "profile integration step when kappa is given",
        },
    ),
    "tangent_cone": _FamilyInfo(
        tangent_cone,
        "s y(v,w) + c n(v,w) - cone over a unit-sphere surface, normal offset c",
        ("s", "v", "w"),
        {
            "c": "normal offset (default 0.25; 0 gives the plain cone)",
            "y": "four expressions in v, w for the base surface (default torus patch)",
        },
    ),
    "curve_tube": _FamilyInfo(
        curve_tube,
        "s a(w) + c (cos(v/c) A(w) + sin(v/c) B(w)) - tube over a spherical curve",
        ("s", "v", "w"),
        {
            "c": "tube constant, must be > 0 (default 0.5)",
            "alpha": "four expressions in w for the curve (default great circle)",
            "samples": "frame integration samples (default 801)",
        },
    ),
    "special_sqrt2": _FamilyInfo(
        special_sqrt2,
        "(sqrt(2) s cos t, sqrt(2) s sin t, sqrt(2) s cos u, sqrt(2) s sin u)",
        ("s", "t", "u"),
        {},
    ),
    "product_cylinder": _FamilyInfo(
        product_cylinder,
        "(b1(s,t), b2(s,t), b3(s,t), u) - product of a surface in E^3 with a line",
        ("s", "t", "u"),
        {"base": "three expressions in s, t for the base surface (default torus)"},
    ),
}

FAMILY_TAGS: tuple[str, ...] = tuple(_FAMILIES)

_PROFILE_FAMILIES = {"hypercylinder_rotational", "so2_x_so2", "rotational"}


def make_family(spec, /, **params) -> Immersion:
    """Construct a catalog family from a tag or a FamilySpec."""
    if isinstance(spec, FamilySpec):
        if params:
            raise CatalogError("pass parameters inside the FamilySpec")
        tag, params = spec.tag, dict(spec.params)
    else:
        tag = str(spec)
    info = _FAMILIES.get(tag)
    if info is None:
        raise CatalogError(f"unknown family {tag!r}; valid tags: {', '.join(FAMILY_TAGS)}")
    if tag in _PROFILE_FAMILIES and "kappa" in params:
        params = dict(params)
        if "f" in params or "g" in params:
            raise CatalogError("give either f/g expressions or kappa, not both")
        kappa = params.pop("kappa")
        init = params.pop("init", (0.0, 0.0, 0.0))
        step = params.pop("step", 1e-3)
        domain = params.get("domain")
        if domain is None:
            raise CatalogError("profile integration needs an explicit domain")
        params["profile"] = integrate_profile(kappa, _padded(tuple(domain[0])), init, step)
    try:
        return info.builder(**params)
    except TypeError as exc:
        raise CatalogError(f"bad parameters for family {tag!r}: {exc}") from None


def family_catalog() -> list[dict]:
    """Machine-readable listing of every family tag."""
    out = []
    for tag, info in _FAMILIES.items():
        out.append(
            {
                "tag": tag,
                "description": info.description,
                "variables": list(info.variables),
                "parameters": dict(info.params_doc),
            }
        )
    return out

"""Deterministic quadrature drivers for measures stored by parts.

Every integral against a UnitMeasure splits structurally: atoms are summed
directly, each density term is integrated by the scheme its envelope metadata
names, and singular-continuous parts are integrated by midpoint sums over IFS
cylinder sets.  Matrix-valued and scalar integrands share one driver (node
functions return stacks of shape (k, d, d) or vectors of shape (k,)), so a
1x1 matrix integral and the scalar integral agree bitwise; matrix refinement
is driven by the trace, which reduces to the value itself for scalars.

Node functions receive both coordinates (t, 1 - t) per node.  The pair comes
from each rule directly (Jacobi nodes give (1+x)/2 and (1-x)/2 from the same
abscissa, logistic nodes give sigma(u) and sigma(-u)), which keeps the
complement accurate near the endpoints where forming 1 - t would lose digits.

Reductions are fixed-order numpy pairwise sums over a fixed node ordering, so
results are bit-stable regardless of thread counts in the surrounding code.

Schemes (QuadratureSpec.scheme, None routes by each term's hint)
----------------------------------------------------------------
gauss_jacobi          : node-doubling Gauss-Jacobi with the term's endpoint
                        exponents; pass ("gauss_jacobi", p, q) to force
                        explicit exponents.
logistic_substitution : rule for the Cauchy kernel in u = log(t/(1-t)):
                        Gauss-Legendre in theta after u = pi*tan(theta),
                        truncated at U(n) with the exact tail mass attached
                        to endpoint nodes (so the rule's mass is exact at
                        every n and the truncation shows up only through the
                        variation of h across the tail, which the doubling
                        test controls).
gauss_legendre        : bisected 8/16-point panels for smooth densities,
                        depth-limited at 12.
tanh_sinh             : fallback for densities without an envelope; nodes
                        kept strictly inside (0, 1) at the representable
                        limit.
("ifs_recursion", N)  : pins the cylinder depth for singular parts; without
                        it the depth comes from abs_tol and the contraction
                        ratio, capped at 24, under a hard 2**24 atom budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi

from .errors import IfsBudgetError, QuadratureError

__all__ = [
    "QuadratureSpec",
    "IntegrationReport",
    "DEFAULT_SPEC",
    "jacobi_rule",
    "legendre_rule",
    "logistic_rule",
    "tanh_sinh_rule",
    "ifs_nodes",
    "integrate_measure",
    "integrate_scalar",
    "integrate_matrix",
    "integrate_scalar_report",
    "integrate_matrix_report",
    "integrate_ifs",
    "node_table",
    "density_mass",
    "integrate_halfline_density",
    "halfline_mass",
]

IFS_ATOM_BUDGET = 2**24
IFS_DEPTH_CAP = 24

_SCHEME_NAMES = (
    "gauss_legendre",
    "gauss_jacobi",
    "logistic_substitution",
    "tanh_sinh",
    "ifs_recursion",
)


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and scheme controls shared by all drivers.

    scheme: None (route per term hint), a scheme name, or a parameterized
    tuple ("gauss_jacobi", p, q) / ("ifs_recursion", depth).
    """

    abs_tol: float = 1e-10
    rel_tol: float = 1e-9
    max_nodes: int = 4096
    scheme: object = None

    def __post_init__(self):
        if self.abs_tol <= 0.0 or self.rel_tol <= 0.0:
            raise ValueError("tolerances must be positive")
        if self.max_nodes < 2:
            raise ValueError("max_nodes must be at least 2")
        name, params = self.scheme_name, self.scheme_params
        if name is not None and name not in _SCHEME_NAMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if name == "gauss_jacobi" and params:
            p, q = params
            if p <= -1.0 or q <= -1.0:
                raise ValueError("jacobi exponents must exceed -1")
        if name == "ifs_recursion":
            if not params or int(params[0]) < 1:
                raise ValueError("ifs_recursion needs depth >= 1")

    @property
    def scheme_name(self):
        if self.scheme is None or isinstance(self.scheme, str):
            return self.scheme
        return self.scheme[0]

    @property
    def scheme_params(self) -> tuple:
        if self.scheme is None or isinstance(self.scheme, str):
            return ()
        return tuple(self.scheme[1:])

    @property
    def ifs_depth(self) -> int | None:
        if self.scheme_name == "ifs_recursion":
            return int(self.scheme_params[0])
        return None

    def with_scheme(self, scheme) -> "QuadratureSpec":
        return replace(self, scheme=scheme)


DEFAULT_SPEC = QuadratureSpec()

_CHUNK = 65536


@dataclass(frozen=True)
class IntegrationReport:
    """Value plus accounting: total nodes, summed error estimates, per-part rows."""

    value: np.ndarray | float
    nodes_used: int
    error_estimate: float
    parts: tuple[tuple[str, int, float], ...]


def _freeze(*arrays):
    out = []
    for a in arrays:
        a = np.ascontiguousarray(a, dtype=float)
        a.flags.writeable = False
        out.append(a)
    return tuple(out)


# ---------------------------------------------------------------------------
# node rules


@lru_cache(maxsize=None)
def legendre_rule(n: int):
    """Gauss-Legendre abscissas and weights on [-1, 1] (read-only arrays)."""
    x, w = np.polynomial.legendre.leggauss(n)
    return _freeze(x, w)


@lru_cache(maxsize=None)
def jacobi_rule(p: float, q: float, n: int):
    """Nodes (t, 1-t) and weights for ``int_0^1 t**p (1-t)**q phi(t) dt``.

    Both coordinates come from the same [-1, 1] abscissa, so the pair stays
    accurate at either endpoint.  scipy's Jacobi solver can emit a benign
    invalid-divide warning for some (p, q); the roots are unaffected.
    """
    if p <= -1.0 or q <= -1.0:
        raise ValueError("jacobi exponents must exceed -1")
    with np.errstate(invalid="ignore", divide="ignore"):
        x, w = roots_jacobi(n, q, p)
    t = 0.5 * (1.0 + x)
    tc = 0.5 * (1.0 - x)
    return _freeze(t, tc, w * 2.0 ** (-p - q - 1.0))


def _logistic_umax(n: int) -> float:
    return min(60.0, max(12.0, 0.15 * n))


@lru_cache(maxsize=None)
def logistic_rule(n: int):
    """Rule for the Cauchy-kernel density 1/(t(1-t)(pi^2 + log^2(t/(1-t)))).

    In u = log(t/(1-t)) the integral carries weight du/(pi^2 + u^2) on the
    whole line; u = pi*tan(theta) compactifies it to (1/pi) int h dtheta,
    integrated by n-point Gauss-Legendre on |theta| <= arctan(U(n)/pi).  The
    two tails each hold exact mass (pi/2 - arctan(U/pi))/pi, attached to
    endpoint nodes, so total mass is exactly 1 at every n and the truncation
    error enters only through h's variation over the tails.
    """
    umax = _logistic_umax(n)
    thmax = math.atan(umax / math.pi)
    x, gw = legendre_rule(n)
    u = math.pi * np.tan(thmax * x)
    t = 1.0 / (1.0 + np.exp(-u))
    tc = 1.0 / (1.0 + np.exp(u))
    v = (thmax / math.pi) * gw
    tail = (0.5 * math.pi - thmax) / math.pi
    t = np.concatenate(([0.0], t, [1.0]))
    tc = np.concatenate(([1.0], tc, [0.0]))
    v = np.concatenate(([tail], v, [tail]))
    return _freeze(t, tc, v)


@lru_cache(maxsize=None)
def tanh_sinh_rule(level: int):
    """Tanh-sinh nodes for ``int_0^1 f(t) dt`` in logistic form.

    t = sigma(pi*sinh(kh)) and 1 - t = sigma(-pi*sinh(kh)); nodes are clipped
    to |pi*sinh(kh)| <= 36, inside which both coordinates stay strictly
    within (0, 1) in double precision.
    """
    h = 2.0 ** (-level)
    kmax = int(math.asinh(36.0 / math.pi) / h)
    k = np.arange(-kmax, kmax + 1)
    u = k * h
    z = 0.5 * math.pi * np.sinh(u)
    t = 1.0 / (1.0 + np.exp(-2.0 * z))
    tc = 1.0 / (1.0 + np.exp(2.0 * z))
    w = h * 0.25 * math.pi * np.cosh(u) / np.cosh(z) ** 2
    return _freeze(t, tc, w)


def ifs_nodes(ifs, depth: int):
    """Midpoint nodes of the depth-N cylinder sets, with exact complements.

    Starting from (1/2, 1/2), each level applies every map to the location
    and the conjugated map to the complement, so the node set of the
    reflected system is the exact pointwise complement of this one.  Raises
    past the 2**24 atom budget.
    """
    m = len(ifs.maps)
    if m**depth > IFS_ATOM_BUDGET:
        raise IfsBudgetError(
            f"IFS at depth {depth} needs {m**depth} atoms "
            f"(budget {IFS_ATOM_BUDGET})",
            nodes_used=0,
        )
    rs = np.array([r for r, _ in ifs.maps])
    bs = np.array([b for _, b in ifs.maps])
    cs = np.array(ifs.maps_c)
    ps = np.array(ifs.probs)
    t = np.array([0.5])
    tc = np.array([0.5])
    w = np.array([1.0])
    for _ in range(depth):
        t = (np.multiply.outer(rs, t) + bs[:, None]).ravel()
        tc = (np.multiply.outer(rs, tc) + cs[:, None]).ravel()
        w = np.multiply.outer(ps, w).ravel()
    return _freeze(t, tc, w)


# ---------------------------------------------------------------------------
# shared reduction and convergence helpers


def _reduce(fnode, t, tc, w, sequential: bool = False):
    """Sum_j w_j * fnode(t, tc)_j over a fixed node order.

    numpy's pairwise summation; ``sequential`` forces a plain left-to-right
    loop (used for atom lists so the sum matches a caller's explicit
    accumulation bitwise).
    """
    total = None
    for lo in range(0, len(t), _CHUNK):
        hi = min(lo + _CHUNK, len(t))
        vals = np.asarray(fnode(t[lo:hi], tc[lo:hi]))
        if vals.shape[0] != hi - lo:
            raise ValueError("node function must return one value per node")
        wt = w[lo:hi].reshape((-1,) + (1,) * (vals.ndim - 1))
        if sequential:
            part = None
            for row in wt * vals:
                part = row if part is None else part + row
        else:
            part = np.sum(wt * vals, axis=0)
        total = part if total is None else total + part
    return total


def _metric(x) -> float:
    """Trace magnitude for matrix stacks, max-abs for vectors, abs for scalars."""
    x = np.asarray(x)
    if x.ndim >= 2:
        return abs(float(np.trace(x, axis1=-2, axis2=-1)))
    if x.ndim == 1:
        return float(np.max(np.abs(x))) if x.size else 0.0
    return abs(float(x))


def _tol_bound(spec: QuadratureSpec, ref: float) -> float:
    return max(spec.abs_tol, spec.rel_tol * ref)


def _converge(estimates, spec: QuadratureSpec, scheme: str):
    """Walk (value, n_nodes) refinements until two agree within tolerance."""
    prev = None
    value = None
    nodes = 0
    diff = math.inf
    for value, n in estimates:
        nodes += n
        if prev is not None:
            diff = _metric(value - prev)
            if diff <= _tol_bound(spec, _metric(value)):
                return value, nodes, diff
        prev = value
    raise QuadratureError(
        f"{scheme} refinement did not converge within {spec.max_nodes} nodes",
        value=None if value is None else float(np.sum(np.asarray(value))),
        error_estimate=None if math.isinf(diff) else diff,
        nodes_used=nodes,
    )


def _doubling_sizes(start: int, max_nodes: int):
    n = min(start, max_nodes)
    while n <= max_nodes:
        yield n
        n *= 2


# ---------------------------------------------------------------------------
# per-part drivers


def _term_scheme(term, spec: QuadratureSpec) -> str:
    name = spec.scheme_name
    if name is not None and name != "ifs_recursion":
        return name
    if term.hint == "smooth":
        return "gauss_legendre"
    if term.hint == "jacobi":
        return "gauss_jacobi"
    return "logistic_substitution" if term.ident == "log_mean" else "tanh_sinh"


def _integrate_term(fnode, term, spec: QuadratureSpec):
    scheme = _term_scheme(term, spec)
    if scheme == "gauss_jacobi":
        override = spec.scheme_name == "gauss_jacobi" and spec.scheme_params
        if override:
            p, q = spec.scheme_params

            def residual(t, tc):
                return term.eval_pair(t, tc) * t ** (-p) * tc ** (-q)

        else:
            if term.effective_exponents is None:
                raise QuadratureError(
                    "gauss_jacobi scheme needs endpoint exponents", nodes_used=0
                )
            p, q = term.effective_exponents
            residual = term.smooth_pair

        def series():
            for n in _doubling_sizes(16, spec.max_nodes):
                t, tc, w = jacobi_rule(p, q, n)
                yield _reduce(fnode, t, tc, w * residual(t, tc)), n

        value, nodes, err = _converge(series(), spec, "gauss_jacobi")
    elif scheme == "logistic_substitution":
        if term.ident != "log_mean":
            raise QuadratureError(
                "logistic_substitution applies to the log-mean kernel only",
                nodes_used=0,
            )

        def series():
            for n in _doubling_sizes(64, spec.max_nodes):
                t, tc, v = logistic_rule(n)
                yield _reduce(fnode, t, tc, term.weight * v), n + 2

        value, nodes, err = _converge(series(), spec, "logistic_substitution")
    elif scheme == "tanh_sinh":

        def series():
            for level in range(4, 16):
                t, tc, w = tanh_sinh_rule(level)
                if len(t) > spec.max_nodes:
                    return
                g = term.eval_pair(t, tc)
                yield _reduce(fnode, t, tc, w * g), len(t)

        value, nodes, err = _converge(series(), spec, "tanh_sinh")
    elif scheme == "gauss_legendre":
        value, nodes, err = _adaptive_panels(fnode, term, spec)
    else:
        raise QuadratureError(f"scheme {scheme!r} does not apply to densities", nodes_used=0)
    return value, nodes, err, scheme


def _adaptive_panels(fnode, term, spec: QuadratureSpec):
    """Bisected Gauss-Legendre 8/16 panels on g*h, left-to-right, depth <= 12."""
    x8, w8 = legendre_rule(8)
    x16, w16 = legendre_rule(16)

    def panel_value(a, b, x, w):
        half = 0.5 * (b - a)
        t = a + half * (1.0 + x)
        tc = (1.0 - b) + half * (1.0 - x)
        g = term.eval_pair(t, tc)
        return _reduce(fnode, t, tc, half * w * g)

    nodes = 0
    err = 0.0
    total = None

    def visit(a, b, depth):
        nonlocal nodes, err, total
        coarse = panel_value(a, b, x8, w8)
        fine = panel_value(a, b, x16, w16)
        nodes += 24
        diff = _metric(fine - coarse)
        if diff <= max((b - a) * spec.abs_tol, spec.rel_tol * _metric(fine)):
            total = fine if total is None else total + fine
            err += diff
            return
        if depth >= 12:
            raise QuadratureError(
                "gauss_legendre panels exceeded depth 12 (integrand too rough)",
                value=float(np.sum(np.asarray(fine))),
                error_estimate=diff,
                nodes_used=nodes,
            )
        mid = 0.5 * (a + b)
        visit(a, mid, depth + 1)
        visit(mid, b, depth + 1)

    visit(0.0, 1.0, 0)
    return total, nodes, err


def _derived_depth(ratio: float, m: int, spec: QuadratureSpec) -> int:
    """Smallest depth with ratio**N <= abs_tol, capped at 24 and by the budget."""
    target = max(spec.abs_tol, 1e-15)
    depth_tol = max(2, math.ceil(math.log(target) / math.log(ratio)))
    depth_budget = int(math.log(IFS_ATOM_BUDGET) / math.log(m))
    return min(depth_tol, IFS_DEPTH_CAP, depth_budget)


def _integrate_ifs_part(fnode, ifs, weight, spec: QuadratureSpec):
    pinned = spec.ifs_depth is not None
    depth = spec.ifs_depth if pinned else _derived_depth(
        ifs.contraction_ratio, len(ifs.maps), spec
    )
    t, tc, w = ifs_nodes(ifs, depth)
    value = weight * _reduce(fnode, t, tc, w)
    nodes = len(t)
    coarse_depth = max(depth - 2, 1)
    t2, tc2, w2 = ifs_nodes(ifs, coarse_depth)
    coarse = weight * _reduce(fnode, t2, tc2, w2)
    nodes += len(t2)
    err = _metric(value - coarse)
    if not pinned and ifs.contraction_ratio**depth > max(spec.abs_tol, 1e-15):
        if err > _tol_bound(spec, _metric(value)):
            raise IfsBudgetError(
                f"IFS budget {IFS_ATOM_BUDGET} atoms cannot reach abs_tol "
                f"{spec.abs_tol} (estimate gap {err:.3e} at depth {depth})",
                value=float(np.sum(np.asarray(value))),
                error_estimate=err,
                nodes_used=nodes,
            )
    return value, nodes, err, f"ifs_recursion:{depth}"


# ---------------------------------------------------------------------------
# measure-level driver and public wrappers


def _part_count(measure) -> int:
    n = 1 if measure.atoms else 0
    if measure.ac is not None:
        n += len(measure.ac.terms)
    if measure.sc is not None:
        n += 1
    return n


def integrate_measure(fnode, measure, spec: QuadratureSpec | None = None) -> IntegrationReport:
    """Integrate a pair-aware node function against a UnitMeasure, by parts.

    ``fnode(t, tc)`` takes equal-length arrays of locations and complements
    and returns an array whose leading axis indexes nodes: shape (k,) for
    scalar integrands, (k, d, d) for matrix ones.  Tolerances are split
    evenly across the parts so the summed error estimate still meets the
    spec's bound.
    """
    spec = spec or DEFAULT_SPEC
    nparts = max(_part_count(measure), 1)
    part_spec = replace(
        spec, abs_tol=spec.abs_tol / nparts, rel_tol=spec.rel_tol / nparts
    )
    rows = []
    values = []
    if measure.atoms:
        trip = measure.atom_pairs()
        t = np.array([a[0] for a in trip])
        tc = np.array([a[1] for a in trip])
        w = np.array([a[2] for a in trip])
        values.append(_reduce(fnode, t, tc, w, sequential=True))
        rows.append(("atoms", len(t), 0.0))
    if measure.ac is not None:
        for term in measure.ac.terms:
            value, nodes, err, scheme = _integrate_term(fnode, term, part_spec)
            values.append(value)
            rows.append((scheme, nodes, err))
    if measure.sc is not None:
        ifs, weight = measure.sc
        value, nodes, err, scheme = _integrate_ifs_part(fnode, ifs, weight, part_spec)
        values.append(value)
        rows.append((scheme, nodes, err))
    if not values:
        probe = np.asarray(fnode(np.array([0.5]), np.array([0.5])))
        values.append(np.zeros(probe.shape[1:]))
        rows.append(("empty", 0, 0.0))
    total = values[0]
    for v in values[1:]:
        total = total + v
    return IntegrationReport(
        value=total,
        nodes_used=sum(r[1] for r in rows),
        error_estimate=float(sum(r[2] for r in rows)),
        parts=tuple(rows),
    )


def _scalar_fnode(h, vectorized: bool):
    if vectorized:
        return lambda t, tc: np.asarray(h(t), dtype=float)
    return lambda t, tc: np.array([float(h(float(ti))) for ti in t])


def _matrix_fnode(hmat, vectorized: bool):
    if vectorized:
        return lambda t, tc: np.asarray(hmat(t), dtype=float)
    return lambda t, tc: np.stack(
        [np.asarray(hmat(float(ti)), dtype=float) for ti in t]
    )


def integrate_scalar_report(
    measure, h, spec: QuadratureSpec | None = None, vectorized: bool = True
) -> IntegrationReport:
    report = integrate_measure(_scalar_fnode(h, vectorized), measure, spec)
    return IntegrationReport(
        value=float(report.value),
        nodes_used=report.nodes_used,
        error_estimate=report.error_estimate,
        parts=report.parts,
    )


def integrate_scalar(
    measure, h, spec: QuadratureSpec | None = None, vectorized: bool = True
) -> tuple[float, float]:
    """``int h(t) dmu(t)`` with its error estimate, for a scalar integrand.

    ``h`` is called on node arrays by default; pass vectorized=False for a
    plain scalar function.
    """
    report = integrate_scalar_report(measure, h, spec, vectorized)
    return report.value, report.error_estimate


def integrate_matrix_report(
    measure, hmat, spec: QuadratureSpec | None = None, vectorized: bool = False
) -> IntegrationReport:
    return integrate_measure(_matrix_fnode(hmat, vectorized), measure, spec)


def integrate_matrix(
    measure, hmat, spec: QuadratureSpec | None = None, vectorized: bool = False
) -> np.ndarray:
    """``int H(t) dmu(t)`` for a matrix-valued integrand H(t) of fixed shape.

    One shared node set per measure part; refinement is driven by the trace.
    """
    return np.asarray(integrate_matrix_report(measure, hmat, spec, vectorized).value)


def integrate_ifs(ifs, h, depth: int, vectorized: bool = True) -> float:
    """Depth-N midpoint integral of a scalar h against a self-similar measure."""
    t, tc, w = ifs_nodes(ifs, depth)
    return float(_reduce(_scalar_fnode(h, vectorized), t, tc, w))


def _term_node_rows(term, spec: QuadratureSpec, n: int):
    scheme = _term_scheme(term, spec)
    if scheme == "gauss_jacobi":
        if spec.scheme_name == "gauss_jacobi" and spec.scheme_params:
            p, q = spec.scheme_params
            residual = lambda t, tc: term.eval_pair(t, tc) * t ** (-p) * tc ** (-q)
        else:
            if term.effective_exponents is None:
                raise QuadratureError(
                    "gauss_jacobi scheme needs endpoint exponents", nodes_used=0
                )
            p, q = term.effective_exponents
            residual = term.smooth_pair
        t, tc, w = jacobi_rule(p, q, n)
        return scheme, t, w * residual(t, tc)
    if scheme == "logistic_substitution":
        if term.ident != "log_mean":
            raise QuadratureError(
                "logistic_substitution applies to the log-mean kernel only",
                nodes_used=0,
            )
        t, tc, v = logistic_rule(n)
        return scheme, t, term.weight * v
    if scheme == "tanh_sinh":
        level = 4
        while level < 15 and len(tanh_sinh_rule(level)[0]) < n:
            level += 1
        t, tc, w = tanh_sinh_rule(level)
        return scheme, t, w * term.eval_pair(t, tc)
    if scheme == "gauss_legendre":
        x, gw = legendre_rule(n)
        t = 0.5 * (1.0 + x)
        tc = 0.5 * (1.0 - x)
        return scheme, t, 0.5 * gw * term.eval_pair(t, tc)
    raise QuadratureError(f"scheme {scheme!r} does not apply to densities", nodes_used=0)


def node_table(measure, spec: QuadratureSpec | None = None, n: int = 64):
    """Per-part node/weight rows at a requested resolution.

    Returns (part, t, weight) triples, ordered atoms, density terms, then
    the self-similar part, so that sum over rows of weight * h(t)
    approximates ``int h dmu`` part by part.  Weights fold the density
    values in; atom rows are the measure's atoms verbatim.  Each density
    term gets n nodes (tanh-sinh picks the smallest level holding at least
    n, and the logistic rule adds its two exact tail nodes); the
    self-similar part uses the depth pinned in ``spec`` when one is set,
    otherwise the deepest level whose atom count stays within n.
    """
    spec = spec or DEFAULT_SPEC
    if n < 2:
        raise ValueError("node_table needs n >= 2")
    rows = []
    for t, tc, w in measure.atom_pairs():
        rows.append(("atoms", float(t), float(w)))
    if measure.ac is not None:
        for term in measure.ac.terms:
            scheme, t, w = _term_node_rows(term, spec, n)
            rows.extend((scheme, float(ti), float(wi)) for ti, wi in zip(t, w))
    if measure.sc is not None:
        ifs, weight = measure.sc
        m = len(ifs.maps)
        if spec.ifs_depth is not None:
            depth = spec.ifs_depth
        else:
            depth = max(1, int(math.log(max(n, m)) / math.log(m) + 1e-12))
        t, tc, w = ifs_nodes(ifs, depth)
        rows.extend(
            (f"ifs_recursion:{depth}", float(ti), float(weight * wi))
            for ti, wi in zip(t, w)
        )
    return tuple(rows)


def density_mass(density, spec: QuadratureSpec | None = None) -> float:
    """Mass of an absolutely continuous part, term by term."""
    spec = spec or DEFAULT_SPEC
    ones = lambda t, tc: np.ones_like(t)
    mass = 0.0
    for term in density.terms:
        value, _, _, _ = _integrate_term(ones, term, spec)
        mass += float(value)
    return mass


# ---------------------------------------------------------------------------
# half-line densities (canonical-form route)


def integrate_halfline_density(
    Gnode, dens, weight: float, spec: QuadratureSpec | None = None
) -> IntegrationReport:
    """``weight * int_0^inf G(lam) rho(lam) dlam`` for an envelope-tagged density.

    ``Gnode(lam)`` is vectorized over an array of positive abscissas.  The
    jacobi_split route integrates [0, 1] with Gauss-Jacobi at exponent pow0
    and [1, inf) through s = 1/lam at exponent decay - 2.  The log_cauchy
    route requires the log-mean kernel 1/(lam*(pi^2 + ln^2 lam)) and reuses
    the compactified Cauchy rule in u = ln(lam), with tail nodes at
    lam = exp(+-U).
    """
    spec = spec or DEFAULT_SPEC
    if dens.hint == "jacobi_split":
        half_spec = replace(spec, abs_tol=spec.abs_tol / 2, rel_tol=spec.rel_tol / 2)
        p = dens.pow0
        smooth0 = dens.smooth0 or (lambda lam: dens.fn(lam) * lam ** (-p))
        qd = dens.decay - 2.0
        smooth_inf = dens.smooth_inf or (lambda s: dens.fn(1.0 / s) * s**dens.decay)

        def lower():
            for n in _doubling_sizes(16, spec.max_nodes):
                t, _, w = jacobi_rule(p, 0.0, n)
                vals = np.asarray(Gnode(t))
                wt = (w * smooth0(t)).reshape((-1,) + (1,) * (vals.ndim - 1))
                yield np.sum(wt * vals, axis=0), n

        def upper():
            for n in _doubling_sizes(16, spec.max_nodes):
                s, _, w = jacobi_rule(qd, 0.0, n)
                vals = np.asarray(Gnode(1.0 / s))
                wt = (w * smooth_inf(s)).reshape((-1,) + (1,) * (vals.ndim - 1))
                yield np.sum(wt * vals, axis=0), n

        v1, n1, e1 = _converge(lower(), half_spec, "halfline-lower")
        v2, n2, e2 = _converge(upper(), half_spec, "halfline-upper")
        value = weight * (v1 + v2)
        nodes, err = n1 + n2, e1 + e2
        rows = (("halfline-jacobi", nodes, err),)
    elif dens.hint == "log_cauchy":
        if dens.pushforward_ident != "log_mean":
            raise QuadratureError(
                "log_cauchy route is specific to the log-mean kernel",
                nodes_used=0,
            )

        def series():
            for n in _doubling_sizes(64, spec.max_nodes):
                umax = _logistic_umax(n)
                thmax = math.atan(umax / math.pi)
                x, gw = legendre_rule(n)
                u = math.pi * np.tan(thmax * x)
                lam = np.concatenate(([math.exp(-umax)], np.exp(u), [math.exp(umax)]))
                tail = (0.5 * math.pi - thmax) / math.pi
                v = np.concatenate(([tail], (thmax / math.pi) * gw, [tail]))
                vals = np.asarray(Gnode(lam))
                wt = v.reshape((-1,) + (1,) * (vals.ndim - 1))
                yield np.sum(wt * vals, axis=0), n + 2

        value, nodes, err = _converge(series(), spec, "log-cauchy")
        value = weight * value
        rows = (("log-cauchy", nodes, err),)
    else:  # pragma: no cover - HalfLineDensity validates hints
        raise QuadratureError(f"unknown half-line hint {dens.hint!r}", nodes_used=0)
    return IntegrationReport(
        value=value, nodes_used=nodes, error_estimate=float(err), parts=rows
    )


def halfline_mass(dens, weight: float = 1.0, spec: QuadratureSpec | None = None) -> float:
    report = integrate_halfline_density(
        lambda lam: np.ones_like(lam), dens, weight, spec
    )
    return float(report.value)

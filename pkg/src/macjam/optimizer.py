"""Solvers for the jammer's energy-allocation problem.

The jammer minimizes the objective scalar rho over the simplex of energy
ratios (one per user's training window, one for the data phase).  The primary
solver searches the equality multiplier nu: for each trial nu the per-ratio
stationarity equations, which are positive-part expressions coupled through
the data-phase factor and the interference sum, are solved by damped fixed
point iteration, and nu is bisected until the ratios use the whole budget.
The sign structure of the positive parts identifies the set of ratios pinned
at zero; a final restricted solve on that set is exact, which is what lets
the returned points carry machine-precision KKT certificates.

Independent cross-checks: a closed-form interior solution valid at high
jamming power, the infinite-power limit, a brute-force simplex-grid oracle,
and a multi-start projected gradient descent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .model import (
    JammerAllocation,
    JammerBudget,
    SystemConfig,
    objective_rho,
    rho_value,
)

__all__ = [
    "SolveResult",
    "SolverError",
    "OrderingVerdict",
    "rho_gradient",
    "evaluate_kkt",
    "solve_kkt",
    "solve_closed_form",
    "solve_asymptotic",
    "solve",
    "solve_oracle",
    "solve_projected_descent",
    "check_corollary_orderings",
]

# Coordinates at or below this are treated as pinned at zero.
ACTIVE_TOL = 1e-9

METHOD_KKT = "kkt_active_set"
METHOD_CLOSED_FORM = "closed_form"
METHOD_ASYMPTOTIC = "asymptotic"
METHOD_ORACLE = "oracle"
METHOD_DESCENT = "projected_descent"


class SolverError(RuntimeError):
    """Solver did not reach the requested residual; carries the last residual."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


@dataclass(frozen=True)
class SolveResult:
    """Optimal allocation with first-order optimality diagnostics.

    ``lambdas`` holds the nonnegativity multipliers, training coordinates
    first and the data coordinate last; ``active_set`` lists the coordinate
    indices pinned at zero in the same indexing (index K is the data phase).
    """

    alloc: JammerAllocation
    rho_star: float
    nu_star: float
    lambdas: tuple[float, ...]
    active_set: tuple[int, ...]
    method: str
    kkt_residual: float
    iterations: int


@dataclass(frozen=True)
class OrderingVerdict:
    """Outcome of one pairwise allocation-ordering check."""

    corollary: int
    user_hi: int
    user_lo: int
    zeta_hi: float
    zeta_lo: float
    passed: bool


class _Sys(NamedTuple):
    pt: np.ndarray
    pd: np.ndarray
    tt: np.ndarray
    T: float
    Td: float
    energy: float  # P_w * T
    S: float       # sum of data powers


def _sys(cfg: SystemConfig, budget: JammerBudget) -> _Sys:
    pd = cfg.data_power_vec()
    return _Sys(
        pt=cfg.train_power_vec(),
        pd=pd,
        tt=cfg.train_len_vec(),
        T=float(cfg.block_len),
        Td=float(cfg.data_len),
        energy=budget.avg_power * cfg.block_len,
        S=float(pd.sum()),
    )


def _grad(sys: _Sys, zt: np.ndarray, zd: float) -> tuple[np.ndarray, float]:
    q = 1.0 + zt * sys.energy / sys.tt
    s = sys.pt * sys.tt / q
    alpha = sys.pd * s / (1.0 + s)
    beta = sys.pd / (1.0 + s)
    gamma = 1.0 / (1.0 + zd * sys.energy / sys.Td)
    e_fac = 1.0 + gamma * beta.sum()
    d_t = sys.energy * zt + sys.tt * (1.0 + sys.pt * sys.tt)
    g_t = -sys.energy * gamma * sys.pd * sys.pt * sys.tt**2 * (1.0 + gamma * sys.S) / (
        d_t**2 * e_fac**2
    )
    g_d = -sys.energy * sys.Td * alpha.sum() / ((sys.energy * zd + sys.Td) ** 2 * e_fac**2)
    return g_t, float(g_d)


def rho_gradient(zeta_t, zeta_d, cfg: SystemConfig, budget: JammerBudget):
    """Analytic gradient of the objective in the raw ratio coordinates."""
    sys = _sys(cfg, budget)
    return _grad(sys, np.asarray(zeta_t, dtype=float), float(zeta_d))


def evaluate_kkt(zeta_t, zeta_d, nu: float, cfg: SystemConfig, budget: JammerBudget):
    """First-order optimality residual at a point, for a given equality multiplier.

    Eliminates the nonnegativity multipliers as slacks, ``lambda = grad + nu``,
    and returns ``(residual, lambdas)`` where the residual is the largest
    violation among budget feasibility, ratio nonnegativity, multiplier
    nonnegativity and complementary slackness.
    """
    zt = np.asarray(zeta_t, dtype=float)
    zd = float(zeta_d)
    g_t, g_d = rho_gradient(zt, zd, cfg, budget)
    lam = np.append(g_t, g_d) + nu
    z = np.append(zt, zd)
    residual = max(
        abs(float(z.sum()) - 1.0),
        max(0.0, -float(z.min())),
        max(0.0, -float(lam.min())),
        float(np.max(np.abs(lam * z))),
    )
    return residual, lam


def _inner_fixed_point(sys: _Sys, nu: float, zt, zd, max_iter: int, mix0: float):
    """Damped fixed point for the stationarity system at fixed nu.

    The positive-part updates implement the pinned-at-zero set automatically.
    The mixing factor starts at ``mix0`` and is halved whenever the step stops
    contracting; stiff feedback through the interference sum otherwise makes
    the plain 0.5-damped map oscillate at low jamming power.
    """
    sq_nu = math.sqrt(nu)
    mix = mix0
    prev_step = math.inf
    # Loop-invariant pieces; note alpha_k = pd_k - beta_k.
    rate = sys.energy / sys.tt
    pt_tt = sys.pt * sys.tt
    root_vec = sys.tt * np.sqrt(sys.energy * sys.pd * sys.pt)
    thr = sys.tt * (1.0 + pt_tt)
    for it in range(max_iter):
        beta_sum = float((sys.pd / (1.0 + pt_tt / (1.0 + zt * rate))).sum())
        gamma = 1.0 / (1.0 + zd * sys.energy / sys.Td)
        e_fac = 1.0 + gamma * beta_sum
        scale_t = math.sqrt(gamma * (1.0 + gamma * sys.S)) / (sq_nu * e_fac)
        zt_new = np.maximum(0.0, (root_vec * scale_t - thr) / sys.energy)
        zd_new = max(
            0.0,
            (math.sqrt(sys.energy * sys.Td * (sys.S - beta_sum)) / (sq_nu * e_fac) - sys.Td)
            / sys.energy,
        )
        zt_next = (1.0 - mix) * zt + mix * zt_new
        zd_next = (1.0 - mix) * zd + mix * zd_new
        step = max(float(np.max(np.abs(zt_next - zt))), abs(zd_next - zd))
        zt, zd = zt_next, zd_next
        scale = 1.0 + max(float(zt.max()), zd)
        if step <= 1e-13 * scale:
            return zt, zd, mix, True
        if step > 0.9 * prev_step:
            mix = max(0.5 * mix, 1.0 / 128.0)
        prev_step = step
    return zt, zd, mix, False


def _refine_active_set(sys: _Sys, free_t: np.ndarray, free_d: bool):
    """Exact solve of the stationarity + budget system on a fixed free set.

    On the free set the stationarity equations collapse to one scalar: every
    free training denominator is proportional to ``tt_k * sqrt(pd_k pt_k)``.
    With the data ratio free the proportionality constant solves a quadratic,
    otherwise it is linear in the budget.  Returns ``(zt, zd)`` or None when
    the free set admits no solution.
    """
    w = sys.tt * np.sqrt(sys.pd * sys.pt)
    x_thr = sys.tt * (1.0 + sys.pt * sys.tt)
    w_free = float(w[free_t].sum())
    x_free = float(x_thr[free_t].sum())
    zt = np.zeros_like(sys.tt)
    if not free_d:
        if w_free <= 0.0:
            return None
        # Expanded form of (cp * w_k - x_k) / energy with cp = (energy + XA)/WA;
        # the direct form cancels catastrophically when energy << XA.
        zt[free_t] = w[free_t] / w_free + (w[free_t] * x_free - x_thr[free_t] * w_free) / (
            w_free * sys.energy
        )
        zd = 0.0
    else:
        beta_zero = float((sys.pd / (1.0 + sys.pt * sys.tt))[~free_t].sum())
        a2 = sys.S - float(sys.pd[free_t].sum()) - beta_zero
        rhs = sys.energy + sys.Td * (1.0 + sys.S) + x_free
        if a2 > 0.0:
            cp = (-w_free + math.sqrt(w_free * w_free + a2 * rhs)) / a2
        elif w_free > 0.0:
            cp = rhs / (2.0 * w_free)
        else:
            return None
        d_d = sys.energy + sys.Td + x_free - cp * w_free
        zd = (d_d - sys.Td) / sys.energy
        zt[free_t] = (cp * w[free_t] - x_thr[free_t]) / sys.energy
    return zt, float(zd)


def _validate_candidate(sys: _Sys, zt: np.ndarray, zd: float, free_t: np.ndarray, free_d: bool):
    """Exact sign checks for a restricted solve; returns nu or None."""
    if np.any(zt[free_t] <= 0.0) or zd < 0.0 or (free_d and zd <= 0.0):
        return None
    g_t, g_d = _grad(sys, zt, zd)
    g_all = np.append(g_t, g_d)
    free = np.append(free_t, free_d)
    nu = float(-(g_all[free]).mean())
    lam = g_all + nu
    if float(lam[~free].min(initial=math.inf)) < -1e-9 * (1.0 + abs(nu)):
        return None
    return nu


def _enumerate_active_sets(sys: _Sys):
    """Exact fallback: try every structurally possible free set.

    Free training ratios share one proportionality constant, so a ratio is
    positive iff that constant exceeds ``(1 + pt tt) / sqrt(pd pt)``; the free
    set is therefore a prefix of the users sorted by that threshold, leaving
    only 2(K+1) candidates to solve exactly and sign-check.
    """
    w = sys.tt * np.sqrt(sys.pd * sys.pt)
    x_thr = sys.tt * (1.0 + sys.pt * sys.tt)
    ratio = np.where(w > 0.0, x_thr / np.where(w > 0.0, w, 1.0), math.inf)
    order = np.argsort(ratio, kind="stable")
    k = w.size
    best = None
    for m in range(k + 1):
        free_t = np.zeros(k, dtype=bool)
        free_t[order[:m]] = True
        for free_d in (False, True):
            if m == 0 and not free_d:
                continue
            out = _refine_active_set(sys, free_t, free_d)
            if out is None:
                continue
            zt, zd = out
            nu = _validate_candidate(sys, zt, zd, free_t, free_d)
            if nu is None:
                continue
            residual = _raw_residual(sys, zt, zd, nu)
            if best is None or residual < best[0]:
                best = (residual, zt, zd, nu)
    if best is None:
        return None
    return best[1], best[2], best[3]


def _raw_residual(sys: _Sys, zt: np.ndarray, zd: float, nu: float) -> float:
    g_t, g_d = _grad(sys, zt, zd)
    lam = np.append(g_t, g_d) + nu
    z = np.append(zt, zd)
    return max(
        abs(float(z.sum()) - 1.0),
        max(0.0, -float(z.min())),
        max(0.0, -float(lam.min())),
        float(np.max(np.abs(lam * z))),
    )


def _pivot_refine(sys: _Sys, free_t: np.ndarray, free_d: bool, max_rounds: int):
    """Classic active-set pivoting around the exact restricted solve."""
    k = free_t.size
    for _ in range(max_rounds):
        out = _refine_active_set(sys, free_t, free_d)
        if out is None:
            return None
        zt, zd = out
        zfull = np.append(zt, zd)
        free = np.append(free_t, free_d)
        # Primal sign check: drop the worst offender from the free set.
        bad = np.where(free & (zfull <= 0.0))[0]
        if bad.size:
            worst = bad[np.argmin(zfull[bad])]
            if worst == k:
                free_d = False
            else:
                free_t = free_t.copy()
                free_t[worst] = False
            if not (free_t.any() or free_d):
                return None
            continue
        # Dual sign check: release the most violated pinned coordinate.
        g_t, g_d = _grad(sys, zt, zd)
        g_all = np.append(g_t, g_d)
        nu = float(-(g_all[free]).mean())
        lam = g_all + nu
        pinned = ~free
        tol = 1e-11 * (1.0 + abs(nu))
        viol = np.where(pinned & (lam < -tol))[0]
        if viol.size:
            worst = viol[np.argmin(lam[viol])]
            if worst == k:
                free_d = True
            else:
                free_t = free_t.copy()
                free_t[worst] = True
            continue
        return zt, zd, nu
    return None


def _flat_result(cfg: SystemConfig, budget: JammerBudget, method: str) -> SolveResult:
    # Objective is constant (no data power anywhere): every point is optimal.
    zt = cfg.train_len_vec() / cfg.block_len
    alloc = JammerAllocation(tuple(zt), cfg.data_len / cfg.block_len)
    k = cfg.n_users
    return SolveResult(
        alloc=alloc,
        rho_star=objective_rho(alloc, cfg, budget),
        nu_star=0.0,
        lambdas=tuple(0.0 for _ in range(k + 1)),
        active_set=(),
        method=method,
        kkt_residual=0.0,
        iterations=0,
    )


def _build_result(
    cfg: SystemConfig,
    budget: JammerBudget,
    zt: np.ndarray,
    zd: float,
    method: str,
    iterations: int,
    nu: float | None = None,
) -> SolveResult:
    try:
        alloc = JammerAllocation(tuple(float(z) for z in zt), float(zd))
    except ValueError as exc:
        raise SolverError(f"solver produced an infeasible allocation: {exc}", math.inf)
    z = alloc.as_vector()
    if nu is None:
        g_t, g_d = rho_gradient(z[:-1], z[-1], cfg, budget)
        g_all = np.append(g_t, g_d)
        free = z > ACTIVE_TOL
        nu = max(0.0, float(-(g_all[free]).mean())) if free.any() else 0.0
    residual, lam = evaluate_kkt(z[:-1], z[-1], nu, cfg, budget)
    return SolveResult(
        alloc=alloc,
        rho_star=objective_rho(alloc, cfg, budget),
        nu_star=float(nu),
        lambdas=tuple(max(0.0, float(v)) for v in lam),
        active_set=tuple(int(i) for i in np.where(z <= ACTIVE_TOL)[0]),
        method=method,
        kkt_residual=float(residual),
        iterations=int(iterations),
    )


def solve_kkt(
    cfg: SystemConfig,
    budget: JammerBudget,
    tol: float = 1e-10,
    *,
    max_outer: int = 500,
    max_inner: int = 200,
) -> SolveResult:
    """Primary solver: bisection on the equality multiplier nu.

    The budget residual (sum of ratios minus one) decreases in nu, so the
    bracket is expanded geometrically and then bisected.  The final iterate
    fixes the set of zero ratios and an exact restricted solve polishes the
    point; failing that, the raw iterate is kept and checked against ``tol``.
    """
    if budget.avg_power <= 0.0:
        raise ValueError("solve_kkt requires a positive jamming budget")
    sys = _sys(cfg, budget)
    if sys.S == 0.0:
        return _flat_result(cfg, budget, METHOD_KKT)

    zt = sys.tt / sys.T
    zd = sys.Td / sys.T
    g_t, g_d = _grad(sys, zt, zd)
    nu0 = max(float(np.max(-g_t)), -g_d)
    evals = 0
    mix = 0.5

    def budget_gap(nu, zt, zd, mix):
        nonlocal evals
        evals += 1
        zt, zd, mix, _ = _inner_fixed_point(sys, nu, zt, zd, max_inner, mix)
        return float(zt.sum()) + zd - 1.0, zt, zd, mix

    lo = hi = nu0
    gap_lo, zt, zd, mix = budget_gap(lo, zt, zd, mix)
    expand = 0
    while gap_lo < 0.0 and expand < 150:
        lo /= 16.0
        expand += 1
        gap_lo, zt, zd, mix = budget_gap(lo, zt, zd, mix)
    gap_hi, zt_hi, zd_hi, mix = budget_gap(hi, zt.copy(), zd, mix)
    expand = 0
    while gap_hi > 0.0 and expand < 150:
        hi *= 16.0
        expand += 1
        gap_hi, zt_hi, zd_hi, mix = budget_gap(hi, zt_hi, zd_hi, mix)
    for _ in range(max_outer):
        mid = math.sqrt(lo * hi)
        gap_mid, zt, zd, mix = budget_gap(mid, zt, zd, mix)
        if gap_mid > 0.0:
            lo = mid
        else:
            hi = mid
        if hi / lo - 1.0 <= 1e-10 or abs(gap_mid) <= 1e-13:
            break
    nu_est = math.sqrt(lo * hi)
    gap_fin, zt, zd, mix = budget_gap(nu_est, zt, zd, mix)

    free_t = zt > ACTIVE_TOL
    free_d = zd > ACTIVE_TOL
    refined = _pivot_refine(sys, free_t, free_d, max_rounds=2 * (cfg.n_users + 2))
    if refined is not None:
        zt_r, zd_r, nu_r = refined
        result = _build_result(cfg, budget, zt_r, zd_r, METHOD_KKT, evals, nu=nu_r)
        if result.kkt_residual <= tol:
            return result
    # Pivoting can lose its footing when the bisection iterate is far from
    # feasible (razor-thin nu windows at very low budgets); enumerating the
    # structurally possible free sets is exact and cheap.
    enumerated = _enumerate_active_sets(sys)
    if enumerated is not None:
        zt_e, zd_e, nu_e = enumerated
        if _raw_residual(sys, zt_e, zd_e, nu_e) <= tol:
            return _build_result(cfg, budget, zt_e, zd_e, METHOD_KKT, evals, nu=nu_e)
    result = _build_result(cfg, budget, zt, zd, METHOD_KKT, evals, nu=nu_est)
    if result.kkt_residual > tol:
        raise SolverError("nu-bisection did not converge", result.kkt_residual)
    return result


def solve_closed_form(cfg: SystemConfig, budget: JammerBudget) -> SolveResult | None:
    """Interior closed form, valid when every computed ratio is strictly positive.

    With ``delta = sum(pt_i tt_i^2)`` and ``eta = sum(tt_i sqrt(pd_i pt_i))``:

        zeta_t_k = (w_k (PwT + T + delta + Td S) - 2 eta tt_k (1 + pt_k tt_k))
                   / (2 PwT eta),      w_k = tt_k sqrt(pd_k pt_k)
        zeta_d   = 1/2 + (Tt + delta - Td (1 + S)) / (2 PwT)

    Returns None when any component is nonpositive ("not interior"); callers
    should then fall back to :func:`solve_kkt`.
    """
    if budget.avg_power <= 0.0:
        raise ValueError("solve_closed_form requires a positive jamming budget")
    sys = _sys(cfg, budget)
    w = sys.tt * np.sqrt(sys.pd * sys.pt)
    eta = float(w.sum())
    if eta <= 0.0:
        return None
    delta = float((sys.pt * sys.tt**2).sum())
    t_t = float(sys.tt.sum())
    zt = (w * (sys.energy + sys.T + delta + sys.Td * sys.S) - 2.0 * eta * sys.tt * (1.0 + sys.pt * sys.tt)) / (
        2.0 * sys.energy * eta
    )
    zd = 0.5 + (t_t + delta - sys.Td * (1.0 + sys.S)) / (2.0 * sys.energy)
    if not (np.all(zt > 0.0) and zd > 0.0):
        return None
    return _build_result(cfg, budget, zt, float(zd), METHOD_CLOSED_FORM, 0)


def solve_asymptotic(cfg: SystemConfig) -> JammerAllocation:
    """Infinite-budget limit: half the energy on data, training shares by
    ``tt_k sqrt(pt_k pd_k)``."""
    tt = cfg.train_len_vec()
    w = tt * np.sqrt(cfg.data_power_vec() * cfg.train_power_vec())
    eta = float(w.sum())
    if eta <= 0.0:
        # No user carries data; the limit is degenerate and any split works.
        return JammerAllocation(tuple(tt / cfg.block_len), cfg.data_len / cfg.block_len)
    return JammerAllocation(tuple(w / (2.0 * eta)), 0.5)


def solve(cfg: SystemConfig, budget: JammerBudget, tol: float = 1e-10) -> SolveResult:
    """Closed form when its validity condition holds, nu-bisection otherwise."""
    if budget.avg_power <= 0.0:
        raise ValueError("solve requires a positive jamming budget")
    result = solve_closed_form(cfg, budget)
    if result is not None and result.kkt_residual <= tol:
        return result
    return solve_kkt(cfg, budget, tol)


def _simplex_grid(dim: int, steps: int) -> np.ndarray:
    """All points of the integer simplex grid {z >= 0, sum z = steps} / steps."""
    if dim == 1:
        return np.array([[float(steps)]]) / steps
    parts = []
    for lead in range(steps + 1):
        rest = _simplex_grid(dim - 1, steps - lead) * (steps - lead) if steps - lead else np.zeros(
            (1, dim - 1)
        )
        block = np.empty((rest.shape[0], dim))
        block[:, 0] = lead
        block[:, 1:] = rest
        parts.append(block)
    return np.concatenate(parts) / steps


def _grid_point_count(dim: int, steps: int) -> int:
    return math.comb(steps + dim - 1, dim - 1)


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _pair_descent(z, cfg, budget, max_sweeps: int, rel_tol: float = 1e-13):
    """Projected coordinate descent on the simplex via pairwise transfers.

    Moving mass t from coordinate j to coordinate i keeps the simplex exact;
    each pair is line-searched by golden section.  Derivative-free, so the
    polish shares nothing with the stationarity-based solvers.
    """
    z = np.array(z, dtype=float)
    dim = z.size

    def value(v):
        return float(rho_value(v[:-1], v[-1], cfg, budget))

    best = value(z)
    sweeps = 0
    for _ in range(max_sweeps):
        sweeps += 1
        start = best
        for i in range(dim):
            for j in range(i + 1, dim):
                lo, hi = -z[i], z[j]
                if hi - lo <= 1e-15:
                    continue
                trial = z.copy()

                def phi(t):
                    trial[i] = z[i] + t
                    trial[j] = z[j] - t
                    return value(trial)

                a, b = lo, hi
                c = b - _GOLDEN * (b - a)
                d = a + _GOLDEN * (b - a)
                fc, fd = phi(c), phi(d)
                while b - a > 1e-12:
                    if fc < fd:
                        b, d, fd = d, c, fc
                        c = b - _GOLDEN * (b - a)
                        fc = phi(c)
                    else:
                        a, c, fc = c, d, fd
                        d = a + _GOLDEN * (b - a)
                        fd = phi(d)
                t_best, f_best = (c, fc) if fc <= fd else (d, fd)
                for t_edge in (lo, hi):
                    f_edge = phi(t_edge)
                    if f_edge < f_best:
                        t_best, f_best = t_edge, f_edge
                if f_best < best:
                    z[i] += t_best
                    z[j] -= t_best
                    z[i] = max(z[i], 0.0)
                    z[j] = max(z[j], 0.0)
                    best = f_best
        if start - best <= rel_tol * max(1.0, abs(start)):
            break
    return z, best, sweeps


def solve_oracle(
    cfg: SystemConfig,
    budget: JammerBudget,
    grid_resolution: float = 1e-3,
    *,
    max_grid_points: int = 2_000_000,
    search_samples: int = 50_000,
    seed: int = 12345,
    max_sweeps: int = 200,
) -> SolveResult:
    """Brute-force reference: exhaustive simplex grid plus pairwise-descent polish.

    When the grid at the requested resolution would exceed ``max_grid_points``
    the enumeration is replaced by seeded Dirichlet sampling (plus the simplex
    vertices and center); the polish does the precision work either way.  Only
    intended for tests and diagnostics.
    """
    dim = cfg.n_users + 1
    steps = max(1, round(1.0 / grid_resolution))
    if _grid_point_count(dim, steps) <= max_grid_points:
        pts = _simplex_grid(dim, steps)
    else:
        rng = np.random.default_rng(seed)
        pts = np.concatenate(
            [np.eye(dim), np.full((1, dim), 1.0 / dim), rng.dirichlet(np.ones(dim), size=search_samples)]
        )
    vals = rho_value(pts[:, :-1], pts[:, -1], cfg, budget)
    z0 = pts[int(np.argmin(vals))]
    z, _, sweeps = _pair_descent(z0, cfg, budget, max_sweeps)
    return _build_result(cfg, budget, z[:-1], float(z[-1]), METHOD_ORACLE, sweeps)


def _project_simplex(v: np.ndarray) -> np.ndarray:
    u = np.sort(v)[::-1]
    shifted = np.cumsum(u) - 1.0
    idx = np.arange(1, v.size + 1)
    r = int(idx[u - shifted / idx > 0.0][-1])
    return np.maximum(v - shifted[r - 1] / r, 0.0)


def _descend(z0, cfg, budget, tol, max_iter):
    z = _project_simplex(np.asarray(z0, dtype=float))

    def value(v):
        return float(rho_value(v[:-1], v[-1], cfg, budget))

    def gradient(v):
        g_t, g_d = rho_gradient(v[:-1], v[-1], cfg, budget)
        return np.append(g_t, g_d)

    f = value(z)
    g = gradient(z)
    step = 1.0
    iters = 0
    for _ in range(max_iter):
        # Scale-free first-order test; the projected gradient inherits the
        # magnitude of the gradient, so the threshold must as well.
        pg = z - _project_simplex(z - g)
        if float(np.max(np.abs(pg))) <= tol * float(np.max(np.abs(g))):
            break
        moved = False
        trial = min(step, 1e12)
        while trial > 1e-20:
            cand = _project_simplex(z - trial * g)
            decrease = float(g @ (cand - z))
            if decrease < 0.0 and value(cand) <= f + 1e-4 * decrease:
                moved = True
                break
            trial *= 0.5
        iters += 1
        if not moved:
            break  # step underflow: at floating-point resolution of the optimum
        g_new = gradient(cand)
        dz = cand - z
        dg = g_new - g
        curv = float(dz @ dg)
        # Barzilai-Borwein step for the next iteration, Armijo-safeguarded above.
        step = float(dz @ dz) / curv if curv > 0.0 else trial * 2.0
        z, f, g = cand, value(cand), g_new
    return z, f, iters


def solve_projected_descent(
    cfg: SystemConfig,
    budget: JammerBudget,
    tol: float = 1e-9,
    *,
    max_iter: int = 5000,
    starts: Sequence[np.ndarray] | None = None,
    seed: int = 777,
) -> SolveResult:
    """Multi-start projected gradient descent with Armijo backtracking.

    Defense-in-depth companion to :func:`solve_kkt`: it relies only on the
    objective and its gradient, never on the stationarity rearrangement, and
    the five default starts guard against any non-convex pocket the curvature
    probe might have missed.
    """
    if budget.avg_power <= 0.0:
        raise ValueError("solve_projected_descent requires a positive jamming budget")
    k = cfg.n_users
    if starts is None:
        rng = np.random.default_rng(seed)
        asym = solve_asymptotic(cfg).as_vector()
        starts = [
            np.append(cfg.train_len_vec() / cfg.block_len, cfg.data_len / cfg.block_len),
            np.append(np.full(k, 1.0 / k), 0.0),
            np.append(np.zeros(k), 1.0),
            asym,
            rng.dirichlet(np.ones(k + 1)),
        ]
    best = None
    for z0 in starts:
        z, f, iters = _descend(np.asarray(z0, dtype=float), cfg, budget, tol, max_iter)
        if best is None or f < best[1]:
            best = (z, f, iters)
    z, _, iters = best
    return _build_result(cfg, budget, z[:-1], float(z[-1]), METHOD_DESCENT, iters)


def check_corollary_orderings(result: SolveResult, cfg: SystemConfig) -> list[OrderingVerdict]:
    """Pairwise sanity checks of the optimal training-jamming shares.

    For user pairs that differ in exactly one parameter, the user with the
    larger data power, larger training power, or longer training window should
    receive at least as much jamming energy.  Verdicts allow solver-level
    slack of ``ACTIVE_TOL``.
    """
    zt = result.alloc.zeta_t
    verdicts = []
    for corollary in (1, 2, 3):
        for i in range(cfg.n_users):
            for j in range(cfg.n_users):
                if i == j:
                    continue
                a, b = cfg.users[i], cfg.users[j]
                if corollary == 1:
                    match = a.train_len == b.train_len and a.train_power == b.train_power and a.data_power > b.data_power
                elif corollary == 2:
                    match = a.train_len == b.train_len and a.data_power == b.data_power and a.train_power > b.train_power
                else:
                    match = a.train_power == b.train_power and a.data_power == b.data_power and a.train_len > b.train_len
                if match:
                    verdicts.append(
                        OrderingVerdict(
                            corollary=corollary,
                            user_hi=i,
                            user_lo=j,
                            zeta_hi=zt[i],
                            zeta_lo=zt[j],
                            passed=zt[i] >= zt[j] - ACTIVE_TOL,
                        )
                    )
    return verdicts

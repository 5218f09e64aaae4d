"""Bisection in the reference density for the stress-free boundary.

For fixed mu the fixed point z(brho, mu) exists on the whole bracket
[brho_lower, brho_plus] and the boundary mismatch brho -> g'(y(1)) is
negative at the lower end and positive at the upper end, so a sign-change
bisection lands on a root brho0(mu) with g'(y(1)) = 0.  Monotonicity of
the mismatch is not guaranteed; bisection returns one root.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constitutive import ConstitutiveModel
from .errors import BracketFailure
from .fixed_point import (
    DEFAULT_MAX_ITER,
    DEFAULT_TOL,
    PicardDiagnostics,
    picard_solve,
)
from .parameters import ParameterBox, build_parameter_box
from .radial import RadialGrid, reconstruct_geometry, y_at_boundary

DEFAULT_TOL_BC = 1e-10
DEFAULT_TOL_BRHO = 1e-12
MAX_BISECTIONS = 200


@dataclass
class MismatchResult:
    """Boundary mismatch g'(y(1)) together with the fixed point behind it."""

    value: float
    y1: float
    zeta: np.ndarray
    diagnostics: PicardDiagnostics


@dataclass
class SolutionProfile:
    """Converged separable spatial profile and its diagnostics."""

    model: ConstitutiveModel
    mu: float
    brho0: float
    G: float
    grid: RadialGrid
    zeta: np.ndarray
    f: np.ndarray
    fprime: np.ndarray
    lam: np.ndarray
    y: np.ndarray
    fprime0: float
    boundary_residual: float
    diagnostics: PicardDiagnostics
    bisection_iterations: int
    box: ParameterBox

    def residual_report(self):
        from .verify import residual_report

        return residual_report(self.model, self)


def boundary_mismatch(
    model: ConstitutiveModel,
    brho: float,
    mu: float,
    G: float,
    grid: RadialGrid,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    box: ParameterBox | None = None,
) -> MismatchResult:
    zeta, diag = picard_solve(model, brho, mu, G, grid, tol=tol, max_iter=max_iter, box=box)
    y1 = y_at_boundary(grid, zeta)
    return MismatchResult(value=float(model.dg(y1)), y1=y1, zeta=zeta, diagnostics=diag)


def solve_separable(
    model: ConstitutiveModel,
    mu: float,
    G: float = 1.0,
    grid: RadialGrid | None = None,
    tol_bc: float = DEFAULT_TOL_BC,
    tol_brho: float = DEFAULT_TOL_BRHO,
    tol_picard: float = DEFAULT_TOL,
    box: ParameterBox | None = None,
) -> SolutionProfile:
    """Find brho0(mu) with |g'(y(1))| < tol_bc and assemble the profile.

    tol_brho is relative to brho_plus and bounds the final bracket width if
    the boundary tolerance is not hit first.
    """
    if grid is None:
        grid = RadialGrid(512)
    if box is None:
        box = build_parameter_box(model, G)
    box.check_mu(mu)

    lo = box.brho_lower(mu)
    hi = box.brho_plus
    res_lo = boundary_mismatch(model, lo, mu, G, grid, tol=tol_picard, box=box)
    res_hi = boundary_mismatch(model, hi, mu, G, grid, tol=tol_picard, box=box)
    if not (res_lo.value < 0.0 < res_hi.value):
        raise BracketFailure(
            f"mismatch signs at bracket ends are ({res_lo.value:+.3e}, "
            f"{res_hi.value:+.3e}); expected (-, +)"
        )

    best = res_lo if abs(res_lo.value) < abs(res_hi.value) else res_hi
    best_brho = lo if best is res_lo else hi
    bisections = 0
    width_tol = tol_brho * box.brho_plus
    while bisections < MAX_BISECTIONS:
        mid = 0.5 * (lo + hi)
        res = boundary_mismatch(model, mid, mu, G, grid, tol=tol_picard, box=box)
        bisections += 1
        if abs(res.value) < abs(best.value):
            best, best_brho = res, mid
        if abs(res.value) < tol_bc:
            break
        if res.value < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < width_tol:
            break

    geo = reconstruct_geometry(grid, best.zeta)
    return SolutionProfile(
        model=model,
        mu=mu,
        brho0=best_brho,
        G=G,
        grid=grid,
        zeta=best.zeta,
        f=geo.f,
        fprime=geo.fprime,
        lam=geo.lam,
        y=geo.y,
        fprime0=geo.fprime0,
        boundary_residual=best.value,
        diagnostics=best.diagnostics,
        bisection_iterations=bisections,
        box=box,
    )


@dataclass
class SweepRow:
    mu: float
    brho0: float = math.nan
    y1: float = math.nan
    fprime0: float = math.nan
    zeta_norm: float = math.nan
    iterations: int = 0
    bc_residual: float = math.nan
    error: str | None = None


def sweep(
    model: ConstitutiveModel,
    G: float,
    mu_values,
    grid: RadialGrid | None = None,
    tol_bc: float = DEFAULT_TOL_BC,
    tol_brho: float = DEFAULT_TOL_BRHO,
    tol_picard: float = DEFAULT_TOL,
    jobs: int = 1,
) -> list[SweepRow]:
    """One solve per mu, in input order; failures captured per row."""
    if grid is None:
        grid = RadialGrid(512)
    box = build_parameter_box(model, G)

    def run(mu: float) -> SweepRow:
        try:
            sol = solve_separable(
                model, mu, G, grid,
                tol_bc=tol_bc, tol_brho=tol_brho, tol_picard=tol_picard, box=box,
            )
        except Exception as exc:  # noqa: BLE001 - rows must not abort the sweep
            return SweepRow(mu=mu, error=f"{type(exc).__name__}: {exc}")
        return SweepRow(
            mu=mu,
            brho0=sol.brho0,
            y1=float(sol.y[-1]),
            fprime0=sol.fprime0,
            zeta_norm=float(np.max(np.abs(sol.zeta))),
            iterations=sol.diagnostics.iterations,
            bc_residual=sol.boundary_residual,
        )

    mu_list = [float(m) for m in mu_values]
    if jobs > 1 and len(mu_list) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(run, mu_list))
    return [run(mu) for mu in mu_list]

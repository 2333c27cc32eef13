"""Quick invariant checks run by ``appush check``."""

from __future__ import annotations

import math

import numpy as np

from ..diagnostics import l1_error
from ..fields import DiskField, UniformField
from ..geometry import Vec2, cayley_rotate, cayley_solve, perp
from ..reference import PhaseState, RefSolverConfig, reference_solve_stiff
from ..scheme_ap import AugmentedState, SchemeParams, ap_residual, ap_solve
from ..scheme_limit import LimitSchemeState, limit_solve


def _geometry(rng) -> tuple[bool, str]:
    worst = 0.0
    for _ in range(1000):
        a, a2 = rng.uniform(-50, 50, 2)
        z = Vec2(*rng.normal(size=2))
        nz = z.norm()
        worst = max(worst, abs(perp(z).norm() - nz) / nz)
        worst = max(worst, (perp(perp(z)) + z).norm() / nz)
        worst = max(worst, abs(cayley_solve(a, z).norm() * math.sqrt(1 + a * a) - nz) / nz)
        worst = max(worst, abs(cayley_rotate(a, z).norm() - nz) / nz)
        lhs = cayley_solve(a, z) - cayley_solve(a2, z)
        rhs = -cayley_solve(a, perp(cayley_solve(a2, z)) * (a - a2))
        worst = max(worst, (lhs - rhs).norm() / nz)
    return worst <= 1e-12, f"max relative defect {worst:.2e}"


def _field_derivatives(rng) -> tuple[bool, str]:
    m = DiskField()
    h = 1e-5
    worst = 0.0
    for _ in range(100):
        r = 9.0 * math.sqrt(rng.uniform())
        th = rng.uniform(0, 2 * math.pi)
        x = Vec2(r * math.cos(th), r * math.sin(th))
        for i, ei in enumerate((Vec2(h, 0.0), Vec2(0.0, h))):
            dphi = (m.phi(x + ei) - m.phi(x - ei)) / (2 * h)
            dib = (1 / m.b(x + ei) - 1 / m.b(x - ei)) / (2 * h)
            worst = max(worst, abs(-dphi - m.E(x)[i]), abs(dib - m.grad_inv_b(x)[i]))
    return worst <= 1e-6, f"max finite-difference gap {worst:.2e}"


def _l1_pseudometric(rng) -> tuple[bool, str]:
    ok = True
    for _ in range(50):
        a, b, c = (rng.normal(size=(9, 3)) for _ in range(3))
        ab, ba = l1_error(a, b), l1_error(b, a)
        ok &= ab == ba and l1_error(a, a) == 0.0
        ok &= l1_error(a, c) <= ab + l1_error(b, c) + 1e-14
    return bool(ok), "symmetry, identity and triangle inequality on random series"


def _ap_invariants() -> tuple[bool, str]:
    m = DiskField()
    p = SchemeParams(eps=0.1, dt=2.0**-6)
    tr = ap_solve(AugmentedState.from_phase((2.0, 2.0), (3.0, 3.0)), p, m)
    inv = tr.e + np.array([m.phi(x) for x in tr.x])
    energy_gap = float(np.max(np.abs(inv - inv[0])))
    ke = []
    raw = []
    for n in range(tr.n_steps):
        w0, w1 = Vec2(*tr.w[n]), Vec2(*tr.w[n + 1])
        xb = Vec2(*tr.x_bar[n])
        wb = Vec2(*tr.w_bar[n])
        lhs = p.eps * (w1.norm2() - w0.norm2()) - 2 * p.dt * m.E(xb).dot(wb)
        ke.append(abs(lhs))
        raw.append(max(ap_residual(tr.state(n), tr.state(n + 1), p, m)))
    ok = energy_gap <= 1e-10 and max(ke) <= 1e-11 and max(raw) <= 1e-11
    return ok, f"e+phi drift {energy_gap:.1e}, kinetic identity {max(ke):.1e}, raw residual {max(raw):.1e}"


def _limit_invariant() -> tuple[bool, str]:
    m = DiskField()
    tr = limit_solve(LimitSchemeState(Vec2(2.0, 2.0), 9.0), 2.0**-6, 1.0, m)
    inv = tr.g + np.array([m.phi(y) for y in tr.y])
    gap = float(np.max(np.abs(inv - inv[0])))
    return gap <= 1e-10, f"g+phi drift {gap:.1e}"


def _gyration() -> tuple[bool, str]:
    # b is constant so the ceiling gives no margin; 40 points per period is too coarse here
    cfg = RefSolverConfig(points_per_gyroperiod=200)
    ref = reference_solve_stiff(PhaseState(Vec2(0.0, 0.0), Vec2(1.0, 0.0)), 1.0, 2 * math.pi, UniformField(), cfg)
    err = float(np.linalg.norm(ref.v[-1] - [1.0, 0.0]))
    return err <= 1e-6, f"velocity after one gyroperiod off by {err:.1e}"


CHECKS = {
    "geometry identities": _geometry,
    "field derivatives": _field_derivatives,
    "l1 pseudometric": _l1_pseudometric,
    "AP scheme invariants": _ap_invariants,
    "limit scheme invariant": _limit_invariant,
    "reference gyration": _gyration,
}


def run_checks(seed: int = 0) -> list[tuple[str, bool, str]]:
    rng = np.random.default_rng(seed)
    out = []
    for name, fn in CHECKS.items():
        try:
            ok, detail = fn(rng) if fn.__code__.co_argcount else fn()
        except Exception as exc:  # a crash is a failed check, not a crashed command
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        out.append((name, ok, detail))
    return out

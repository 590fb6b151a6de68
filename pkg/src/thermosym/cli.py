"""Experiment runner: ``thermosym run --scenario NAME [--config FILE] [--set k=v ...] --out DIR``.

Every scenario produces a list of named checks (value, tolerance, pass) that
is written to ``report.json`` together with the resolved configuration.
Array-valued results go to CSV files next to it.

Exit status: 0 all checks pass, 1 some check failed, 2 usage error,
3 internal error.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Callable

import numpy as np
import yaml

from . import __version__
from .errors import ThermosymError, TruncationAccuracyError
from .fock import commutator, doubled_ops, make_fock_rep, window_norm
from .phase_space import (
    FPGrid,
    dispersions,
    equilibrium_gaussian,
    fp_build,
    fp_run,
    fp_scale_symmetry,
    fp_vs_fock_moments,
    gaussian_wigner,
    theta_from_zero_temperature,
    thermal_map_dispersions,
    velocity_from_b,
    velocity_from_beta,
    velocity_from_theta,
)
from .sectors import sector_eigenvalues, sparse_symmetry_check
from .spectral import (
    degeneracy_across_b,
    eigen_spectrum,
    evolve,
    extract_decay_rate,
    match_spectrum,
    stationary_state,
    thermal_populations,
)
from .superops import HPZParams, MMEParams, build_HPZ, build_K, build_K0, thermal_b
from .symmetry import (
    cl_builder,
    coth_ratio_scan,
    ekert_reduce,
    generator_G,
    hpz_builder,
    mme_builder,
    omega_check,
    rotation_U,
    su11_generators,
    su11_residuals,
    symmetry_check,
    symplectic_S,
    symplectic_S_closed,
    theta_from_b,
    transform_superop,
)

logger = logging.getLogger(__name__)


class UsageError(Exception):
    pass


@dataclass
class Check:
    name: str
    value: float | None
    tolerance: float
    comparison: str
    passed: bool
    paper_tag: str
    detail: str = ""

    def as_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        if d["value"] is not None and not math.isfinite(d["value"]):
            d["detail"] = (d["detail"] + f" (value {d['value']})").strip()
            d["value"] = None
        return d


def _cmp(name, value, tol, tag, comparison="<", detail="") -> Check:
    value = None if value is None else float(value)
    if value is None or math.isnan(value):
        ok = False
    elif comparison == "<":
        ok = value < tol
    elif comparison == "<=":
        ok = value <= tol
    elif comparison == ">":
        ok = value > tol
    else:
        raise ValueError(comparison)
    return Check(name, value, tol, comparison, ok, tag, detail)


def _guard(name, tol, tag, fn, comparison="<") -> Check:
    """Run ``fn`` and turn package errors into a failed check."""
    try:
        return _cmp(name, fn(), tol, tag, comparison)
    except ThermosymError as exc:
        return Check(name, getattr(exc, "residual", None), tol, comparison, False, tag, f"{type(exc).__name__}: {exc}")


def _similarity(name, builder, b, bp, dim, window, tol, tag) -> Check:
    """Budget-enforced similarity residual; an over-budget rotation is a failed check."""
    try:
        r = symmetry_check(builder, b, bp, dim, window)
        return _cmp(name, r.residual, tol, tag, detail=f"window={r.window}, action residual {r.action_residual:.3g}")
    except TruncationAccuracyError as exc:
        r = symmetry_check(builder, b, bp, dim, window, enforce_budget=False)
        return Check(
            name, r.residual, tol, "<", False, tag,
            f"rotation outside the truncation budget (action residual {exc.residual:.3g} on window {r.window}); "
            "the residual shown is dominated by truncation",
        )


# -- configuration schema ------------------------------------------------------

def _int2(v):
    if isinstance(v, bool) or not float(v).is_integer() or int(v) < 2:
        raise ValueError("must be an integer >= 2")
    return int(v)


def _opt_int(v):
    if v is None:
        return None
    if isinstance(v, bool) or not float(v).is_integer() or int(v) < 0:
        raise ValueError("must be a non-negative integer or null")
    return int(v)


def _pos(v):
    v = float(v)
    if not v > 0 or not math.isfinite(v):
        raise ValueError("must be a finite number > 0")
    return v


def _nonneg(v):
    v = float(v)
    if not v >= 0 or not math.isfinite(v):
        raise ValueError("must be a finite number >= 0")
    return v


def _bhalf(v):
    v = float(v)
    if not v >= 0.5 or not math.isfinite(v):
        raise ValueError("thermal parameter must be finite and >= 1/2")
    return v


def _real(v):
    v = float(v)
    if not math.isfinite(v):
        raise ValueError("must be finite")
    return v


def _opt(f):
    return lambda v: None if v is None else f(v)


def _bool(v):
    if not isinstance(v, bool):
        raise ValueError("must be true or false")
    return v


def _list(f):
    def conv(v):
        if not isinstance(v, (list, tuple)) or not v:
            raise ValueError("must be a non-empty list")
        return [f(x) for x in v]
    return conv


COMMON = {"seed": (_opt_int, 0)}


@dataclass(frozen=True)
class Scenario:
    schema: dict
    runner: Callable[[dict], tuple[list[Check], dict]]
    about: str


# -- scenarios -------------------------------------------------------------------

TAG_SIM = "thermal similarity K(b') = U(theta) K(b) U(theta)^dag"


def run_symmetry(c):
    checks = []
    N, M = c["N"], c["window"]
    M = N // 2 if M is None else M
    b, bp = c["b"], c["b_prime"]
    th = theta_from_b(b, bp)
    rep = make_fock_rep(N)

    rot = rotation_U(rep, th, M, enforce_budget=False)
    K0 = build_K0(rep, c["omega0"])
    d = transform_superop(K0, rot) - K0
    checks.append(_cmp("k0_symmetry", window_norm(d, N, M) / np.linalg.norm(K0.matrix), 1e-8,
                       "free evolution K0 is exactly invariant under U(theta)"))

    checks.append(_similarity("symmetry_residual", mme_builder(c["omega0"], c["gamma"]), b, bp, N, M, 1e-6, TAG_SIM))

    ta = c["theta_action"]
    try:
        rot_a = rotation_U(rep, ta, M)
        act, detail = rot_a.action_residual, ""
    except TruncationAccuracyError as exc:
        rot_a, act, detail = rotation_U(rep, ta, M, enforce_budget=False), exc.residual, "over truncation budget"
    checks.append(_cmp("bogoliubov_action", act, 1e-8,
                       "U A U^dag = cosh(theta) A - sinh(theta) At^dag", detail=f"theta={ta}, window={M} {detail}".strip()))
    ops = doubled_ops(rep)
    U, Ud = rot_a.U, rot_a.U.conj().T
    A, Ad, At, Atd = (U @ X @ Ud for X in (ops.A, ops.A_dag, ops.At, ops.At_dag))
    one = ops.identity
    comm = max(
        window_norm(commutator(A, Ad) - one, N, M),
        window_norm(commutator(At, Atd) - one, N, M),
        max(window_norm(commutator(x, y), N, M) for x in (A, Ad) for y in (At, Atd)),
    )
    checks.append(_cmp("bogoliubov_commutators", comm, 1e-8,
                       "Bogoliubov transformation preserves the doubled commutators", detail=f"window={M}"))

    N16 = c["su11_N"]
    rep16 = make_fock_rep(N16)
    alg = su11_generators(rep16)
    checks.append(_cmp("su11_algebra", max(su11_residuals(alg, N16, N16 - 4).values()), 1e-10,
                       "su(1,1) commutation relations of M0, M1, M2", detail=f"N={N16}, window={N16 - 4}"))
    checks.append(_cmp("g_equals_2m2", np.abs(generator_G(rep16) - 2 * alg.M2).max(), 0.0,
                       "G = 2 M2", comparison="<="))

    thetas = c["symplectic_thetas"]
    checks.append(_cmp("symplectic_omega", max(omega_check(symplectic_S(t)) for t in thetas), 1e-14,
                       "S(theta) Omega S(theta)^T = Omega"))
    checks.append(_cmp("symplectic_closed_form",
                       max(np.abs(symplectic_S(t) - symplectic_S_closed(t)).max() for t in thetas), 1e-14,
                       "exp(theta J) = blockdiag(R(theta), R(theta)^-1)"))

    checks.append(_similarity("cl_form_invariance", cl_builder(c["omega0"], c["gamma"]), c["b_cl"], c["b_cl_prime"],
                              N, M, 1e-6, "Caldeira-Leggett generator is form invariant under the thermal map"))

    try:
        rotation_U(rep, c["over_budget_theta"], M)
        checks.append(Check("over_budget_raises", None, 0.0, "raises", False, "truncation accuracy budget",
                            "an over-budget rotation returned silently"))
    except TruncationAccuracyError as exc:
        checks.append(Check("over_budget_raises", exc.residual, 0.0, "raises", True, "truncation accuracy budget",
                            "TruncationAccuracyError raised"))

    if c["converged"]:
        Nm, Nc = c["N_converged_mme"], c["N_converged_cl"]
        r = sparse_symmetry_check("mme", b, bp, Nm, M, omega0=c["omega0"], gamma=c["gamma"])
        checks.append(_cmp("symmetry_residual_converged", r.residual, 1e-6, TAG_SIM,
                           detail=f"N={Nm}, window={M}, action residual {r.action_residual:.3g}"))
        r = sparse_symmetry_check("cl", c["b_cl"], c["b_cl_prime"], Nc, M, omega0=c["omega0"], gamma1=c["gamma"])
        checks.append(_cmp("cl_form_invariance_converged", r.residual, 1e-6,
                           "Caldeira-Leggett generator is form invariant under the thermal map",
                           detail=f"N={Nc}, window={M}, action residual {r.action_residual:.3g}"))
    return checks, {}


def _spectrum_rows(rpt):
    rows = []
    for mm in rpt.matches:
        p = mm.mode
        rows.append([p.m, p.n, p.sign, p.z.real, p.z.imag, mm.computed.real, mm.computed.imag, mm.delta])
    return rows


SPECTRUM_HEADER = ["m", "n", "sign", "re_predicted", "im_predicted", "re_computed", "im_computed", "abs_delta"]
TAG_SPECTRUM = "z_mn = +/- n omega0 - i (m - n/2) gamma"


def run_spectrum(c):
    checks = []
    w0, g, b = c["omega0"], c["gamma"], c["b"]
    pw = w0 if c["predict_omega0"] is None else c["predict_omega0"]
    pg = g if c["predict_gamma"] is None else c["predict_gamma"]
    order = c["max_order"]
    tol = 1e-6 * (w0 + g)
    K = build_K(make_fock_rep(c["N"]), MMEParams(w0, g, b))
    comp = eigen_spectrum(K)
    rpt = match_spectrum(comp, pw, pg, order, tol)
    checks.append(_cmp("spectrum_match", rpt.max_delta, tol, TAG_SPECTRUM,
                       detail=f"N={c['N']}, m+n<={order}, {len(rpt.failures)} of {len(rpt.matches)} modes outside tolerance"))
    checks.append(_cmp("dissipativity", float(comp.imag.max()), 1e-10, "eigenvalues of iK lie in the lower half plane"))
    tables = {"spectrum.csv": (SPECTRUM_HEADER, _spectrum_rows(rpt))}

    if c["converged"]:
        Nc = c["N_converged"]
        rc = match_spectrum(sector_eigenvalues(Nc, MMEParams(w0, g, b), order), pw, pg, order, tol)
        checks.append(_cmp("spectrum_match_converged", rc.max_delta, tol, TAG_SPECTRUM,
                           detail=f"sector-resolved, N={Nc}, m+n<={order}"))
        tables["spectrum_converged.csv"] = (SPECTRUM_HEADER, _spectrum_rows(rc))

    Ns = c["N_stationary"]
    rep_s = make_fock_rep(Ns)

    def thermal_err():
        st = stationary_state(build_K(rep_s, MMEParams(w0, g, b)))
        return np.abs(st.matrix - np.diag(thermal_populations(b, Ns))).max()

    def vacuum_err():
        st = stationary_state(build_K(rep_s, MMEParams(w0, g, 0.5)))
        vac = np.zeros((Ns, Ns))
        vac[0, 0] = 1
        return np.abs(st.matrix - vac).max()

    checks.append(_guard("stationary_thermal", 1e-8, "stationary state is thermal with nbar = b - 1/2", thermal_err))
    checks.append(_guard("stationary_vacuum", 1e-8, "b = 1/2 stationary state is the vacuum", vacuum_err))
    return checks, tables


def run_degeneracy(c):
    checks = []
    w0, g, order = c["omega0"], c["gamma"], c["max_order"]
    tol = 1e-6 * (w0 + g)
    tag = "spectrum independent of the thermal parameter b"
    dist = degeneracy_across_b(mme_builder(w0, g), c["b_list"], c["N"], w0, g, order)
    checks.append(_cmp("b_degeneracy", dist, tol, tag, detail=f"N={c['N']}, b in {c['b_list']}"))
    if c["converged"]:
        Nc = c["N_converged"]
        spectra = []
        for b in c["b_list"]:
            r = match_spectrum(sector_eigenvalues(Nc, MMEParams(w0, g, b), order), w0, g, order, tol)
            spectra.append(np.array([mm.computed for mm in r.matches]))
        dist_c = max((np.abs(x - y).max() for i, x in enumerate(spectra) for y in spectra[i + 1:]), default=0.0)
        checks.append(_cmp("b_degeneracy_converged", dist_c, tol, tag, detail=f"sector-resolved, N={Nc}"))

    def hpz(rep, Gamma):
        return build_HPZ(rep, HPZParams(w0, g, c["hpz_b"], Gamma=Gamma))

    dist_h = degeneracy_across_b(hpz, c["hpz_Gamma_list"], c["N"], w0, g, order)
    checks.append(_cmp("hpz_gamma_control", dist_h, tol, "the Gamma term shifts the spectrum",
                       comparison=">", detail="negative control: must NOT be degenerate"))
    return checks, {}


def run_evolve(c):
    checks = []
    w0, g, N = c["omega0"], c["gamma"], c["N"]
    t_final = 5.0 / g if c["t_final"] is None else c["t_final"]
    t = np.linspace(0.0, t_final, c["n_times"])
    rep = make_fock_rep(N)
    K = build_K(rep, MMEParams(w0, g, c["b"]))
    K_vac = build_K(rep, MMEParams(w0, g, 0.5))

    one = np.zeros((N, N), dtype=complex)
    one[1, 1] = 1
    states = evolve(K_vac, one, t)
    p1 = np.array([s.matrix[1, 1].real for s in states])
    checks.append(_cmp("vacuum_channel_decay", np.abs(p1 - np.exp(-g * t)).max(), 1e-6,
                       "|1><1| population decays as exp(-gamma t) at b = 1/2"))

    def stat():
        rho = stationary_state(K).matrix
        return max(np.abs(s.matrix - rho).max() for s in evolve(K, rho, t))

    checks.append(_guard("stationary_invariance", 1e-8, "stationary state does not evolve", stat))

    alpha = c["alpha"]
    n = np.arange(N)
    coh = np.exp(-abs(alpha) ** 2 / 2) * alpha ** n / np.sqrt(np.array([math.factorial(k) for k in n], dtype=float))
    rho0 = np.outer(coh, coh.conj())
    states = evolve(K, rho0, t)
    mean_a = np.array([s.expect(rep.a) for s in states])
    target = complex(-g / 2, -w0)
    rate = extract_decay_rate(t, mean_a)
    checks.append(_cmp("mean_field_rate", abs(rate - target) / abs(target), 0.01,
                       "<a> evolves with rate -i omega0 - gamma/2", detail=f"fitted {rate:.6g}"))
    checks.append(_cmp("trace_preservation", max(abs(s.trace - 1) for s in states), 1e-8, "trace preserved"))
    coh_states = evolve(K_vac, rho0, t)
    r10 = np.array([s.matrix[1, 0] for s in coh_states])
    rate10 = extract_decay_rate(t, r10)
    checks.append(_cmp("coherence_rate", abs(rate10 - target) / abs(target), 0.01,
                       "<1|rho|0> decays at gamma/2 and rotates at omega0 (b = 1/2)", detail=f"fitted {rate10:.6g}"))
    rows = [[ti, a.real, a.imag, p] for ti, a, p in zip(t, mean_a, p1)]
    return checks, {"evolve.csv": (["t", "re_mean_a", "im_mean_a", "p1_vacuum_channel"], rows)}


def run_gaussian(c):
    checks = []
    b, bp = c["b"], c["b_prime"]
    tag_d = "<Q^2>_(r=0) = b and <r^2>_(Q=0) = 1/b"
    g = equilibrium_gaussian(b)
    dQ, dr = dispersions(g)
    checks.append(_cmp("dispersion_Q", abs(dQ - math.sqrt(b)), 1e-8, tag_d))
    checks.append(_cmp("dispersion_r", abs(dr - 1 / math.sqrt(b)), 1e-8, tag_d))
    th = theta_from_b(b, bp) if c["theta"] is None else c["theta"]
    dQp, drp = thermal_map_dispersions(g, th)
    bt = b * math.exp(2 * th)
    checks.append(_cmp("thermal_map_dispersions",
                       max(abs(dQp - math.sqrt(bt)), abs(drp - 1 / math.sqrt(bt))), 1e-8,
                       "transformed dispersions (e^theta dQ, e^-theta dr)"))
    checks.append(_cmp("uncertainty_product", max(abs(dQ * dr - 1), abs(dQp * drp - 1)), 1e-8, "dQ dr = 1"))
    xs = np.logspace(math.log10(c["beta_min"]), math.log10(c["beta_max"]), c["n_beta"])
    worst = 0.0
    for x in xs:
        bb = thermal_b(1.0, x, 1.0, 1.0)
        vals = (velocity_from_theta(theta_from_zero_temperature(bb)), velocity_from_b(bb), velocity_from_beta(x))
        worst = max(worst, max(vals) - min(vals))
    checks.append(_cmp("velocity_forms", worst, 1e-12,
                       "v = tanh(theta) = (b - 1/2)/(b + 1/2) = exp(-hbar omega0 beta)"))
    return checks, {}


def run_fokker_planck(c):
    checks = []
    w0, g, b, n, L = c["omega0"], c["gamma"], c["b"], c["n"], c["half_width"]
    tag = "Wigner-representation Fokker-Planck equation"
    init = gaussian_wigner((1.0, 0.0), ((0.5, 0.0), (0.0, 0.5)))
    grid = FPGrid.from_function(init, L, n)
    op = fp_build(w0, g, b, grid)
    t_grid = np.linspace(0.0, c["t_final"], c["n_records"])
    run = fp_run(op, grid, t_grid=t_grid)
    last = run.series[-1]
    checks.append(_cmp("steady_variance_Q", abs(last["Q2"] - last["Q"] ** 2 - b), 1e-3, tag))
    checks.append(_cmp("steady_variance_P", abs(last["P2"] - last["P"] ** 2 - b), 1e-3, tag))
    drift = max(abs(m["mass"] - 1.0) for m in run.series) / max(c["t_final"], 1e-300)
    checks.append(_cmp("mass_conservation", drift, 1e-6, "probability conserved (per unit time)"))
    checks.append(_cmp("scale_symmetry",
                       fp_scale_symmetry(w0, g, b, c["theta"], init, L, n, c["t_scale"]), 1e-3,
                       "b absorbed into a common scaling of (Q, P)"))
    rot_grid = FPGrid.from_function(gaussian_wigner((1.0, 0.5), ((0.5, 0.0), (0.0, 0.5))), L, n)
    rot = fp_run(fp_build(w0, 0.0, b, rot_grid), rot_grid, t_grid=[0.0, 2 * math.pi / w0])
    m0, m1 = rot.series
    checks.append(_cmp("rotation_second_moments",
                       max(abs(m1[k] - m0[k]) for k in ("Q2", "P2", "QP")), 1e-4, "gamma = 0 is a rigid rotation"))
    N = c["N_fock"]
    cmp = fp_vs_fock_moments(w0, g, b, np.diag(thermal_populations(b, N)).astype(complex), [0.0, 2.0, 5.0], n=n)
    checks.append(_cmp("fp_vs_fock_thermal", cmp.max_discrepancy, 1e-3, "Wigner and Fock moments agree"))
    rows = [[t, m["Q"], m["P"], m["Q2"], m["P2"], m["mass"]] for t, m in zip(run.times, run.series)]
    tables = {"fp_moments.csv": (["t", "<Q>", "<P>", "<Q^2>", "<P^2>", "mass"], rows)}
    if c["grid_csv"]:
        QQ, PP = np.meshgrid(run.grid.Q, run.grid.P, indexing="ij")
        tables["fp_grid.csv"] = (["Q", "P", "W"], np.column_stack([QQ.ravel(), PP.ravel(), run.grid.W.ravel()]).tolist())
    return checks, tables


def run_hpz_breaking(c):
    checks = []
    N, M = c["N"], c["window"]
    M = N // 2 if M is None else M
    w0, g2, b, bp = c["omega0"], c["gamma2"], c["b"], c["b_prime"]
    Gamma = 0.2 * g2 if c["Gamma"] is None else c["Gamma"]
    tag = "the Gamma term breaks form invariance"
    checks.append(_similarity_breaking(hpz_builder(HPZParams(w0, g2, b, Gamma=Gamma)), b, bp, N, M, tag))
    checks.append(_similarity("cl_control_residual", cl_builder(w0, g2), 2 * b, 2 * bp, N, M, 1e-6,
                              "Caldeira-Leggett generator is form invariant under the thermal map"))
    grid = np.linspace(c["omega_min"], c["omega_max"], c["n_omega"])
    tag_c = "coth ratio is frequency dependent unless T = T'"
    checks.append(_cmp("coth_scan_distinct", coth_ratio_scan(c["T"], c["T_prime"], w0, grid), 0.0, tag_c, ">"))
    checks.append(_cmp("coth_scan_equal", coth_ratio_scan(c["T"], c["T"], w0, grid), 0.0, tag_c, "<="))
    if c["converged"]:
        Nc = c["N_converged"]
        r = sparse_symmetry_check("hpz", b, bp, Nc, M, omega0=w0, gamma2=g2, Gamma=Gamma)
        checks.append(_cmp("hpz_symmetry_residual_converged", r.residual, 0.01, tag, ">", detail=f"N={Nc}, window={M}"))
        r = sparse_symmetry_check("cl", 2 * b, 2 * bp, Nc, M, omega0=w0, gamma1=g2)
        checks.append(_cmp("cl_control_converged", r.residual, 1e-6,
                           "Caldeira-Leggett generator is form invariant under the thermal map", detail=f"N={Nc}, window={M}"))
    return checks, {}


def _similarity_breaking(builder, b, bp, N, M, tag) -> Check:
    try:
        r = symmetry_check(builder, b, bp, N, M)
        return _cmp("hpz_symmetry_residual", r.residual, 0.01, tag, ">", detail=f"window={M}")
    except TruncationAccuracyError as exc:
        r = symmetry_check(builder, b, bp, N, M, enforce_budget=False)
        return Check("hpz_symmetry_residual", r.residual, 0.01, ">", False, tag,
                     f"rotation outside the truncation budget (action residual {exc.residual:.3g} on window {M})")


def run_ekert(c):
    checks = []
    c1, c2, c3 = c["c1"], c["c2"], complex(c["c3_re"], c["c3_im"])
    tag = "extended dissipator recast in standard form by an SU(1,1) map on (a, a^dag)"
    try:
        red = ekert_reduce(make_fock_rep(c["N"]), c1, c2, c3, tol=c["tol"])
    except ThermosymError as exc:
        return [Check("k3_coefficient", None, c["tol"], "<", False, tag, f"{type(exc).__name__}: {exc}")], {}
    checks.append(_cmp("k3_coefficient", red.residual, c["tol"], tag, detail=f"u={red.u:.12g}, v={red.v:.12g}"))
    checks.append(_cmp("tilde_commutator", red.tilde_commutator, 1e-12,
                       "reduction stays in the Hilbert-space factor"))
    closed = 2 * abs(c3) / (c1 + c2)
    checks.append(_cmp("closed_form_nu", abs(math.tanh(2 * red.nu) - closed), 1e-8, "tanh(2 nu) = 2|c3|/(c1 + c2)"))
    return checks, {}


def run_coth_scan(c):
    grid = np.linspace(c["omega_min"], c["omega_max"], c["n_omega"])
    dev = coth_ratio_scan(c["T"], c["T_prime"], c["omega0"], grid)
    tag = "coth ratio is frequency dependent unless T = T'"
    if c["T"] == c["T_prime"]:
        return [_cmp("coth_ratio_deviation", dev, 0.0, tag, "<=")], {}
    return [_cmp("coth_ratio_deviation", dev, 0.0, tag, ">")], {}


_DIM = {"N": (_int2, 24), "window": (_opt_int, None)}
_PHYS = {"omega0": (_pos, 1.0), "gamma": (_nonneg, 0.2)}

SCENARIOS: dict[str, Scenario] = {
    "symmetry": Scenario(
        {**_DIM, **_PHYS, "b": (_bhalf, 0.5), "b_prime": (_bhalf, 2.0), "theta_action": (_real, 0.3),
         "b_cl": (_pos, 1.0), "b_cl_prime": (_pos, 2.0), "su11_N": (_int2, 16),
         "symplectic_thetas": (_list(_real), [0.1, 0.7, 1.2]), "over_budget_theta": (_real, 2.0),
         "converged": (_bool, True), "N_converged_mme": (_int2, 100), "N_converged_cl": (_int2, 80)},
        run_symmetry, "thermal similarity, Bogoliubov action, su(1,1), symplectic, CL invariance"),
    "spectrum": Scenario(
        {"N": (_int2, 20), **_PHYS, "b": (_bhalf, 1.0), "max_order": (_opt_int, 8),
         "predict_omega0": (_opt(_pos), None), "predict_gamma": (_opt(_nonneg), None),
         "N_stationary": (_int2, 30), "converged": (_bool, True), "N_converged": (_int2, 120)},
        run_spectrum, "eigenvalues of iK against the closed form; stationary state"),
    "degeneracy": Scenario(
        {"N": (_int2, 20), **_PHYS, "b_list": (_list(_bhalf), [0.5, 1.0, 3.0]), "max_order": (_opt_int, 8),
         "converged": (_bool, True), "N_converged": (_int2, 400), "hpz_b": (_bhalf, 1.0),
         "hpz_Gamma_list": (_list(_real), [0.0, 0.04, 0.08])},
        run_degeneracy, "b-independence of the spectrum"),
    "evolve": Scenario(
        {"N": (_int2, 16), **_PHYS, "b": (_bhalf, 1.0), "t_final": (_opt(_pos), None),
         "n_times": (_int2, 101), "alpha": (_real, 0.05)},
        run_evolve, "time evolution and decay rates"),
    "gaussian": Scenario(
        {"b": (_bhalf, 0.5), "b_prime": (_bhalf, 2.0), "theta": (_opt(_real), None),
         "beta_min": (_pos, 1e-3), "beta_max": (_pos, 10.0), "n_beta": (_int2, 200)},
        run_gaussian, "equilibrium Gaussian dispersions and velocity parameter"),
    "fokker-planck": Scenario(
        {**_PHYS, "b": (_bhalf, 1.0), "n": (_int2, 129), "half_width": (_pos, 8.0), "t_final": (_pos, 80.0),
         "n_records": (_int2, 41), "theta": (_real, 0.3), "t_scale": (_pos, 3.0), "N_fock": (_int2, 30),
         "grid_csv": (_bool, False)},
        run_fokker_planck, "Wigner-function solver: steady state, scale symmetry, Fock cross-check"),
    "hpz-breaking": Scenario(
        {**_DIM, "omega0": (_pos, 1.0), "gamma2": (_nonneg, 0.2), "Gamma": (_opt(_real), None),
         "b": (_bhalf, 1.0), "b_prime": (_bhalf, 2.0), "T": (_nonneg, 1.0), "T_prime": (_nonneg, 2.0),
         "omega_min": (_pos, 0.1), "omega_max": (_pos, 10.0), "n_omega": (_int2, 200),
         "converged": (_bool, True), "N_converged": (_int2, 80)},
        run_hpz_breaking, "symmetry breaking by the Gamma term"),
    "ekert": Scenario(
        {"N": (_int2, 12), "c1": (_nonneg, 0.3), "c2": (_nonneg, 0.1), "c3_re": (_real, 0.02),
         "c3_im": (_real, 0.0), "tol": (_pos, 1e-10)},
        run_ekert, "reduction of the squeezed-bath dissipator"),
    "coth-scan": Scenario(
        {"omega0": (_pos, 1.0), "T": (_nonneg, 1.0), "T_prime": (_nonneg, 1.0), "omega_min": (_pos, 0.1),
         "omega_max": (_pos, 10.0), "n_omega": (_int2, 200)},
        run_coth_scan, "frequency dependence of the coth ratio"),
}


def resolve_config(scenario: str, values: dict) -> dict:
    """Apply defaults and validate; raises :class:`UsageError` listing every bad field."""
    if scenario not in SCENARIOS:
        raise UsageError(f"unknown scenario {scenario!r}; choose from {', '.join(SCENARIOS)}")
    schema = {**COMMON, **SCENARIOS[scenario].schema}
    errors = [f"{k}: unknown field for scenario {scenario!r}" for k in values if k not in schema]
    out = {}
    for key, (conv, default) in schema.items():
        raw = values.get(key, default)
        try:
            out[key] = conv(raw) if raw is not None or default is not None else None
        except (TypeError, ValueError) as exc:
            errors.append(f"{key}: {exc} (got {raw!r})")
    if errors:
        raise UsageError("invalid configuration:\n  " + "\n  ".join(errors))
    return out


def run(scenario: str, values: dict | None = None) -> dict:
    """Run a scenario and return the report as a dictionary."""
    config = resolve_config(scenario, dict(values or {}))
    start = time.perf_counter()
    checks, tables = SCENARIOS[scenario].runner(config)
    names = [ch.name for ch in checks]
    if len(set(names)) != len(names):
        raise RuntimeError(f"duplicate check names in {scenario}: {names}")
    return {
        "scenario": scenario,
        "version": __version__,
        "config": config,
        "seed": config["seed"],
        "checks": [ch.as_dict() for ch in checks],
        "passed": all(ch.passed for ch in checks),
        "wall_time_s": time.perf_counter() - start,
        "_tables": tables,
    }


def emit_report(report: dict, out_dir) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    body = {k: v for k, v in report.items() if k != "_tables"}
    path = out / "report.json"
    path.write_text(json.dumps(body, indent=2) + "\n")
    written.append(path)
    for name, (header, rows) in report.get("_tables", {}).items():
        p = out / name
        with p.open("w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(header)
            wr.writerows(rows)
        written.append(p)
    return written


def _parse_set(items: list[str]) -> dict:
    out = {}
    for item in items:
        if "=" not in item:
            raise UsageError(f"--set expects key=value, got {item!r}")
        key, raw = item.split("=", 1)
        out[key.strip()] = yaml.safe_load(raw)
    return out


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        data = yaml.safe_load(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise UsageError(f"cannot parse config {path}: {exc}") from exc
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise UsageError(f"config {path} must be a mapping")
    return data


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="thermosym", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run a verification scenario")
    r.add_argument("--scenario", help="scenario name (may also come from the config file)")
    r.add_argument("--config", help="YAML or JSON file of key: value pairs")
    r.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override a config field")
    r.add_argument("--out", default="thermosym-out", help="output directory")
    sub.add_parser("list", help="list scenarios")
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    if args.command == "list":
        for name, sc in SCENARIOS.items():
            print(f"{name:15s} {sc.about}")
        return 0
    try:
        values = _load_config(args.config)
        values.update(_parse_set(args.set))
        scenario = args.scenario or values.pop("scenario", None)
        values.pop("scenario", None)
        if scenario is None:
            raise UsageError("no scenario given (use --scenario or a 'scenario' config field)")
        report = run(scenario, values)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        logger.exception("internal error")
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    try:
        emit_report(report, args.out)
    except OSError as exc:
        print(f"cannot write report: {exc}", file=sys.stderr)
        return 3
    for ch in report["checks"]:
        status = "PASS" if ch["pass"] else "FAIL"
        print(f"{status} {ch['name']}: value={ch['value']} {ch['comparison']} {ch['tolerance']}")
    return 0 if report["passed"] else 1


if __name__ == "__main__":
    sys.exit(main())

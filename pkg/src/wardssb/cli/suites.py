"""Check suites, report rows and table emission."""

from __future__ import annotations

import csv
import io
import os
import time
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from ..errors import ChannelAbsentError
from ..fock_model import (
    ModeGrid,
    Order,
    build_basis,
    build_hamiltonian,
    charge_locality_scan,
    charge_operator,
    commutator,
    field_at_point,
    mode_field,
    restrict,
    time_evolved_charge_commutator,
)
from ..lie_rep import levi_civita, su2_adjoint, su2_fundamental, trivial_rep, we_residual
from ..ward_engine import (
    cpt_channel_consistency,
    generalized_we_check,
    goldstone_overlaps,
    multiplet_elements,
    multiplet_ssb_terms,
    oracle_splitting,
    pseudo_goldstone_gap,
    random_operator_triples,
    selection_rule_check,
    splitting_via_ward,
)
from .config import RunConfig

CHECK_COLUMNS = ("check", "lambda", "v", "mu", "lhs", "rhs", "residual", "pass")
DISPERSION_COLUMNS = ("channel", "kx", "ky", "kz", "omega")
PHASE_LAW_NMAX = 5  # odd: phi_1 pair ladder truncates alike in both phi_2 sectors
ALGEBRA_NMAX = 5

HamiltonianHook = Callable  # (H, basis, params) -> SparseOperator


@dataclass
class ReportRow:
    """One check outcome; ``passed`` is ``residual < tolerance``.

    Report-only rows (``asserted=False``) never change the exit code.
    ``wall_time`` is kept in memory only so that written tables stay
    byte-identical.
    """

    check: str
    lam: float
    v: float
    mu: float
    lhs: float
    rhs: float
    residual: float
    tolerance: float
    asserted: bool = True
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return bool(self.residual < self.tolerance)


@dataclass
class SuiteResult:
    rows: list
    dispersion: list  # (channel, k-vector, omega)
    exit_code: int

    def __iter__(self):
        return iter((self.rows, self.exit_code))


class _Recorder:
    def __init__(self):
        self.rows: list[ReportRow] = []

    def add(self, check, params, lhs, rhs, residual, tol, asserted=True, started=None):
        wall = time.perf_counter() - started if started is not None else 0.0
        self.rows.append(ReportRow(check, params.lam, params.v, params.mu, float(lhs), float(rhs),
                                   float(residual), float(tol), asserted, wall))


def exit_code_for(rows) -> int:
    return 0 if all(r.passed for r in rows if r.asserted) else 1


# --------------------------------------------------------------------------
# suites


def _we_suite(cfg: RunConfig, rec: _Recorder):
    tol = cfg.tolerance
    dbl = su2_fundamental()
    for v_case, tag in ((0.0, "unbroken"), (cfg.model.v, "broken")):
        params = replace(cfg.model, v=v_case, dim=1, modes_per_axis=1, n_max=max(cfg.model.n_max, 6))
        t0 = time.perf_counter()
        basis = build_basis(params)
        H = build_hamiltonian(basis, params, Order.FULL, shifted=True, include_mu=False)
        vac = basis.vacuum()
        Bs = [field_at_point(basis, params, s, [0.0], shifted=True) for s in (1, 2)]
        Cs = [B.dag() for B in Bs]
        Qs = [charge_operator(basis, params, a) for a in (1, 2, 3)]
        for fam, As, rep_op in (("H", [H], trivial_rep()), ("Q", Qs, su2_adjoint())):
            elems = multiplet_elements(Bs, As, Cs, vac, dbl.conjugate(), rep_op, dbl.conjugate())
            for a in (1, 2, 3):
                R = we_residual(elems, a)
                ssb = multiplet_ssb_terms(Bs, As, Cs, Qs[a - 1], vac)
                name = f"we_{tag}_{fam}_a{a}"
                if tag == "unbroken":
                    rec.add(name + "_residual", params, np.abs(R).max(), 0.0, np.abs(R).max(), tol.identity, started=t0)
                    rec.add(name + "_ssb", params, np.abs(ssb).max(), 0.0, np.abs(ssb).max(), tol.exact, started=t0)
                else:
                    rec.add(name + "_residual_vs_ssb", params, np.abs(R).max(), np.abs(ssb).max(),
                            np.abs(R - ssb).max(), tol.identity, started=t0)

    # the example triple on the broken vacuum
    params = cfg.model
    t0 = time.perf_counter()
    basis = build_basis(params, n_max=max(params.n_max, 4))
    H = build_hamiltonian(basis, params, Order.TREE, shifted=True)
    z = basis.grid.zero
    B = mode_field(basis, params, 1, z, shifted=True)
    C = mode_field(basis, params, 2, z, shifted=True).dag()
    rep = generalized_we_check(B, H, C, charge_operator(basis, params, 1), basis.vacuum(), a=1)
    rec.add("generalized_identity_example", params, rep.lhs.real, (rep.symmetric_rhs + rep.ssb_term).real,
            rep.residual_algebraic, tol.identity, started=t0)

    # randomized triples on a small basis
    params = replace(cfg.model, dim=1, modes_per_axis=1, n_max=4)
    t0 = time.perf_counter()
    basis = build_basis(params)
    vac = basis.vacuum()
    charges = [charge_operator(basis, params, a) for a in (1, 2, 3)]
    rng = np.random.default_rng(cfg.seed)
    worst = 0.0
    for i, (B, A, C) in enumerate(random_operator_triples(basis, cfg.random_triples, rng)):
        a = 1 + i % 3
        worst = max(worst, generalized_we_check(B, A, C, charges[a - 1], vac, a=a).residual_algebraic)
    rec.add(f"generalized_identity_random_x{cfg.random_triples}", params, worst, 0.0, worst, tol.identity, started=t0)


def _splitting_row(rec, name, params, tol, hook):
    t0 = time.perf_counter()
    basis = build_basis(params, n_max=max(params.n_max, 4))
    H = None
    if hook is not None:
        H = hook(build_hamiltonian(basis, params, Order.TREE, shifted=True), basis, params)
    res = splitting_via_ward(params, basis, hamiltonian=H)
    residual = max(res.residual, abs(res.lhs - res.expected))
    rec.add(name, params, res.lhs, res.rhs, residual, tol, started=t0)
    return res


def _ward_suite(cfg: RunConfig, rec: _Recorder, hook, assert_oracle):
    tol = cfg.tolerance
    params = cfg.model
    res = _splitting_row(rec, "splitting", params, tol.identity, hook)
    rec.add("splitting_tadpole_vs_ssb", params, res.tadpole_term.imag, res.ssb_term.imag,
            abs(res.tadpole_term - res.ssb_term), tol.identity)
    if res.tadpole_smallest_k is not None:
        rec.add("splitting_tadpole_smallest_k", params, res.tadpole_smallest_k.imag, res.tadpole_term.imag,
                abs(res.tadpole_smallest_k - res.tadpole_term), tol.identity, asserted=False)

    # v -> 0: both correction terms scale like v^2
    scaled = []
    for v in (0.1, 0.01, 0.001):
        r = splitting_via_ward(replace(params, v=v))
        scaled.append((v, r.ssb_term / v**2, r.tadpole_term / v**2))
    ref = scaled[0][1]
    for v, s, t in scaled:
        rec.add(f"unbroken_limit_v{v:g}", replace(params, v=v), abs(s), abs(ref),
                max(abs(s - ref), abs(t - ref)), tol.identity)

    # gap and dispersion on the overlap grid
    grid_params = replace(params, modes_per_axis=cfg.overlap_modes_per_axis)
    t0 = time.perf_counter()
    table = pseudo_goldstone_gap(grid_params)
    rec.add("gap_phi2", params, table.gap("phi2"), params.mu, abs(table.gap("phi2") - params.mu), tol.exact, started=t0)
    ksq = np.sum(table.momenta("phi2") ** 2, axis=1)
    disp = np.abs(table.omega("phi2") - table.gap("phi2") - ksq / (2 * params.m)).max()
    rec.add("dispersion_phi2_quadratic", params, disp, 0.0, disp, tol.identity, started=t0)

    t0 = time.perf_counter()
    try:
        ov = goldstone_overlaps(grid_params)
    except ChannelAbsentError:
        # nothing couples the vacuum to phi_2 when v = 0
        rec.add("goldstone_channel_absent", params, 0.0, 0.0, 0.0, tol.exact, started=t0)
    else:
        target = -0.5j * params.v
        rec.add("goldstone_F", params, ov.F[ov.zero].imag, target.imag, np.abs(ov.F - target).max(),
                tol.identity, started=t0)
        # conservation holds for the symmetric current only, so mu is dropped here
        sym = replace(grid_params, mu=0.0)
        cc = goldstone_overlaps(sym).current_conservation_residuals()
        worst = float(cc.max()) if cc.size else 0.0
        rec.add("current_conservation", sym, worst, 0.0, worst, tol.identity, started=t0)
        cpt = cpt_channel_consistency(ov)
        rec.add("cpt_channel_consistency", params, cpt, 0.0, cpt, tol.identity, started=t0)

        # whole-box limit of the local charge (one-quantum basis is exact here)
        basis1 = build_basis(grid_params, n_max=1)
        A = field_at_point(basis1, grid_params, 2, np.zeros(grid_params.dim))
        diameter = grid_params.box_length * np.sqrt(grid_params.dim)
        (_, val), = charge_locality_scan(grid_params, 1, A, [diameter], basis=basis1)
        rec.add("locality_scan_whole_box", params, val.imag, 0.5 * params.v,
                abs(val - 0.5j * params.v), tol.identity, started=t0)

    t0 = time.perf_counter()
    rows, grading = selection_rule_check(params)
    forbidden = [abs(val) for _, q, val in rows if q != 0]
    z = ModeGrid.from_params(params).zero
    example = next(abs(val) for lbl, _, val in rows if lbl == f"<psi1[{z}] H psi2+[{z}]>")
    rec.add("selection_psi1_H_psi2dag", params, example, 0.0, example, tol.exact, started=t0)
    rec.add("selection_forbidden_max", params, max(forbidden), 0.0, max(forbidden), tol.exact, started=t0)
    rec.add("selection_grading", params, len(grading), 1.0, 0.0 if grading == {0} else 1.0, tol.exact, started=t0)

    _phase_law_rows(cfg, rec)
    _algebra_rows(cfg, rec)

    orc = cfg.oracle
    bound = assert_oracle if assert_oracle is not None else orc.assert_bound
    oparams = replace(params, lam=orc.lam, v=orc.v, dim=1, modes_per_axis=1, n_max=orc.n_max)
    t0 = time.perf_counter()
    o = oracle_splitting(oparams)
    rec.add("oracle_splitting", oparams, o.exact, o.tree, o.deviation,
            bound if bound is not None else o.bound, asserted=bound is not None, started=t0)


def _phase_law_rows(cfg: RunConfig, rec: _Recorder):
    params = replace(cfg.model, dim=1, modes_per_axis=1, n_max=PHASE_LAW_NMAX)
    basis = build_basis(params)
    A = field_at_point(basis, params, 2, [0.0]).dag()
    Q = charge_operator(basis, params, 1)
    t0 = time.perf_counter()
    base = time_evolved_charge_commutator(basis, params, 1, A, 0.0, Q=Q)
    for tm in (0.1, 0.5, 1.0):
        t = tm / params.mu if params.mu > 0 else tm
        val = time_evolved_charge_commutator(basis, params, 1, A, t, Q=Q)
        ratio = val / base
        expected = np.exp(-1j * params.mu * t)
        rec.add(f"phase_law_t{tm:g}", params, ratio.real, expected.real, abs(ratio - expected),
                cfg.tolerance.exponential, started=t0)


def _algebra_rows(cfg: RunConfig, rec: _Recorder):
    params = replace(cfg.model, n_max=max(cfg.model.n_max, ALGEBRA_NMAX))
    t0 = time.perf_counter()
    basis = build_basis(params)
    Qs = [charge_operator(basis, params, a) for a in (1, 2, 3)]
    eps = levi_civita()
    worst = 0.0
    mask1 = basis.safe_mask(1)
    for a in range(3):
        for b in range(3):
            diff = commutator(Qs[a], Qs[b])
            for c in range(3):
                if eps[a, b, c]:
                    diff = diff + Qs[c] * (1j * eps[a, b, c])
            worst = max(worst, np.abs(restrict(diff, mask1)).max())
    rec.add("charge_algebra", params, worst, 0.0, worst, cfg.tolerance.identity, started=t0)

    t0 = time.perf_counter()
    Hs = build_hamiltonian(basis, params, Order.FULL, shifted=True, include_mu=False)
    mask3 = basis.safe_mask(3)
    worst = max(np.abs(restrict(commutator(Q, Hs), mask3)).max() for Q in Qs)
    rec.add("charge_conservation", params, worst, 0.0, worst, cfg.tolerance.identity, started=t0)


def _sweep_suite(cfg: RunConfig, rec: _Recorder, hook):
    for lam in cfg.sweep_lambda:
        for v in cfg.sweep_v:
            for mu in cfg.sweep_mu:
                _splitting_row(rec, "splitting_sweep", replace(cfg.model, lam=lam, v=v, mu=mu),
                               cfg.tolerance.identity, hook)


def dispersion_rows(cfg: RunConfig):
    params = replace(cfg.model, modes_per_axis=cfg.overlap_modes_per_axis)
    table = pseudo_goldstone_gap(params)
    return [(c, np.pad(k, (0, 3 - k.size)), w) for c, k, w in table.rows]


def run_suite(config: RunConfig, suite: str | None = None, hamiltonian_hook: HamiltonianHook | None = None,
              assert_oracle: float | None = None) -> SuiteResult:
    """Run one suite in a fixed order and collect its rows.

    ``hamiltonian_hook(H, basis, params)`` may replace the Hamiltonian used
    by the splitting checks; it exists to exercise the failure path.
    Capacity and solver errors propagate to the caller.
    """
    suite = suite or config.suite
    rec = _Recorder()
    dispersion = []
    if suite in ("we-check", "all"):
        _we_suite(config, rec)
    if suite in ("ward", "all"):
        _ward_suite(config, rec, hamiltonian_hook, assert_oracle)
    if suite in ("sweep", "all"):
        _sweep_suite(config, rec, hamiltonian_hook)
    if suite in ("spectrum", "all"):
        dispersion = dispersion_rows(config)
        if suite == "spectrum":
            table = pseudo_goldstone_gap(replace(config.model, modes_per_axis=config.overlap_modes_per_axis))
            gap = table.gap("phi2")
            rec.add("gap_phi2", config.model, gap, config.model.mu, abs(gap - config.model.mu),
                    config.tolerance.exact)
    return SuiteResult(rec.rows, dispersion, exit_code_for(rec.rows))


# --------------------------------------------------------------------------
# output


def _fmt(x: float) -> str:
    x = float(x)
    return "%.11e" % (0.0 if x == 0 else x)


def check_table(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CHECK_COLUMNS)
    for r in rows:
        w.writerow([r.check, _fmt(r.lam), _fmt(r.v), _fmt(r.mu), _fmt(r.lhs), _fmt(r.rhs),
                    _fmt(r.residual), "true" if r.passed else "false"])
    return buf.getvalue()


def dispersion_table(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(DISPERSION_COLUMNS)
    for channel, k, omega in rows:
        w.writerow([channel, *(_fmt(c) for c in k), _fmt(omega)])
    return buf.getvalue()


def summary_text(rows, suite: str, exit_code: int) -> str:
    lines = [f"suite: {suite}"]
    width = max((len(r.check) for r in rows), default=5)
    for r in rows:
        flag = "PASS" if r.passed else "FAIL"
        note = "" if r.asserted else "  [report-only]"
        lines.append(f"{flag}  {r.check:<{width}}  lambda={r.lam:g} v={r.v:g} mu={r.mu:g}  "
                     f"residual={r.residual:.3e} tol={r.tolerance:.1e}{note}")
    asserted = [r for r in rows if r.asserted]
    failed = sum(not r.passed for r in asserted)
    lines.append(f"{len(asserted) - failed}/{len(asserted)} asserted checks passed; exit code {exit_code}")
    return "\n".join(lines) + "\n"


def emit_tables(result: SuiteResult, path, suite: str = "all") -> list[str]:
    """Write ``results.csv`` and ``report.txt`` (plus ``dispersion.csv`` for ``all``).

    The spectrum suite writes the dispersion schema to ``results.csv``.
    Returns the written paths.
    """
    path = os.fspath(path)
    files = {"report.txt": summary_text(result.rows, suite, result.exit_code)}
    if suite == "spectrum":
        files["results.csv"] = dispersion_table(result.dispersion)
    else:
        files["results.csv"] = check_table(result.rows)
        if result.dispersion:
            files["dispersion.csv"] = dispersion_table(result.dispersion)
    written = []
    try:
        os.makedirs(path, exist_ok=True)
        for name, text in files.items():
            target = os.path.join(path, name)
            with open(target, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
            written.append(target)
    except OSError as exc:
        raise OSError(f"cannot write output under {path!r}: {exc}") from exc
    return written

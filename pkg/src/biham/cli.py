"""Batch front-end: parse a problem-spec JSON, dispatch to the analysis
modules, emit a deterministic JSON report plus plot-ready CSV data (and,
optionally, rendered figures).

Exit status: 0 when every requested check passed, 1 when a check failed
(the report is still written), 2 on spec/parse errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .constants import ModelConstants
from .gqm import (
    PureState,
    bloch_geometry,
    deformed_fock,
    gns_construct,
    k_deformed_algebra,
    quadratic_bracket_check,
    superpose,
)
from .linalg import matrix_from_json, matrix_to_json, spectral_decompose
from .lineardyn import (
    ConstantSymplectic,
    LinearVectorField,
    NotHamiltonianForThisStructure,
    commutant_deformation,
    factorize,
    hamiltonicity_test,
    hierarchy,
)
from .moyal import classical_deformed_bracket, moyal_bracket_poly, moyal_product_poly
from .polynomials import PhasePolynomial, poisson_bracket_poly
from .recursion import TensorField11, invariant_chain, recursion_from_pair
from .reports import Report, write_csv
from .structures import (
    HermitianForm,
    compatibility_analysis,
    complete_triple,
    pseudo_hermitian_metric,
)
from .wigner import (
    GridFunction,
    PhaseGrid,
    classical_kms_check,
    mehler_gibbs_kernel,
    oscillator_gibbs_wigner,
    wigner_transform,
)

COMMANDS = ("analyze-linear", "triple", "compat", "recursion",
            "gqm", "wigner", "moyal", "kms")


class SpecError(ValueError):
    """Malformed or inconsistent problem spec (exit status 2)."""


def _require(payload: dict, key: str):
    if key not in payload:
        raise SpecError(f"spec is missing required field '{key}'")
    return payload[key]


def _poly(payload, n_dof: int) -> PhasePolynomial:
    return PhasePolynomial.from_json(n_dof, payload)


def _constants(payload: dict) -> ModelConstants:
    return ModelConstants(
        hbar=float(payload.get("hbar", 1.0)), mass=float(payload.get("mass", 1.0)),
        omega=float(payload.get("omega", 1.0)), beta=float(payload.get("beta", 1.0)))


# ---------------------------------------------------------------------------
# command handlers: payload -> Report (with plot_data attached)
# ---------------------------------------------------------------------------

def _cmd_analyze_linear(payload: dict, report: Report, rng) -> None:
    G = np.real(matrix_from_json(_require(payload, "G")))
    field = LinearVectorField(G)
    kmax = int(payload.get("kmax", G.shape[0] // 2))

    verdict = hamiltonicity_test(field, kmax=max(kmax, G.shape[0] // 2))
    report.verdicts.update(trace_ok=verdict.trace_ok,
                           eigen_pairing_ok=verdict.eigen_pairing_ok,
                           jordan_ok=verdict.jordan_ok,
                           hamiltonian=verdict.hamiltonian)
    report.add_residual("max_odd_trace", max(verdict.trace_residuals))

    spec = spectral_decompose(G)
    report.plot_data["spectrum"] = np.stack(
        [spec.eigenvalues.real, spec.eigenvalues.imag], axis=1)

    if "Omega" in payload:
        omega = ConstantSymplectic(np.real(matrix_from_json(payload["Omega"])))
    else:
        omega = ConstantSymplectic.standard(G.shape[0] // 2)
    try:
        H = factorize(field, omega)
        report.verdicts["factorizable"] = True
        report.scalars["H"] = matrix_to_json(H.H)
        chain = hierarchy(field, omega, kmax=kmax)
        report.add_residual("involution_max", float(np.max(chain.involution_residuals)))
        report.add_residual("commutation_max", float(np.max(chain.commutation_residuals)))
        m = len(chain.entries)
        rows = [(k, l, chain.involution_residuals[k, l])
                for k in range(m) for l in range(m)]
        report.plot_data["involution-residuals"] = rows
        if "T" in payload:
            T = np.real(matrix_from_json(payload["T"]))
            omega2, H2, canonical = commutant_deformation(field, omega, T)
            report.scalars["deformation_canonical"] = canonical
            report.scalars["Lambda_prime"] = matrix_to_json(omega2.Lambda)
            report.scalars["H_prime"] = matrix_to_json(H2.H)
            report.add_residual("deformation_reconstruction",
                                float(np.linalg.norm(G + omega2.Lambda @ H2.H)))
    except NotHamiltonianForThisStructure as exc:
        report.verdicts["factorizable"] = False
        report.add_residual("factorization_asymmetry", exc.asymmetry)


def _cmd_triple(payload: dict, report: Report, rng) -> None:
    if "lambda" in payload:
        # chart evaluations: {"lambda": x, "points": [[q, p], ...]}
        from .structures import nonlinear_chart
        ch = nonlinear_chart(float(payload["lambda"]))
        rows = []
        for q, p in _require(payload, "points"):
            r = float(np.hypot(q, p))
            Q, Pm = ch.forward(q, p)
            q2, p2 = ch.backward(Q, Pm)
            rows.append({"q": q, "p": p, "K": ch.K(r), "Q": Q, "P": Pm,
                         "round_trip": abs(q2 - q) + abs(p2 - p)})
        report.scalars["chart"] = rows
        report.add_residual("chart_round_trip_max",
                            max(r["round_trip"] for r in rows))
        report.verdicts["chart_ok"] = True
        return
    kwargs = {}
    for name in ("g", "J", "omega"):
        if name in payload:
            kwargs[name] = np.real(matrix_from_json(payload[name]))
    triple = complete_triple(**kwargs)
    report.verdicts["admissible"] = True
    report.scalars["pseudo_kahler"] = triple.pseudo_kahler
    for name, M in (("g", triple.g), ("J", triple.J), ("omega", triple.omega)):
        report.scalars[name] = matrix_to_json(M)
    n2 = triple.g.shape[0]
    report.add_residual("J_squared",
                        float(np.linalg.norm(triple.J @ triple.J + np.eye(n2))))
    report.add_residual("compatibility",
                        float(np.linalg.norm(triple.J.T @ triple.omega + triple.omega @ triple.J)))


def _cmd_compat(payload: dict, report: Report, rng) -> None:
    h1 = HermitianForm(matrix_from_json(_require(payload, "h1")))
    h2 = HermitianForm(matrix_from_json(_require(payload, "h2")))
    conn = compatibility_analysis(h1, h2)
    report.scalars["generic"] = conn.generic
    report.scalars["commutant_dim"] = conn.commutant_dim
    report.scalars["blocks"] = [
        {"eigenvalue": b["eigenvalue"], "dim": b["dim"], "sign": b["sign"]}
        for b in conn.blocks]
    report.add_residual("block_g_ratio_max",
                        max(b["g_ratio_residual"] for b in conn.blocks))
    report.add_residual("block_omega_ratio_max",
                        max(b["omega_ratio_residual"] for b in conn.blocks))
    F = conn.F
    report.plot_data["spectrum"] = np.stack(
        [np.linalg.eigvals(F).real, np.linalg.eigvals(F).imag], axis=1)


def _cmd_recursion(payload: dict, report: Report, rng) -> None:
    if "T_components" in payload:
        # polynomial (1,1) tensor spec: torsion norms at supplied points
        from .polynomials import PhasePolynomial
        from .recursion import nijenhuis_torsion
        comp = payload["T_components"]
        n = len(comp)
        ring = (n + 1) // 2
        entries = [[PhasePolynomial.from_json(ring, cell) if isinstance(cell, list)
                    else float(cell) for cell in row] for row in comp]
        T = TensorField11.from_polynomials(entries)
        points = payload.get("points", [[0.0] * n])
        norms = []
        for x in points:
            N = nijenhuis_torsion(T, x)
            norms.append({"point": list(x), "torsion_norm": float(np.linalg.norm(N))})
        report.scalars["torsion"] = norms
        report.verdicts["torsion_free"] = all(r["torsion_norm"] <= 1e-12 for r in norms)
        return
    om1 = np.real(matrix_from_json(_require(payload, "omega1")))
    om2 = np.real(matrix_from_json(_require(payload, "omega2")))
    T, verdict = recursion_from_pair(om1, om2)
    report.verdicts.update(strong=verdict.strong, torsion_free=verdict.torsion_free,
                           omega_compatible=verdict.omega_compatible)
    report.scalars["kernel_dim"] = verdict.kernel_dim
    report.scalars["T"] = matrix_to_json(T.matrix())
    report.add_residual("compatibility", verdict.compatibility_residual)
    if "H" in payload:
        from .lineardyn import QuadraticHamiltonian
        H = QuadraticHamiltonian(np.real(matrix_from_json(payload["H"])))
        kmax = int(payload.get("kmax", 3))
        chain = invariant_chain(T, om1, H, kmax=kmax)
        report.add_residual("chain_involution_max",
                            float(np.max(chain["involution_residuals"])))
        report.scalars["chain_stops_at"] = chain["stops_at"]
        m = len(chain["hamiltonians"])
        report.plot_data["involution-residuals"] = [
            (k, l, chain["involution_residuals"][k, l])
            for k in range(m) for l in range(m)]


def _cmd_gqm(payload: dict, report: Report, rng) -> None:
    task = _require(payload, "task")
    if task == "bloch":
        xi = np.asarray(_require(payload, "xi"), dtype=float)
        tensors = bloch_geometry(xi)
        report.scalars["R"] = matrix_to_json(tensors.R)
        report.scalars["I"] = matrix_to_json(tensors.I)
        Jm = tensors.j_ambient
        report.add_residual("j_cubed",
                            float(np.linalg.norm(Jm @ Jm @ Jm + Jm)))
        report.verdicts["on_sphere"] = True
    elif task == "superpose":
        rho1 = PureState(matrix_from_json(_require(payload, "rho1")))
        rho2 = PureState(matrix_from_json(_require(payload, "rho2")))
        rho0 = PureState(matrix_from_json(_require(payload, "rho0")))
        c = _require(payload, "coefficients")
        c1, c2 = complex(c[0][0], c[0][1]), complex(c[1][0], c[1][1])
        out = superpose(rho1, rho2, rho0, c1, c2)
        report.scalars["rho"] = matrix_to_json(out.rho)
        report.add_residual("idempotency",
                            float(np.linalg.norm(out.rho @ out.rho - out.rho)))
        report.verdicts["pure"] = True
    elif task == "gns":
        om = matrix_from_json(_require(payload, "omega"))
        rep = gns_construct(om)
        report.scalars["dimension"] = rep.dim
        report.scalars["rank"] = rep.rank
        A = matrix_from_json(payload["A"]) if "A" in payload \
            else np.eye(om.shape[0], dtype=complex)
        expect = np.vdot(rep.cyclic, rep.represent(A) @ rep.cyclic)
        report.add_residual("cyclic_expectation",
                            abs(expect - np.trace(om @ A)))
        report.verdicts["gns_ok"] = True
    elif task == "pseudo-metric":
        H = matrix_from_json(_require(payload, "H"))
        res = pseudo_hermitian_metric(H)
        report.scalars["eta"] = matrix_to_json(res.eta)
        report.scalars["eigenvalues"] = [float(v) for v in res.eigenvalues]
        report.add_residual("intertwining",
                            float(np.linalg.norm(H.conj().T @ res.eta - res.eta @ H)))
        report.verdicts["positive"] = bool(np.min(np.linalg.eigvalsh(res.eta)) > 0)
        report.plot_data["spectrum"] = np.stack(
            [res.eigenvalues, np.zeros_like(res.eigenvalues)], axis=1)
    elif task == "kdeform":
        K = matrix_from_json(_require(payload, "K"))
        H = matrix_from_json(_require(payload, "H"))
        A = matrix_from_json(_require(payload, "A"))
        res = k_deformed_algebra(K, H, A)
        report.add_residual("bracket", res["bracket_residual"])
        report.add_residual("derivation", res["derivation_residual"])
        report.verdicts["invariant"] = True
    elif task == "fock":
        N = int(_require(payload, "N"))
        spec = str(payload.get("f", "sqrt")).lower()
        if spec == "sqrt":
            f = lambda k: np.sqrt(k + 1.0)
        elif spec == "inverse":
            f = lambda k: 1.0 / (1.0 + k)
        else:
            raise SpecError(f"unknown Fock deformation '{spec}' (sqrt|inverse)")
        fock = deformed_fock(f, N)
        C = fock.commutator_2()
        sub = C[:N - 1, :N - 1] - np.eye(N - 1)
        report.add_residual("commutator", float(np.linalg.norm(sub)))
        c = _constants(payload)
        E = c.hbar * c.omega * (np.arange(N + 1) + 0.5)
        B = np.diag(np.exp(-c.beta * E))
        z1 = fock.trace_1(B, levels=N).real
        z2 = fock.trace_2(B, levels=N).real
        report.add_residual("partition_mismatch", abs(z1 - z2))
        report.scalars["partition_function"] = z1
        report.verdicts["fock_ok"] = True
    elif task == "brackets":
        A = matrix_from_json(_require(payload, "A"))
        B = matrix_from_json(_require(payload, "B"))
        x = np.asarray([complex(v[0], v[1]) for v in _require(payload, "x")])
        res = quadratic_bracket_check(A, B, x)
        for key in ("jordan_residual", "poisson_residual", "star_residual"):
            report.add_residual(key, res[key])
        report.verdicts["identities_ok"] = all(
            res[k] <= 1e-10 for k in ("jordan_residual", "poisson_residual", "star_residual"))
    else:
        raise SpecError(f"unknown gqm task '{task}'")


def _cmd_wigner(payload: dict, report: Report, rng) -> None:
    c = _constants(payload)
    N = int(payload.get("N", 256))
    L_q = payload.get("L_q")
    if L_q is None:
        th = np.tanh(c.beta_hbar_omega / 2.0)
        width = 12.0 * float(np.sqrt(c.hbar / (c.mass * c.omega * max(th, 1e-8))))
        balanced = float(np.sqrt(np.pi * c.hbar * N / (4.0 * c.mass * c.omega)))
        L_q = min(width, balanced)
    if "L_p" in payload:
        grid = PhaseGrid(N=N, L_q=float(L_q), L_p=float(payload["L_p"]), constants=c)
    else:
        grid = PhaseGrid.nyquist(N, float(L_q), c)

    closed = oscillator_gibbs_wigner(c, grid=grid)
    W_exact = closed["wigner"]
    report.scalars["center_value"] = closed["center_value"]
    report.scalars["trace_exact"] = closed["trace_exact"]
    report.scalars["trace_quadrature"] = closed["trace_quadrature"]
    report.add_residual("trace_mismatch",
                        abs(closed["trace_quadrature"] - closed["trace_exact"]))

    source = payload.get("source", "oscillator-gibbs")
    if source == "mehler-transform":
        K = mehler_gibbs_kernel(grid)
        W = wigner_transform(K)
        err = float(np.max(np.abs(W.samples - W_exact.samples))
                    / np.max(np.abs(W_exact.samples)))
        report.add_residual("mehler_max_relative_error", err)
        report.verdicts["boundary_ok"] = not W.boundary_warning
        samples = W.samples
    elif source == "oscillator-gibbs":
        samples = W_exact.samples
    else:
        raise SpecError(f"unknown wigner source '{source}'")

    report.verdicts["wigner_ok"] = True
    report.plot_data["wigner"] = (grid.q, grid.p, samples)
    report.plot_data["_wigner_binary"] = GridFunction(grid, samples)


def _cmd_moyal(payload: dict, report: Report, rng) -> None:
    n_dof = int(payload.get("n_dof", 1))
    f = _poly(_require(payload, "f"), n_dof)
    g = _poly(_require(payload, "g"), n_dof)
    k = _poly(payload["k"], n_dof) if "k" in payload else None
    op = payload.get("op", "product")
    if op == "product":
        if k is None:
            out = moyal_product_poly(f, g)
        else:
            out = moyal_product_poly(moyal_product_poly(f, k), g)
    elif op == "bracket":
        out = moyal_bracket_poly(f, g, k)
        classical = poisson_bracket_poly(f, g) if k is None \
            else classical_deformed_bracket(f, g, k)
        report.add_residual("classical_limit_mismatch",
                            (out.hbar_coefficient(0) - classical).coefficient_norm())
    else:
        raise SpecError(f"unknown moyal op '{op}' (product|bracket)")
    report.scalars["result"] = out.to_json()
    report.scalars["max_hbar_power"] = out.max_hbar_power()
    report.verdicts["moyal_ok"] = True


def _cmd_kms(payload: dict, report: Report, rng) -> None:
    n_dof = 1
    H = _poly(_require(payload, "H"), n_dof)
    f = _poly(_require(payload, "f"), n_dof)
    g = _poly(_require(payload, "g"), n_dof)
    beta = float(payload.get("beta", 1.0))
    gspec = payload.get("grid", {})
    c = _constants(payload)
    N = int(gspec.get("N", 512))
    L_q = float(gspec.get("L_q", 8.0))
    L_p = float(gspec.get("L_p", L_q))
    grid = PhaseGrid(N=N, L_q=L_q, L_p=L_p, constants=c)
    res = classical_kms_check(H, f, g, beta, grid)
    report.scalars["lhs"] = res["lhs"]
    report.scalars["rhs"] = res["rhs"]
    report.add_residual("kms", res["residual"])
    report.verdicts["decay_ok"] = not res["accuracy_warning"]


_HANDLERS = {
    "analyze-linear": _cmd_analyze_linear,
    "triple": _cmd_triple,
    "compat": _cmd_compat,
    "recursion": _cmd_recursion,
    "gqm": _cmd_gqm,
    "wigner": _cmd_wigner,
    "moyal": _cmd_moyal,
    "kms": _cmd_kms,
}

# residual tolerances that gate the exit status (spec-overridable)
_DEFAULT_TOLERANCES = {
    "max_odd_trace": 1e-10,
    "involution_max": 1e-10,
    "deformation_reconstruction": 1e-10,
    "J_squared": 1e-10,
    "compatibility": 1e-10,
    "kms": 1e-6,
    "mehler_max_relative_error": 1e-6,
    "trace_mismatch": 1e-6,
    "commutator": 1e-12,
    "partition_mismatch": 1e-12,
    "idempotency": 1e-10,
    "cyclic_expectation": 1e-12,
    "intertwining": 1e-9,
    "bracket": 1e-12,
    "derivation": 1e-12,
    "jordan_residual": 1e-10,
    "poisson_residual": 1e-10,
    "star_residual": 1e-10,
    "j_cubed": 1e-12,
    "classical_limit_mismatch": 1e-12,
    "chain_involution_max": 1e-10,
    "chart_round_trip_max": 1e-10,
    "block_g_ratio_max": 1e-9,
    "block_omega_ratio_max": 1e-9,
    "commutation_max": 1e-10,
}


def emit_plot_data(report: Report, what: str, out_dir: str) -> list[str]:
    """Columnar CSV for external plotting; selectors: wigner | spectrum |
    involution-residuals. Artifact paths are recorded relative to the output
    directory so identical runs give byte-identical reports."""
    data = getattr(report, "plot_data", {})
    if what not in data:
        raise SpecError(f"selector '{what}' not present in this report "
                        f"(available: {sorted(data)})")
    paths = []
    if what == "wigner":
        q, p, W = data["wigner"]
        rows = [(float(q[i]), float(p[j]), float(W[i, j].real), float(W[i, j].imag))
                for i in range(len(q)) for j in range(len(p))]
        paths.append(write_csv(os.path.join(out_dir, "wigner.csv"),
                               ["q", "p", "re_w", "im_w"], rows))
    elif what == "spectrum":
        rows = [(float(r), float(i)) for r, i in data["spectrum"]]
        paths.append(write_csv(os.path.join(out_dir, "spectrum.csv"),
                               ["re_lambda", "im_lambda"], rows))
    elif what == "involution-residuals":
        rows = [(int(k), int(l), float(r)) for k, l, r in data["involution-residuals"]]
        paths.append(write_csv(os.path.join(out_dir, "involution_residuals.csv"),
                               ["k", "l", "residual"], rows))
    report.artifacts.extend(os.path.relpath(p, out_dir) for p in paths)
    return paths


def _render_figures(report: Report, out_dir: str) -> None:
    from . import plotting
    data = getattr(report, "plot_data", {})
    if "wigner" in data:
        q, p, W = data["wigner"]
        plotting.plot_wigner(os.path.join(out_dir, "wigner.png"), q, p, W)
        report.artifacts.append("wigner.png")
    if "spectrum" in data:
        ev = np.asarray([complex(r, i) for r, i in data["spectrum"]])
        plotting.plot_spectrum(os.path.join(out_dir, "spectrum.png"), ev)
        report.artifacts.append("spectrum.png")
    if "involution-residuals" in data:
        rows = data["involution-residuals"]
        m = 1 + max(int(r[0]) for r in rows)
        R = np.zeros((m, m))
        for k, l, v in rows:
            R[int(k), int(l)] = v
        plotting.plot_residual_matrix(
            os.path.join(out_dir, "involution_residuals.png"), R)
        report.artifacts.append("involution_residuals.png")


def run(command: str, spec_path: str, out_dir: str = ".", fmt: str = "json",
        seed: int = 0, momentum_sign: str = "weyl", plot: bool = False) -> tuple[int, Report]:
    """Execute one problem spec; returns (exit_status, report)."""
    if command not in COMMANDS:
        raise SpecError(f"unknown command '{command}' (choose from {', '.join(COMMANDS)})")
    try:
        with open(spec_path) as fh:
            payload = json.load(fh)
    except OSError as exc:
        raise SpecError(f"cannot read spec file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SpecError(
            f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(payload, dict):
        raise SpecError("spec top level must be a JSON object")

    rng = np.random.default_rng(int(payload.get("seed", seed)))
    report = Report(command=command)
    report.plot_data = {}
    report.config = {"spec": spec_path, "seed": int(payload.get("seed", seed)),
                     "momentum_sign": momentum_sign, "format": fmt}

    try:
        _HANDLERS[command](payload, report, rng)
    except SpecError:
        raise
    except (ValueError, np.linalg.LinAlgError) as exc:
        # invariant violations in the input data are spec errors, not check failures
        raise SpecError(f"{type(exc).__name__}: {exc}") from exc

    if momentum_sign == "standard" and "wigner" in report.plot_data:
        q, p, W = report.plot_data["wigner"]
        flipped = np.empty_like(W)
        flipped[:, 1:] = W[:, :0:-1]
        flipped[:, 0] = W[:, 0]
        report.plot_data["wigner"] = (q, p, flipped)

    os.makedirs(out_dir, exist_ok=True)
    if fmt == "csv":
        # matrix-valued scalars additionally land in per-name CSV files
        for name, value in list(report.scalars.items()):
            if isinstance(value, list) and value and isinstance(value[0], list) \
                    and value[0] and isinstance(value[0][0], list):
                rows = [(i, j, value[i][j][0], value[i][j][1])
                        for i in range(len(value)) for j in range(len(value[i]))]
                write_csv(os.path.join(out_dir, f"{name}.csv"),
                          ["i", "j", "re", "im"], rows)
                report.artifacts.append(f"{name}.csv")
    binary = report.plot_data.pop("_wigner_binary", None)
    if binary is not None:
        binary.to_binary(os.path.join(out_dir, "wigner.npz"))
        report.artifacts.append("wigner.npz")
    for what in report.plot_data:
        emit_plot_data(report, what, out_dir)
    if plot:
        _render_figures(report, out_dir)

    tolerances = dict(_DEFAULT_TOLERANCES)
    tolerances.update({k: float(v) for k, v in payload.get("tolerances", {}).items()})
    status = 0 if report.all_passed(tolerances) else 1
    report.write(os.path.join(out_dir, "report.json"))
    report.artifacts[-1] = "report.json"
    return status, report


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="biham",
        description="alternative Hamiltonian descriptions and phase-space QM toolbox")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--spec", required=True, help="path to the problem-spec JSON")
    ap.add_argument("--out", default=".", help="output directory (default: cwd)")
    ap.add_argument("--format", choices=("json", "csv"), default="json")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--momentum-sign", choices=("weyl", "standard"), default="weyl",
                    help="weyl keeps Omega(p) = -P (symplectic transform); "
                         "standard flips the momentum axis of emitted grids")
    ap.add_argument("--plot", action="store_true",
                    help="render matplotlib figures next to the CSV output")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return ap


def main(argv: list[str] | None = None) -> int:
    if "BIHAM_THREADS" in os.environ:
        # caps BLAS parallelism for child libraries; honored on import by
        # OpenMP/MKL, so exporting before launch is the reliable route
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, os.environ["BIHAM_THREADS"])
    args = build_parser().parse_args(argv)
    try:
        status, report = run(args.command, args.spec, out_dir=args.out,
                             fmt=args.format, seed=args.seed,
                             momentum_sign=args.momentum_sign, plot=args.plot)
    except SpecError as exc:
        print(f"biham: spec error: {exc}", file=sys.stderr)
        return 2
    print(report.to_json())
    return status


if __name__ == "__main__":
    sys.exit(main())

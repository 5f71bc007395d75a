"""Command-line runner: ``twophase <subcommand> [--config PATH] [--set k=v] [--out DIR]``.

Exit codes: 0 success, 1 failed acceptance check (suite), 2 invalid
configuration or model input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig, load_config
from .errors import ModelError, NumericalError

log = logging.getLogger("twophase")

MANIFEST_SCHEMA = 1
COMMANDS = (
    "validate-materials",
    "equilibrium",
    "variations",
    "spectrum",
    "simulate-radial",
    "simulate-ripening",
    "suite",
)


class Operation:
    """Names the step that was running when a numerical error escaped."""

    current = "startup"

    def __init__(self, name: str):
        self.name = name

    def __enter__(self):
        Operation.current = self.name
        return self

    def __exit__(self, *exc):
        return False


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, complex):
        return f"{value.real!r}{value.imag:+}j"
    return str(value)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


class ArtifactWriter:
    """Atomic writes (temp file + rename) into one directory, plus the manifest."""

    def __init__(self, directory: Path):
        self.dir = directory
        self.files: dict[str, str] = {}

    def _write(self, name: str, data: bytes):
        self.dir.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=self.dir, prefix=f".{name}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write(data)
            os.replace(tmp, self.dir / name)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        self.files[name] = hashlib.sha256(data).hexdigest()

    def json(self, name: str, obj):
        self._write(name, (json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n").encode())

    def csv(self, name: str, header, rows):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
        self._write(name, buf.getvalue().encode())

    def manifest(self, command: str, cfg: RunConfig):
        self.json(
            "manifest.json",
            {
                "schema_version": MANIFEST_SCHEMA,
                "command": command,
                "library_version": __version__,
                "config_sha256": cfg.sha256(),
                "files": dict(sorted(self.files.items())),
            },
        )


# subcommands ------------------------------------------------------------------------------


def cmd_validate_materials(cfg: RunConfig, out: ArtifactWriter) -> int:
    from .thermo import validate_assumptions

    ms = cfg.material_set()
    with Operation("validate_assumptions"):
        report = validate_assumptions(ms)
    out.json("validation.json", {"theta_c": ms.theta_c, **report.to_dict()})
    return 0 if report.ok else 2


def _equilibrium(cfg: RunConfig):
    from .equilibria import Domain, build_equilibrium

    g = cfg.geometry
    centers = None if g.centers is None else np.asarray(g.centers, dtype=float)
    with Operation("build_equilibrium"):
        return build_equilibrium(
            cfg.material_set(), Domain(g.n, g.container_radius), g.m,
            radius=g.radius, mass=g.mass, theta=g.theta, energy=g.energy, centers=centers,
        )


def cmd_equilibrium(cfg: RunConfig, out: ArtifactWriter) -> int:
    from .equilibria import total_functionals, total_mass

    eq = _equilibrium(cfg)
    with Operation("total_functionals"):
        totals = total_functionals(eq.materials, eq.domain, eq.spheres, eq.theta_star)
    out.json(
        "equilibrium.json",
        {
            "n": eq.n, "m": eq.m, "R_star": eq.radius, "theta_star": eq.theta_star,
            "pi1": eq.pi1, "pi2": eq.pi2, "H_star": eq.H_star,
            "M": total_mass(eq.materials, eq.domain, eq.spheres), "E": totals.energy, "Phi": totals.entropy,
            "centers": eq.spheres.centers,
        },
    )
    return 0


def cmd_variations(cfg: RunConfig, out: ArtifactWriter) -> int:
    from .variations import (
        RestState,
        classify_definiteness,
        constraint_projection,
        constraint_values,
        lagrange_residuals,
        probe_directions,
        second_variation_form,
    )

    eq = _equilibrium(cfg)
    lmax = cfg.variations.lmax
    with Operation("lagrange_residuals"):
        residuals = lagrange_residuals(eq, lmax=lmax)
    rows = []
    with Operation("second_variation_form"):
        for label, pert in probe_directions(eq.n, eq.m, RestState.from_equilibrium(eq), lmax).items():
            constrained = all(abs(v) < 1e-12 for v in constraint_values(eq, pert))
            if not constrained:
                pert = constraint_projection(eq, pert)
            rows.append((label, constrained, second_variation_form(eq, pert)))
    with Operation("classify_definiteness"):
        rep = classify_definiteness(eq, lmax, cfg.variations.tol)
    out.csv("variations.csv", ("label", "constrained", "form_value"), rows)
    out.json(
        "variations.json",
        {
            "classification": rep.classification,
            "positive_dimension": rep.positive_dimension,
            "null_dimension": rep.null_dimension,
            "witness_value": rep.witness_value,
            "lagrange_residuals": residuals,
        },
    )
    return 0


def cmd_spectrum(cfg: RunConfig, out: ArtifactWriter) -> int:
    from .errors import GammaZero
    from .spectral.coefficients import Linearization
    from .spectral.dispersion import assemble_dispersion, find_roots
    from .spectral.pencil import direct_mode_spectrum, kernel_check, semisimplicity_check

    if cfg.geometry.m != 1:
        raise ModelError("spectrum needs one sphere concentric in the container (geometry.m = 1)")
    eq = _equilibrium(cfg)
    lin = Linearization.from_equilibrium(eq)
    sc = cfg.spectrum
    scan = np.concatenate(([0.0], np.logspace(np.log10(sc.lam_min), np.log10(sc.lam_max), sc.lam_points)))
    rows, summary = [], {}
    dispersion_ok = lin.gamma > 0
    for l in range(0, sc.lmax + 1):
        entry = {}
        if l >= 1 and dispersion_ok:
            with Operation(f"dispersion l={l}"):
                samples = {float(x): assemble_dispersion(lin, l, float(x), sc.nodes) for x in scan}
                for x, smp in samples.items():
                    rows.append((eq.n, l, x, smp.F, smp.dtn, smp.s11, smp.s22, smp.tau))
                roots = find_roots(lambda x: samples[x].F if x in samples else assemble_dispersion(lin, l, x, sc.nodes).F, scan)
            entry["roots"] = roots
        elif l >= 1:
            entry["roots"] = "skipped: GammaZero"
        if sc.direct:
            with Operation(f"direct spectrum l={l}"):
                sp = direct_mode_spectrum(lin, l, nodes=sc.nodes)
            entry["leading_eigenvalue"] = None if sp.leading is None else complex(sp.leading)
            entry["zero_cluster_size"] = len(sp.zero_cluster)
        summary[str(l)] = entry
    result = {"n": eq.n, "modes": summary}
    if not dispersion_ok:
        result["dispersion"] = f"skipped: {GammaZero.__name__}"
    if sc.direct:
        with Operation("kernel_check"):
            k = kernel_check(lin, sc.lmax, sc.nodes)
        with Operation("semisimplicity_check"):
            result["semisimple"] = semisimplicity_check(lin, sc.lmax, sc.nodes)
        result["kernel_dimension"] = k.dimension
        result["kernel_residuals"] = k.residuals
    out.csv("spectrum.csv", ("n", "l", "lambda", "F", "dtn", "s11", "s22", "tau"), rows)
    out.json("spectrum.json", result)
    return 0


def cmd_simulate_radial(cfg: RunConfig, out: ArtifactWriter) -> int:
    from .dynamics import radial
    from .equilibria import Domain, SphereFamily, temperature_from_energy

    ms = cfg.material_set()
    g, rc = cfg.geometry, cfg.radial
    if g.radius is None:
        raise ModelError("simulate-radial needs geometry.radius")
    theta = g.theta if g.theta is not None else 0.5 * ms.theta_c
    grid = radial.RadialGrid(g.n, g.radius, g.container_radius, rc.cells, rc.cells)
    amp = rc.amplitude * min(theta, ms.theta_c - theta)
    init = radial.RadialState.from_profile(grid, radial.initial_family(rc.family, grid, theta, amp))
    with Operation("simulate_radial"):
        traj = radial.simulate_radial(ms, grid, init, rc.steps * rc.dt, rc.dt, rc.scheme)
    spheres = SphereFamily(np.zeros((1, g.n)), g.radius)
    with Operation("temperature_from_energy"):
        predicted = temperature_from_energy(ms, Domain(g.n, g.container_radius), spheres, traj.energy[0])
    keep = np.arange(0, len(traj.t), rc.record_every)
    if keep[-1] != len(traj.t) - 1:
        keep = np.append(keep, len(traj.t) - 1)
    cols = ("t", "energy", "entropy", "theta_gamma", "theta_max", "theta_min", "production")
    out.csv("radial.csv", cols, zip(*(getattr(traj, c)[keep] for c in cols)))
    inc = traj.entropy_increments
    out.json(
        "radial.json",
        {
            "energy_drift": traj.energy_drift,
            "entropy_min_increment": float(inc.min()),
            "monotonicity_violations": int(np.sum(inc < -1e-10)),
            "terminal_theta_max_deviation": float(np.max(np.abs(traj.final.vector() - predicted))),
            "predicted_theta_inf": predicted,
            "production_defect": traj.production_defect(),
            "steps": rc.steps,
            "scheme": rc.scheme,
        },
    )
    return 0


def cmd_simulate_ripening(cfg: RunConfig, out: ArtifactWriter) -> int:
    from .dynamics.ripening import RipeningParams, simulate_ripening

    ms = cfg.material_set()
    g, rc = cfg.geometry, cfg.ripening
    theta = g.theta if g.theta is not None else 0.5 * ms.theta_c
    params = RipeningParams.from_materials(ms, g.n, theta)
    radii = np.asarray(rc.radii, dtype=float)
    with Operation("simulate_ripening"):
        traj = simulate_ripening(params, radii, rc.T, rc.dt, rc.r_min)
    n = g.n
    total = np.nansum(traj.radii**n, axis=1)
    header = ["t"] + [f"R{k + 1}" for k in range(len(radii))] + ["theta_bar"]
    out.csv("ripening.csv", header, ([t, *row, tb] for t, row, tb in zip(traj.t, traj.radii, traj.theta_bar)))
    out.json(
        "ripening.json",
        {
            "events": traj.events,
            "volume_drift": float(np.max(np.abs(total - total[0])) / total[0]),
            "final_radii": traj.final_radii,
            "predicted_single_radius": float(np.sum(radii**n) ** (1.0 / n)),
            "rate_constant": params.rate_constant,
        },
    )
    return 0


def cmd_suite(cfg: RunConfig, out: ArtifactWriter, config_path=None, threads: int = 1, quiet: bool = False) -> int:
    from .acceptance import run_all

    with Operation("acceptance suite"):
        results = run_all(cfg, config_path, threads)
    if not quiet:
        for r in results:
            print(r.line())
    out.csv(
        "suite.csv", ("name", "status", "measured", "tolerance", "detail"),
        ((r.name, "skipped" if r.skipped else ("pass" if r.passed else "fail"), r.measured, r.tolerance, r.detail) for r in results),
    )
    failed = [r.name for r in results if not r.passed]
    out.json("suite.json", {"failed": failed, "count": len(results)})
    return 1 if failed else 0


HANDLERS = {
    "validate-materials": cmd_validate_materials,
    "equilibrium": cmd_equilibrium,
    "variations": cmd_variations,
    "spectrum": cmd_spectrum,
    "simulate-radial": cmd_simulate_radial,
    "simulate-ripening": cmd_simulate_ripening,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="twophase", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", default=None, help="YAML configuration file")
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE")
    p.add_argument("--out", default=None, help="output directory (overrides config and TWOPHASE_OUT)")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--version", action="version", version=__version__)
    return p


def main(argv=None, quiet: bool = False) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.overrides)
    except ModelError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    directory = Path(args.out or os.environ.get("TWOPHASE_OUT") or cfg.output.dir)
    out = ArtifactWriter(directory)
    Operation.current = args.command
    try:
        if args.command == "suite":
            code = cmd_suite(cfg, out, args.config, max(args.threads, 1), quiet)
        else:
            code = HANDLERS[args.command](cfg, out)
    except ModelError as exc:
        print(f"invalid input in {Operation.current}: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure in {Operation.current}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    out.manifest(args.command, cfg)
    if not quiet:
        log.info("wrote %s", ", ".join(sorted(out.files)))
    return code


if __name__ == "__main__":
    sys.exit(main())

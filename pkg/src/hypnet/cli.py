"""Command line interface: ``hypnet check | simulate | models``.

Exit codes
  0  every requested verdict is yes (check), or the run finished (simulate)
  1  invalid input: usage error, unreadable file, schema violation, failed assumptions
  2  some requested verdict is no
  3  some requested verdict is undetermined (and none is no)
  4  simulate: an observation disagrees with a verdict
"""
from __future__ import annotations

import json
import sys
import warnings
from pathlib import Path

import click
import numpy as np

from . import io
from .classifier import FLAGS, NO, UND, YES, AssumptionsNotVerified, classify
from .models import PRESETS, ModelError, make_model, parse_params
from .simulator import (CLOSURES, SCHEMES, SimConfig, SimulationError, initial_from_spec, run,
                        write_snapshots)

EXIT_OK, EXIT_INPUT, EXIT_NO, EXIT_UND, EXIT_DISAGREE = 0, 1, 2, 3, 4

ALIASES = {
    "group": "group",
    "unitary": "unitary_group", "unitary_group": "unitary_group",
    "semigroup": "quasi_contractive_semigroup",
    "quasi_contractive": "quasi_contractive_semigroup",
    "quasi_contractive_semigroup": "quasi_contractive_semigroup",
    "contractive": "contractive_semigroup", "contractive_semigroup": "contractive_semigroup",
    "real": "real",
    "positive": "positive",
}

DRIFT_TOL = 0.05          # relative energy drift still read as conservation
INCREASE_TOL = 1e-10      # per-record energy increase, relative to E(0)
NEG_TOL = 1e-12
IMAG_TOL = 1e-12


def load_system(source: str):
    """A system file path, or the name of a built-in model."""
    p = Path(source)
    if p.exists():
        return io.load(p)
    if source in PRESETS:
        return make_model(source).system
    raise io.SystemFileError(f"no such file or model: {source}")


def required_flags(items) -> list[str]:
    out = []
    for it in items or ():
        for name in it.split(","):
            name = name.strip().lower().replace("-", "_")
            if not name:
                continue
            if name == "all":
                out.extend(FLAGS)
            elif name in ALIASES:
                out.append(ALIASES[name])
            else:
                raise click.BadParameter(f"unknown verdict {name!r}; use one of "
                                         f"{', '.join(sorted(ALIASES))} or all")
    return list(dict.fromkeys(out)) or ["quasi_contractive_semigroup"]


def exit_code(report, required) -> int:
    values = [getattr(report, f).value for f in required]
    if NO in values:
        return EXIT_NO
    if UND in values:
        return EXIT_UND
    return EXIT_OK


def _fail(msg: str) -> None:
    click.echo(f"error: {msg}", err=True)
    sys.exit(EXIT_INPUT)


# simulation summary -----------------------------------------------------------

def summarize(ts, report, probes=("energy", "positivity", "reality")) -> tuple[list[str], bool]:
    """Observed behaviour against the verdicts; returns (lines, disagreement)."""
    lines, bad = [], False
    times = np.asarray(ts.times)
    e = np.asarray(ts.energy)
    v = report.flags()
    if "energy" in probes and len(e) and e[0] > 0:
        drift = ts.relative_drift()
        if v["unitary_group"] == YES:
            growth = float(e.max() / e[0] - 1.0)
            if drift <= DRIFT_TOL:
                lines.append(f"energy drift {100 * drift:.2g}% (unitary: consistent)")
            elif growth > DRIFT_TOL:
                bad = True
                lines.append(f"energy grew by {100 * growth:.2g}% (unitary: DISAGREES)")
            else:
                # first-order schemes lose energy at O(dx); only growth contradicts
                lines.append(f"energy drift {100 * drift:.2g}% from numerical dissipation "
                             f"(unitary: consistent if it shrinks under --cells refinement)")
        else:
            lines.append(f"energy drift {100 * drift:.2g}% (unitary: {v['unitary_group']})")
        inc = ts.max_energy_increase()
        mono = inc <= INCREASE_TOL
        if v["contractive_semigroup"] == YES:
            bad |= not mono
            lines.append("energy monotone decreasing (contractive: consistent)" if mono else
                         f"energy increased by {inc:.3g} E(0) in one interval (contractive: DISAGREES)")
        elif mono:
            lines.append(f"energy monotone decreasing (contractive: {v['contractive_semigroup']})")
        else:
            k = int(np.argmax(np.diff(e)))
            lines.append(f"energy growth observed at t={times[k + 1]:.4g}, consistent with "
                         f"contractive: {v['contractive_semigroup']}")
    mn = np.asarray(ts.min_real)
    if "positivity" in probes and len(mn):
        if mn[0] < 0:
            lines.append("positivity probe skipped: initial data has negative entries")
        else:
            neg = np.flatnonzero(mn < -NEG_TOL)
            if neg.size:
                t0 = times[neg[0]]
                if v["positive"] == YES:
                    bad = True
                    lines.append(f"negative values at t={t0:.4g} (min {mn.min():.3g}) (positive: DISAGREES)")
                else:
                    lines.append(f"negative undershoot observed at t={t0:.4g}, consistent with "
                                 f"positive: {v['positive']}")
            else:
                lines.append(f"min real part {mn.min():.3g} stays nonnegative "
                             f"(positive: {'consistent' if v['positive'] == YES else v['positive']})")
    mi = np.asarray(ts.max_imag)
    if "reality" in probes and len(mi):
        if mi[0] > IMAG_TOL:
            lines.append("reality probe skipped: initial data is not real")
        else:
            top = float(mi.max())
            if v["real"] == YES:
                ok = top <= IMAG_TOL
                bad |= not ok
                lines.append(f"max |Im| {top:.3g} (real: {'consistent' if ok else 'DISAGREES'})")
            elif top > IMAG_TOL:
                lines.append(f"imaginary parts appear (max |Im| {top:.3g}), consistent with "
                             f"real: {v['real']}")
            else:
                lines.append(f"max |Im| {top:.3g} (real: {v['real']})")
    return lines, bad


# commands ---------------------------------------------------------------------

class _Group(click.Group):
    """Usage errors exit with 1 so that 2 keeps meaning "a verdict is no"."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except click.UsageError as exc:
            exc.exit_code = EXIT_INPUT
            raise


@click.group(cls=_Group, context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(package_name="artifact")
def main():
    """Well-posedness checks and simulation for hyperbolic systems on networks."""


@main.command()
@click.argument("source")
@click.option("--require", "require", multiple=True,
              help="Verdicts that must be yes (comma separated, or 'all'). "
                   "Default: quasi_contractive_semigroup.")
@click.option("--explain", is_flag=True, help="Print evidence for every verdict.")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable report.")
def check(source, require, explain, as_json):
    """Classify the system in SOURCE (a system file or a model name)."""
    try:
        req = required_flags(require)
        system = load_system(source)
        report = classify(system)
    except (io.SystemFileError, ModelError) as exc:
        _fail(str(exc))
    except AssumptionsNotVerified as exc:
        _fail(f"assumptions not verified: {exc}")
    code = exit_code(report, req)
    if as_json:
        d = report.to_dict()
        d["required"] = req
        d["exit_code"] = code
        click.echo(json.dumps(d, indent=2))
    else:
        click.echo(report.render(explain))
    sys.exit(code)


@main.command()
@click.argument("source")
@click.option("--tmax", type=float, help="Final time.")
@click.option("--cells", type=int, help="Cells per unit length.")
@click.option("--cfl", type=float, help="CFL number in (0, 1].")
@click.option("--scheme", type=click.Choice(SCHEMES))
@click.option("--closure", type=click.Choice(CLOSURES), help="Vertex closure.")
@click.option("--stride", type=int, help="Record every n-th step.")
@click.option("--threads", type=int, help="Worker threads for the edge updates.")
@click.option("--probe", "probe", multiple=True, type=click.Choice(["energy", "positivity", "reality"]),
              help="Restrict the summary to these probes.")
@click.option("--out", type=click.Path(dir_okay=False), help="Time-series CSV (default <name>.csv).")
@click.option("--snapshots", type=click.Path(file_okay=False), help="Directory for cell snapshots.")
def simulate(source, tmax, cells, cfl, scheme, closure, stride, threads, probe, out, snapshots):
    """Run the finite-volume scheme and compare with the verdicts."""
    try:
        system = load_system(source)
        report = classify(system)
        sim = system.simulation or {}
        base = dict(sim.get("config", {}))
        if "probes" in base:
            base["probes"] = tuple(base["probes"])
        config = SimConfig(**base).updated(t_final=tmax, cells_per_unit=cells, cfl=cfl,
                                           scheme=scheme, closure=closure, stride=stride,
                                           threads=threads, snapshots=bool(snapshots) or None)
        spec = sim.get("initial") or {e.id: {"profile": "bump"} for e in system.graph.edges}
        initial = initial_from_spec(system, spec)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            ts = run(system, config, initial, report=report)
    except (io.SystemFileError, ModelError) as exc:
        _fail(str(exc))
    except AssumptionsNotVerified as exc:
        _fail(f"assumptions not verified: {exc}")
    except SimulationError as exc:
        _fail(f"simulation failed: {exc}")
    for w in caught:
        click.echo(f"warning: {w.message}", err=True)
    out = out or f"{system.name}.csv"
    ts.to_csv(out)
    if snapshots:
        write_snapshots(ts, system, ts.final_state, snapshots)
    lines, bad = summarize(ts, report, probe or config.probes)
    click.echo(f"{system.name}: {ts.steps} steps, dt={ts.dt:.4g}, t={ts.times[-1]:.4g}, "
               f"backend={ts.backend}, series -> {out}")
    for line in lines:
        click.echo(line)
    sys.exit(EXIT_DISAGREE if bad else EXIT_OK)


@main.group(cls=_Group)
def models():
    """Built-in models."""


@models.command("list")
def models_list():
    """List the built-in models."""
    width = max(len(n) for n in PRESETS)
    for name, info in PRESETS.items():
        click.echo(f"{name:<{width}}  {info.description}")


@models.command("emit")
@click.argument("name")
@click.option("--param", "params", multiple=True, help="Parameter override key=value.")
@click.option("-o", "--output", type=click.Path(dir_okay=False), help="Output file (default stdout).")
def models_emit(name, params, output):
    """Write the system file of model NAME."""
    try:
        preset = make_model(name, parse_params(params))
        text = io.dumps(preset.system)
    except (ModelError, io.SystemFileError) as exc:
        _fail(str(exc))
    if output:
        Path(output).write_text(text)
    else:
        click.echo(text, nl=False)


if __name__ == "__main__":
    main()

"""Command-line interface.

Exit codes: 0 success, 2 usage error, 3 numerical non-convergence,
4 verification failure. ``QSHANNON_SEED`` overrides ``--seed`` when set.
"""

from __future__ import annotations

import csv
import io
import json
import os
import sys

import click
import numpy as np

from . import capacity as cap
from . import channels as ch
from . import ftbounds as fb
from . import simulator as sm
from . import verify as vf

EXIT_USAGE = 2
EXIT_NONCONVERGENCE = 3
EXIT_VERIFY = 4

FAMILIES = ["identity", "depolarizing", "erasure", "pauli", "covariant_pauli", "amplitude_damping"]


def fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.9g}"
    return str(x)


def emit(rows: list[dict], fmt_name: str, output: str | None) -> None:
    if fmt_name == "json":
        text = json.dumps([{k: (v if not isinstance(v, np.generic) else v.item()) for k, v in r.items()} for r in rows], indent=2) + "\n"
    else:
        buf = io.StringIO()
        if rows:
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(list(rows[0].keys()))
            for r in rows:
                w.writerow([fmt(v) for v in r.values()])
        text = buf.getvalue()
    if output:
        with open(output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def resolve_seed(seed: int) -> int:
    env = os.environ.get("QSHANNON_SEED")
    if env is None or env.strip() == "":
        return seed
    try:
        return int(env)
    except ValueError:
        raise click.UsageError(f"QSHANNON_SEED must be an integer, got {env!r}") from None


def parse_grid(text: str | None, default: list[float] | None = None) -> list[float]:
    """``start:stop:num`` arithmetic progression or a comma-separated list."""
    if text is None:
        if default is None:
            raise click.UsageError("a grid is required")
        return default
    try:
        if ":" in text:
            a, b, n = text.split(":")
            return [float(x) for x in np.linspace(float(a), float(b), int(n))]
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise click.UsageError(f"cannot parse grid {text!r}; use start:stop:num or a,b,c") from None


def family_options(f):
    opts = [
        click.option("--family", type=click.Choice(FAMILIES), default=None),
        click.option("--dim", type=int, default=2, show_default=True),
        click.option("--p", "p", type=float, default=None, help="depolarizing or erasure parameter"),
        click.option("--gamma", type=float, default=None),
        click.option("--p0", type=float, default=None),
        click.option("--p1", type=float, default=None),
        click.option("--p2", type=float, default=None),
        click.option("--p3", type=float, default=None),
        click.option("--channel-file", type=click.Path(exists=True, dir_okay=False), default=None),
    ]
    for o in reversed(opts):
        f = o(f)
    return f


def build_family(family, dim, p, gamma, p0, p1, p2, p3, channel_file):
    if channel_file:
        try:
            return ch.load_channel(channel_file)
        except ValueError as exc:
            raise click.UsageError(str(exc)) from None
    if family is None:
        raise click.UsageError("give --family or --channel-file")

    def need(name, v):
        if v is None:
            raise click.UsageError(f"--family {family} needs --{name}")
        return v

    try:
        if family == "identity":
            f = ch.Identity(dim)
        elif family == "depolarizing":
            f = ch.Depolarizing(dim, need("p", p))
        elif family == "erasure":
            f = ch.Erasure(dim, need("p", p))
        elif family == "pauli":
            f = ch.PauliQubit(need("p0", p0), need("p1", p1), need("p2", p2), need("p3", p3))
        elif family == "covariant_pauli":
            f = ch.CovariantPauli(need("p0", p0), need("p3", p3))
        else:
            f = ch.AmplitudeDamping(need("gamma", gamma))
        ch.validate_family(f)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from None
    return f


def describe(f) -> tuple[str, str]:
    if isinstance(f, ch.KrausChannel):
        return "kraus", f"dim_in={f.dim_in};dim_out={f.dim_out}"
    name = type(f).__name__
    params = ";".join(f"{k}={fmt(v)}" for k, v in vars(f).items() if not isinstance(v, np.ndarray))
    return name, params


class Ctx:
    nonconverged = False


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
def main():
    """Capacity solvers, bound functions and [[4,2,2]] simulations."""


@main.command()
@family_options
@click.option("--method", type=click.Choice(["closed", "numeric", "both"]), default="closed", show_default=True)
@click.option("--seed", type=int, default=42, show_default=True)
@click.option("--format", "fmt_name", type=click.Choice(["csv", "json"]), default="csv")
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None)
def capacity(family, dim, p, gamma, p0, p1, p2, p3, channel_file, method, seed, fmt_name, output):
    """Holevo and entanglement-assisted capacities of one channel."""
    seed = resolve_seed(seed)
    f = build_family(family, dim, p, gamma, p0, p1, p2, p3, channel_file)
    name, params = describe(f)
    row = {"family": name, "params": params}
    bad = False
    if method in ("closed", "both"):
        if isinstance(f, ch.KrausChannel):
            raise click.UsageError("closed forms need --family; use --method numeric for a Kraus file")
        row["holevo_closed"] = cap.closed_form_holevo(f).value
        row["ea_closed"] = cap.closed_form_ea(f).value
    if method in ("numeric", "both"):
        h = cap.numeric_holevo(f, seed=seed)
        e = cap.numeric_ea(f, seed=seed)
        row["holevo_numeric"] = h.value
        row["ea_numeric"] = e.value
        row["holevo_residual"] = h.residual
        bad = not h.converged
    row["seed"] = seed
    emit([row], fmt_name, output)
    if bad:
        sys.exit(EXIT_NONCONVERGENCE)


@main.command()
@family_options
@click.option("--seed", type=int, default=42, show_default=True)
def quotient(family, dim, p, gamma, p0, p1, p2, p3, channel_file, seed):
    """Ratio of entanglement-assisted to Holevo capacity."""
    seed = resolve_seed(seed)
    f = build_family(family, dim, p, gamma, p0, p1, p2, p3, channel_file)
    try:
        q = cap.capacity_quotient(f, seed=seed)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from None
    click.echo(fmt(q))


@main.command()
@click.option("--gamma-grid", default="0.01,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,0.99", show_default=True)
@click.option("--seed", type=int, default=42, show_default=True)
@click.option("--format", "fmt_name", type=click.Choice(["csv", "json"]), default="csv")
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None)
def center(gamma_grid, seed, fmt_name, output):
    """Divergence and stabilized centers of amplitude damping channels."""
    seed = resolve_seed(seed)
    rows, bad = [], False
    for g in parse_grid(gamma_grid):
        try:
            f = ch.AmplitudeDamping(g)
            ch.validate_family(f)
        except ValueError as exc:
            raise click.UsageError(str(exc)) from None
        div = cap.divergence_center(f, seed=seed)
        stab = cap.stabilized_divergence_center(f, seed=seed)
        bad |= not div.converged
        rows.append({
            "gamma": g,
            "s_div": div.largest_eigenvalue,
            "s_stab": stab.largest_eigenvalue,
            "radius_div": div.radius,
            "radius_stab": stab.radius,
            "seed": seed,
        })
    emit(rows, fmt_name, output)
    if bad:
        sys.exit(EXIT_NONCONVERGENCE)


@main.command("ft-bound")
@click.option("--dim", type=int, default=2, show_default=True)
@click.option("--p-grid", default="0:0.9:10", show_default=True, help="depolarizing parameters")
@click.option("--q-grid", default="1e-10,1e-8,1e-6", show_default=True, help="gate error probabilities")
@click.option("--c", "c", type=float, default=fb.DEFAULT_C, show_default=True)
@click.option("--j1", type=int, default=1, show_default=True)
@click.option("--j2", type=int, default=1, show_default=True)
@click.option("--quotient", "quotient_mode", type=click.Choice(["auto", "exact", "bound"]), default="auto", show_default=True)
@click.option("--format", "fmt_name", type=click.Choice(["csv", "json"]), default="csv")
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None)
def ft_bound(dim, p_grid, q_grid, c, j1, j2, quotient_mode, fmt_name, output):
    """Lower bound on the fault-tolerant EA capacity of depolarizing channels."""
    rows = []
    for q in parse_grid(q_grid):
        for p in parse_grid(p_grid):
            try:
                r = fb.ft_ea_lower_bound(ch.Depolarizing(dim, p), fb.FtParams(q, c=c, j1=j1, j2=j2), quotient_mode)
            except ValueError as exc:
                raise click.UsageError(str(exc)) from None
            rows.append({
                "p": p, "q": q, "c": c, "c_ea": r.c_ea, "bound": r.value, "raw": r.raw,
                "f_dist": r.f_dist, "f_cont": r.f_cont, "f_avp": r.f_avp,
                "quotient": r.quotient, "quotient_source": r.quotient_source, "vacuous": r.vacuous,
            })
    emit(rows, fmt_name, output)


@main.command()
@click.option("--Lu", "lu", type=int, default=None)
@click.option("--Le", "le", type=int, default=None)
@click.option("--state", type=click.Choice(["00", "0+", "phi+"]), default=None)
@click.option("--gateset", type=click.Choice(["standard", "native"]), default="standard")
@click.option("--T-max", "t_max", type=int, default=0)
@click.option("--format", "fmt_name", type=click.Choice(["csv", "json"]), default="csv")
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None)
def threshold(lu, le, state, gateset, t_max, fmt_name, output):
    """Detection threshold from location counts, or a table over sequence lengths."""
    if lu is not None or le is not None:
        if lu is None or le is None or state is not None:
            raise click.UsageError("give both --Lu and --Le, or --state")
        try:
            click.echo(fmt(fb.detection_threshold(lu, le)))
        except ValueError as exc:
            raise click.UsageError(str(exc)) from None
        return
    if state is None:
        raise click.UsageError("give --Lu/--Le or --state")
    if t_max < 0:
        raise click.UsageError("--T-max must be non-negative")
    lu0, le0 = fb.BASE_COUNTS[(state, gateset)]
    rows = []
    for T in range(t_max + 1):
        frac = fb.sequence_threshold_exact(state, gateset, T)
        rows.append({"T": T, "state": state, "gateset": gateset, "L_u": lu0 + 2 * T, "L_e": le0 + 4 * T,
                     "p_th": float(frac), "fraction": f"{frac.numerator}/{frac.denominator}"})
    emit(rows, fmt_name, output)


@main.command()
@click.option("--state", type=click.Choice(["00", "0+", "phi+"]), default="phi+", show_default=True)
@click.option("--gateset", type=click.Choice(["standard", "native"]), default="standard", show_default=True)
@click.option("--noise", type=click.Choice(["none", "pauli", "depolarizing", "amplitude_damping"]), default="depolarizing", show_default=True)
@click.option("--param", type=float, default=0.05, show_default=True)
@click.option("--T-max", "t_max", type=int, default=10, show_default=True)
@click.option("--shots", type=int, default=10000, show_default=True)
@click.option("--seed", type=int, default=42, show_default=True)
@click.option("--noisy-waits", type=bool, default=True, show_default=True)
@click.option("--format", "fmt_name", type=click.Choice(["csv", "json"]), default="csv")
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None)
def simulate(state, gateset, noise, param, t_max, shots, seed, noisy_waits, fmt_name, output):
    """Lifetime experiment: TV distance against the number of identity rounds."""
    seed = resolve_seed(seed)
    try:
        model = sm.noise_from_name(noise, param)
        sm.validate_noise(model)
        if shots < 1 or not 0 <= t_max <= 100:
            raise ValueError("need shots >= 1 and 0 <= T-max <= 100")
        rows = sm.lifetime_experiment(state, gateset, model, t_max, shots, seed, noisy_waits)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from None
    emit([vars(r) | {} for r in rows], fmt_name, output)


@main.command()
@click.option("--seed", type=int, default=42, show_default=True)
def verify(seed):
    """Run the built-in invariant checks; exit 4 on any failure."""
    seed = resolve_seed(seed)
    results = vf.run_all(seed)
    for name, ok in results:
        click.echo(f"{'PASS' if ok else 'FAIL'} {name}")
    if not all(ok for _, ok in results):
        sys.exit(EXIT_VERIFY)


def run(argv: list[str] | None = None) -> int:
    """Invoke the CLI and return its exit status instead of exiting."""
    try:
        main.main(args=argv, prog_name="qshannon", standalone_mode=False)
    except click.UsageError as exc:
        exc.show()
        return EXIT_USAGE
    except click.exceptions.Abort:
        return 1
    except SystemExit as exc:
        return int(exc.code or 0)
    return 0


if __name__ == "__main__":
    main()

"""``eqpn`` command line.

Exit codes: 0 success, 1 usage or parse error, 2 validation diagnostics,
3 soundness contradiction found.
"""

from __future__ import annotations

import sys
from pathlib import Path
from typing import Optional, Sequence

import click

from eqpn import __version__
from eqpn.abstraction import AbstractionConfig, abstract_network, influence_differences
from eqpn.io_formats import ParseError, parse_bn, parse_qpn, serialize_bn, serialize_qpn
from eqpn.network import validate_bn, validate_qpn
from eqpn.oracle import (
    RandomBnSpec,
    campaign_specs,
    flip_arc,
    random_bn,
    run_campaign,
    validate_networks,
)
from eqpn.propagation import Mode, Observation, PropagationError, propagate_sequence
from eqpn.tables import render_table

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DIAGNOSTICS = 2
EXIT_CONTRADICTION = 3

_file = click.Path(exists=True, dir_okay=False, path_type=Path)
_delta = click.FloatRange(0.0, 1.0, min_open=True)


def _version(f):
    return click.version_option(__version__, prog_name="eqpn")(f)


def _err(message: str) -> None:
    click.echo(message, err=True)


def _read(path: Path, parser):
    text = path.read_text(encoding="utf-8")
    try:
        return parser(text)
    except ParseError as e:
        raise click.ClickException(f"{path}:{e.line}:{e.column}: expected {e.expected}, found {e.found!r}") from None


def _report_diagnostics(path: Path, diags) -> int:
    for d in diags:
        _err(f"{path}: {d}")
    return EXIT_DIAGNOSTICS


class _Observe(click.ParamType):
    name = "NODE=true|false"

    def convert(self, value, param, ctx):
        if isinstance(value, Observation):
            return value
        try:
            return Observation.parse(value)
        except ValueError as e:
            self.fail(str(e), param, ctx)


class _RandomSpec(click.ParamType):
    name = "n,density,max_parents"

    def convert(self, value, param, ctx):
        if isinstance(value, tuple):
            return value
        parts = value.split(",")
        try:
            n, density, max_parents = int(parts[0]), float(parts[1]), int(parts[2])
            if len(parts) != 3:
                raise ValueError
        except (ValueError, IndexError):
            self.fail(f"expected n,density,max_parents, got {value!r}", param, ctx)
        try:
            RandomBnSpec(n, max_parents, density, 0)
        except ValueError as e:
            self.fail(str(e), param, ctx)
        return n, density, max_parents


class _Deltas(click.ParamType):
    name = "d1,d2,..."

    def convert(self, value, param, ctx):
        if isinstance(value, tuple):
            return value
        try:
            deltas = tuple(float(x) for x in value.split(","))
        except ValueError:
            self.fail(f"expected comma-separated decimals, got {value!r}", param, ctx)
        for d in deltas:
            if not 0.0 < d <= 1.0:
                self.fail(f"cut-off {d} outside (0, 1]", param, ctx)
        return deltas


class _Arc(click.ParamType):
    name = "SRC:DST"

    def convert(self, value, param, ctx):
        if isinstance(value, tuple):
            return value
        src, sep, dst = value.partition(":")
        if not sep or not src or not dst:
            self.fail(f"expected SRC:DST, got {value!r}", param, ctx)
        return src, dst


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@_version
def cli() -> None:
    """Enhanced qualitative probabilistic networks."""


@cli.command("abstract")
@click.option("--bn", "bn_path", type=_file, required=True, help="Input .bn file.")
@click.option("--delta", type=_delta, required=True, help="Cut-off value in (0, 1].")
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), help="Output .qpn file (default: stdout).")
@_version
def cmd_abstract(bn_path: Path, delta: float, out: Optional[Path]) -> int:
    """Abstract a Bayesian network into an enhanced QPN."""
    b = _read(bn_path, parse_bn)
    diags = validate_bn(b)
    if diags:
        return _report_diagnostics(bn_path, diags)
    cfg = AbstractionConfig(delta)
    q = abstract_network(b, cfg)
    text = serialize_qpn(q)
    rows = [("arc", "min diff", "max diff", "sign")]
    for arc in q.arcs:
        diffs = [d for _, d in influence_differences(b, arc.src, arc.dst)]
        rows.append((f"{arc.src} -> {arc.dst}", f"{min(diffs):+.9g}", f"{max(diffs):+.9g}", str(arc.sign)))
    widths = [max(len(r[k]) for r in rows) for k in range(4)]
    table = "\n".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows)
    if out is None:
        click.echo(table, err=True)
        click.echo(text, nl=False)
    else:
        out.write_text(text, encoding="utf-8")
        click.echo(table)
    return EXIT_OK


@cli.command("propagate")
@click.option("--net", "net_path", type=_file, required=True, help="Input .qpn file.")
@click.option("--observe", "observations", type=_Observe(), multiple=True, required=True,
              help="NODE=true|false; repeat for a sequence of observations.")
@click.option("--mode", type=click.Choice([m.value for m in Mode]), default=Mode.ENHANCED.value, show_default=True)
@click.option("--trace", is_flag=True, help="Print the messages of the last observation.")
@click.option("--trace-all", is_flag=True, help="Print signs and messages for every observation.")
@_version
def cmd_propagate(net_path: Path, observations: Sequence[Observation], mode: str, trace: bool, trace_all: bool) -> int:
    """Propagate the last observation given the earlier ones."""
    q = _read(net_path, parse_qpn)
    diags = validate_qpn(q)
    if diags:
        return _report_diagnostics(net_path, diags)
    try:
        states = propagate_sequence(q, list(observations), Mode(mode))
    except PropagationError as e:
        raise click.ClickException(str(e)) from None
    if trace_all:
        for state in states[:-1]:
            click.echo(f"# observe {state.observation}")
            for line in state.trace_lines():
                click.echo(f"  {line}")
            for line in state.sign_lines():
                click.echo(line)
            click.echo()
        click.echo(f"# observe {states[-1].observation}")
    final = states[-1]
    if trace or trace_all:
        for line in final.trace_lines():
            click.echo(f"  {line}")
    for line in final.sign_lines():
        click.echo(line)
    for node in sorted(final.exhausted):
        _err(f"warning: update budget exhausted at {node}; sign set to ?")
    return EXIT_OK


@cli.command("validate")
@click.option("--bn", "bn_path", type=_file, help="Check a single .bn file.")
@click.option("--random", "random_spec", type=_RandomSpec(), help="Check random networks: n,density,max_parents.")
@click.option("--trials", type=click.IntRange(0), default=500, show_default=True, help="Number of random networks.")
@click.option("--delta", "deltas", type=_Deltas(), default="0.1,0.3,0.5", show_default=True)
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=1, show_default=True)
@click.option("--flip", "flips", type=_Arc(), multiple=True, help="Negate arc SRC:DST after abstraction (negative control).")
@click.option("--records", type=click.Path(dir_okay=False, path_type=Path), help="Write one JSON record per trial.")
@_version
def cmd_validate(bn_path, random_spec, trials, deltas, seed, flips, records) -> int:
    """Compare propagated signs with exact inference."""
    if (bn_path is None) == (random_spec is None):
        raise click.UsageError("give exactly one of --bn and --random")
    plant = None
    if flips:
        plants = [flip_arc(s, d) for s, d in flips]

        def plant(q):
            for p in plants:
                q = p(q)
            return q

    try:
        if bn_path is not None:
            b = _read(bn_path, parse_bn)
            diags = validate_bn(b)
            if diags:
                return _report_diagnostics(bn_path, diags)
            report = validate_networks([(bn_path.stem, b)], deltas, plant)
        else:
            n, density, max_parents = random_spec
            report = run_campaign(campaign_specs(trials, n, density, max_parents, seed), deltas, plant)
    except ValueError as e:
        raise click.ClickException(str(e)) from None
    click.echo(report.format_text())
    if records is not None:
        records.write_text(report.to_jsonl(), encoding="utf-8")
    return EXIT_OK if report.sound else EXIT_CONTRADICTION


@cli.command("tables")
@click.option("--op", type=click.Choice(["times", "plus"]), required=True)
@click.option("--mode", type=click.Choice([m.value for m in Mode]), default=Mode.ENHANCED.value, show_default=True)
@_version
def cmd_tables(op: str, mode: str) -> int:
    """Print an operator table."""
    click.echo(render_table(op, mode), nl=False)
    return EXIT_OK


@cli.command("gen")
@click.option("--nodes", type=int, required=True)
@click.option("--density", type=float, default=0.4, show_default=True)
@click.option("--max-parents", type=int, default=3, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), help="Output .bn file (default: stdout).")
@_version
def cmd_gen(nodes: int, density: float, max_parents: int, seed: int, out: Optional[Path]) -> int:
    """Write a random Bayesian network."""
    try:
        spec = RandomBnSpec(nodes, max_parents, density, seed)
    except ValueError as e:
        raise click.UsageError(str(e)) from None
    text = serialize_bn(random_bn(spec))
    if out is None:
        click.echo(text, nl=False)
    else:
        out.write_text(text, encoding="utf-8")
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        rv = cli.main(args=list(argv) if argv is not None else None, prog_name="eqpn", standalone_mode=False)
    except click.ClickException as e:
        e.show()
        return EXIT_USAGE
    except click.Abort:
        return EXIT_USAGE
    return rv if isinstance(rv, int) else EXIT_OK


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()

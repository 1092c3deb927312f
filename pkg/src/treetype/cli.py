"""Command-line front door: gallery, analyze, export."""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .planar import GraphError
from .reporting import (AnalysisConfig, ConfigError, run_analysis,
                        trace_csv, write_report)
from .speiser import SpeiserError, extend, triangulate_and_dualize
from .textio import FormatError, parse_graph, parse_tree, print_graph, print_tree, to_dot
from .trees import BUILTIN_NAMES, FamilyError, builtin_family, generate

FAMILY_PARAM_OPTS = (
    ("valence", "homogeneous valence d"),
    ("rays", "star ray count"),
    ("ends", "standard model end count"),
    ("tooth", "caterpillar tooth length"),
    ("base", "branch length schedule base"),
)


def _family(name, kwargs):
    params = {k: v for k, v in kwargs.items()
              if k in dict(FAMILY_PARAM_OPTS) and v is not None}
    return builtin_family(name, **params)


@click.group()
def main():
    """Combinatorial laboratory for plane trees, Speiser graphs and the
    type problem."""


def family_options(f):
    for name, helptext in FAMILY_PARAM_OPTS:
        f = click.option(f"--{name}", type=int, default=None, help=helptext)(f)
    return f


@main.command()
@click.argument("family", type=click.Choice(BUILTIN_NAMES))
@click.option("--depth", type=int, default=6, show_default=True)
@click.option("--height", type=int, default=None,
              help="lattice height for the extension (default: depth)")
@click.option("--out", "out_dir", type=click.Path(), default=".",
              show_default=True)
@click.option("--emit-dot/--no-emit-dot", default=True, show_default=True)
@family_options
def gallery(family, depth, height, out_dir, emit_dot, **kwargs):
    """Emit tree, Speiser graph, and extended graph files for a family."""
    try:
        fam = _family(family, kwargs)
        t = generate(fam, depth)
        sp = triangulate_and_dualize(t)
        ext = extend(sp, None, h=height or depth)
        ext_graph = ext.to_rotation_graph()
    except (FamilyError, SpeiserError, GraphError) as ex:
        raise click.ClickException(str(ex))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stem = f"{fam.name}_d{depth}"
    files = {
        f"{stem}_tree.txt": print_tree(t, name=f"{fam.name}-tree"),
        f"{stem}_speiser.txt": print_graph(sp.graph, name=f"{fam.name}-speiser"),
        f"{stem}_gamma_inf.txt": print_graph(ext_graph,
                                             name=f"{fam.name}-gamma-inf"),
    }
    if emit_dot:
        files[f"{stem}_tree.dot"] = to_dot(t.graph, name=f"{fam.name}-tree")
        files[f"{stem}_speiser.dot"] = to_dot(sp.graph,
                                              name=f"{fam.name}-speiser")
        files[f"{stem}_gamma_inf.dot"] = to_dot(ext_graph,
                                                name=f"{fam.name}-gamma-inf")
    for fname, content in files.items():
        (out / fname).write_text(content)
        click.echo(f"wrote {out / fname}")


@main.command()
@click.argument("family", type=str)
@click.option("--depth-schedule", default="16,32,64,128", show_default=True,
              help="comma-separated increasing depths")
@click.option("--criteria", default="tuc,ramified,dm", show_default=True,
              help="comma-separated: tuc,ramified,dm,nw,thomassen,qi")
@click.option("--delta", type=float, default=0.05, show_default=True)
@click.option("--tau", type=float, default=0.01, show_default=True)
@click.option("--epsilon", "epsilons", default="0.25", show_default=True,
              help="comma-separated isoperimetric exponent offsets")
@click.option("--gamma-n", type=int, default=None,
              help="extension index n (default: infinity)")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_dir", type=click.Path(), default="analysis",
              show_default=True)
@click.option("--emit-csv/--no-emit-csv", default=True, show_default=True)
@click.option("--emit-png/--no-emit-png", default=True, show_default=True)
@family_options
def analyze(family, depth_schedule, criteria, delta, tau, epsilons, gamma_n,
            seed, out_dir, emit_csv, emit_png, **kwargs):
    """Run the type analyses for a builtin family or a tree file.

    Verdicts are data: the exit code is 0 whenever the run completes,
    whatever the evidence says.
    """
    try:
        cfg = AnalysisConfig(
            family=family,
            params={k: v for k, v in kwargs.items() if v is not None},
            depths=tuple(int(x) for x in depth_schedule.split(",")),
            criteria=tuple(criteria.split(",")),
            delta=delta, tau=tau,
            epsilons=tuple(float(x) for x in epsilons.split(",")),
            gamma_n=gamma_n, seed=seed)
        fam = None
        if Path(family).exists():
            tree = parse_tree(Path(family).read_text())
            if tree.family is not None:
                fam = tree.family
            else:
                raise click.ClickException(
                    "explicit truncation files carry no generator; analyze "
                    "needs a builtin family name or a family file")
        report = run_analysis(cfg, family=fam)
    except (ConfigError, FamilyError, FormatError) as ex:
        raise click.ClickException(str(ex))
    written = write_report(report, out_dir, emit_csv=emit_csv,
                           emit_png=emit_png)
    click.echo(report.body_text())
    for p in written:
        click.echo(f"wrote {p}")


@main.command()
@click.argument("input_file", type=click.Path(exists=True))
@click.option("--format", "fmt", type=click.Choice(["text", "dot", "csv-trace"]),
              default="dot", show_default=True)
@click.option("--out", "out_path", type=click.Path(), default=None)
def export(input_file, fmt, out_path):
    """Convert a graph file between the textual format and DOT, or a report
    JSON into CSV traces."""
    text = Path(input_file).read_text()
    try:
        if fmt == "csv-trace":
            import json
            data = json.loads(text)
            rows = []
            for key, v in sorted(data["body"]["verdicts"].items()):
                for x, y in v["trace"]:
                    rows.append(f"{key},{x},{y}")
            outtext = "criterion,index,value\n" + "\n".join(rows) + "\n"
        else:
            g, meta = parse_graph(text)
            if g is None:
                raise click.ClickException("family files have no graph to export")
            if fmt == "dot":
                outtext = to_dot(g)
            else:
                outtext = print_graph(g, root=meta.get("root"),
                                      frontier=meta.get("frontier"))
    except (FormatError, GraphError) as ex:
        raise click.ClickException(str(ex))
    if out_path:
        Path(out_path).write_text(outtext)
        click.echo(f"wrote {out_path}")
    else:
        click.echo(outtext, nl=False)


if __name__ == "__main__":
    main()

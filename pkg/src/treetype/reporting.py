"""Analysis configuration, run reports, delimited traces, and figures.

A run evaluates the requested criteria for one tree family, writes a
deterministic text/JSON report (timing kept apart from the body), one CSV
per numeric trace, and a PNG figure per trace.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

from .network import NetworkError
from .speiser import SpeiserError, extend, triangulate_and_dualize
from .trees import (FamilyError, TreeFamily, builtin_family, check_tuc,
                    generate, kernel_of)
from .type_engine import (DELTA, HYPERBOLIC, INCONCLUSIVE, PARABOLIC, TAU,
                          TypeEngineError, TypeVerdict,
                          doyle_merenkov_pipeline, homogeneous_ladder_builder,
                          nevanlinna_wittich, resistance_to_infinity,
                          thomassen_isoperimetric, totally_ramified_test,
                          tree_multiplicities)

VERSION = "0.1.0"

ALL_CRITERIA = ("tuc", "ramified", "dm", "nw", "thomassen", "qi")


class ConfigError(ValueError):
    pass


@dataclass
class AnalysisConfig:
    family: str = None
    params: dict = field(default_factory=dict)
    depths: tuple = (16, 32, 64, 128)
    criteria: tuple = ("tuc", "ramified", "dm")
    delta: float = DELTA
    tau: float = TAU
    epsilons: tuple = (0.25,)
    gamma_n: object = None          # None: Gamma_infinity
    seed: int = 0
    qi_radius: int = 10
    max_vertices: int = 2_000_000

    def __post_init__(self):
        self.depths = tuple(int(d) for d in self.depths)
        if any(b <= a for a, b in zip(self.depths, self.depths[1:])):
            raise ConfigError("depth schedule must be strictly increasing")
        if self.delta <= 0 or self.tau <= 0 or any(e <= 0 for e in self.epsilons):
            raise ConfigError("thresholds must be positive")
        for c in self.criteria:
            if c not in ALL_CRITERIA:
                raise ConfigError(f"unknown criterion {c!r}")

    def to_dict(self):
        return {
            "family": self.family, "params": dict(self.params),
            "depths": list(self.depths), "criteria": list(self.criteria),
            "delta": self.delta, "tau": self.tau,
            "epsilons": list(self.epsilons),
            "gamma_n": self.gamma_n, "seed": self.seed,
            "qi_radius": self.qi_radius,
        }


@dataclass
class RunReport:
    config: dict
    tuc: object
    verdicts: dict
    qi_witness: object
    banner: str
    notes: list
    timing: dict
    version: str = VERSION

    def body_text(self) -> str:
        lines = [f"treetype run report (version {self.version})", ""]
        lines.append("[config]")
        for k in sorted(self.config):
            lines.append(f"  {k} = {self.config[k]}")
        if self.tuc is not None:
            lines.append("")
            lines.append("[tuc]")
            lines.append(f"  pass = {self.tuc.tuc_pass}")
            lines.append(f"  B = {self.tuc.B}")
            lines.append(f"  N = {self.tuc.N}")
            lines.append(f"  M = {self.tuc.M}")
            for cond in ("T1", "T2", "T3"):
                lines.append(f"  {cond} = {self.tuc.passes[cond]}")
            lines.append(f"  stable_depth = {self.tuc.stable_depth}")
            for name, series in sorted(self.tuc.trace.items()):
                lines.append(f"  trace.{name} = {series}")
        for key in sorted(self.verdicts):
            v = self.verdicts[key]
            lines.append("")
            lines.append(f"[{key}]")
            lines.append(f"  criterion = {v.criterion}")
            lines.append(f"  verdict = {v.verdict}")
            for tk in sorted(v.thresholds):
                lines.append(f"  threshold.{tk} = {v.thresholds[tk]}")
            lines.append(f"  trace = {[(x, round(float(y), 9)) for x, y in v.trace]}")
            if v.notes:
                lines.append(f"  notes = {v.notes}")
        if self.qi_witness is not None:
            w = self.qi_witness
            lines.append("")
            lines.append("[qi]")
            lines.append(f"  k = {w.k}")
            lines.append(f"  C = {w.C}")
            lines.append(f"  epsilon = {w.epsilon}")
            lines.append(f"  pairs = {w.sample_count}")
            lines.append(f"  worst_pair = {w.violating_pair}")
            for pk in sorted(w.predicted):
                lines.append(f"  predicted.{pk} = {w.predicted[pk]}")
        lines.append("")
        lines.append("[verdict]")
        lines.append(f"  banner = {self.banner}")
        for note in self.notes:
            lines.append(f"  note = {note}")
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        out = self.body_text()
        out += "\n# timing (excluded from determinism checks)\n"
        for k in sorted(self.timing):
            out += f"# {k} = {self.timing[k]:.3f}s\n"
        return out

    def to_json(self) -> str:
        def verdict_dict(v):
            return {"criterion": v.criterion, "verdict": v.verdict,
                    "trace": [[x, float(y)] for x, y in v.trace],
                    "thresholds": {k: str(val) for k, val in v.thresholds.items()},
                    "notes": v.notes}
        body = {
            "version": self.version,
            "config": self.config,
            "tuc": None if self.tuc is None else {
                "pass": self.tuc.tuc_pass, "B": str(self.tuc.B),
                "N": str(self.tuc.N), "M": str(self.tuc.M),
                "passes": self.tuc.passes,
                "stable_depth": self.tuc.stable_depth,
                "trace": {k: v for k, v in self.tuc.trace.items()},
            },
            "verdicts": {k: verdict_dict(v) for k, v in sorted(self.verdicts.items())},
            "qi": None if self.qi_witness is None else {
                "k": self.qi_witness.k, "C": self.qi_witness.C,
                "epsilon": self.qi_witness.epsilon,
                "pairs": self.qi_witness.sample_count,
                "predicted": {k: str(v) for k, v in self.qi_witness.predicted.items()},
            },
            "banner": self.banner,
            "notes": self.notes,
        }
        return json.dumps({"body": body, "timing": self.timing},
                          indent=2, sort_keys=True, default=str)


def cap_depths(family: TreeFamily, depths, lookahead=2, budget=2_000_000):
    """Longest feasible prefix of the schedule; falls back to a dyadic
    schedule when even the first depth is too large to materialize."""
    ok = []
    for d in depths:
        try:
            generate(family, lookahead * d, max_vertices=budget)
        except FamilyError:
            break
        ok.append(d)
    if len(ok) >= 2:
        return ok, len(ok) < len(depths)
    d, out = 2, []
    while len(out) < 4:
        try:
            generate(family, lookahead * d, max_vertices=budget)
        except FamilyError:
            break
        out.append(d)
        d *= 2
    if len(out) < 2:
        raise FamilyError(f"{family.name}: no feasible analysis depth")
    return out, True


def run_analysis(config: AnalysisConfig, family: TreeFamily = None) -> RunReport:
    if family is None:
        family = builtin_family(config.family, **config.params)
    timing = {}
    notes = []
    verdicts = {}
    tuc = None
    qi_witness = None

    depths, capped = cap_depths(family, config.depths,
                                budget=config.max_vertices)
    if capped:
        notes.append(f"depth schedule capped to {depths} "
                     f"(family too large beyond)")

    if "tuc" in config.criteria:
        t0 = time.perf_counter()
        tuc = check_tuc(family, depths, max_vertices=config.max_vertices)
        timing["tuc"] = time.perf_counter() - t0

    if "ramified" in config.criteria:
        t0 = time.perf_counter()
        probe = generate(family, min(depths[0], 6),
                         max_vertices=config.max_vertices)
        verdicts["ramified"] = totally_ramified_test(tree_multiplicities(probe))
        timing["ramified"] = time.perf_counter() - t0

    if "dm" in config.criteria:
        t0 = time.perf_counter()
        try:
            if family.name == "homogeneous":
                # the materialized tree is unreachable at these depths; the
                # spherically symmetric reduction is exact for the tree
                res = resistance_to_infinity(
                    homogeneous_ladder_builder(family.params["valence"]),
                    config.depths, delta=config.delta, tau=config.tau)
                res.notes = "exact spherical reduction of the homogeneous tree"
                verdicts["dm"] = res
            else:
                verdicts["dm"] = doyle_merenkov_pipeline(
                    family, config.gamma_n, depths, delta=config.delta,
                    tau=config.tau, max_vertices=config.max_vertices)
        except (FamilyError, SpeiserError, NetworkError, TypeEngineError) as ex:
            notes.append(f"dm skipped: {ex}")
        timing["dm"] = time.perf_counter() - t0

    if "nw" in config.criteria:
        t0 = time.perf_counter()
        try:
            nw_depth = depths[-1]
            sp = triangulate_and_dualize(
                generate(family, nw_depth, max_vertices=config.max_vertices))
            verdicts["nw"] = nevanlinna_wittich(sp, delta=config.delta)
        except (FamilyError, SpeiserError, TypeEngineError) as ex:
            notes.append(f"nw skipped: {ex}")
        timing["nw"] = time.perf_counter() - t0

    if "thomassen" in config.criteria:
        t0 = time.perf_counter()
        for eps in config.epsilons:
            try:
                graphs = []
                for d in depths:
                    t = generate(family, d, max_vertices=config.max_vertices)
                    sp = triangulate_and_dualize(t)
                    ext = extend(sp, config.gamma_n, h=d)
                    graphs.append((d, ext.adjacency(), ext.boundary_vertices()))
                verdicts[f"thomassen(eps={eps})"] = thomassen_isoperimetric(
                    graphs, root=0, epsilon=eps)
            except (FamilyError, SpeiserError, TypeEngineError) as ex:
                notes.append(f"thomassen(eps={eps}) skipped: {ex}")
        timing["thomassen"] = time.perf_counter() - t0

    if "qi" in config.criteria:
        t0 = time.perf_counter()
        try:
            qi_witness = _qi_check(family, config)
        except Exception as ex:
            notes.append(f"qi skipped: {ex}")
        timing["qi"] = time.perf_counter() - t0

    banner = _banner(tuc, verdicts)
    cfg = config.to_dict()
    cfg["family"] = family.name
    cfg["params"] = dict(family.params)
    return RunReport(config=cfg, tuc=tuc, verdicts=verdicts,
                     qi_witness=qi_witness, banner=banner, notes=notes,
                     timing=timing)


def _qi_check(family, config):
    from .quasi import build_phi, measure_tuc_constants, verify_qi
    from .speiser import extend_tree
    from .trees import induced_truncation
    radius = config.qi_radius
    depth = max(3 * radius, 12)
    h = 2 * radius + 2
    t = generate(family, depth, max_vertices=config.max_vertices)
    kern = kernel_of(t)
    ext_t = extend_tree(t, h=h)
    kt = induced_truncation(t, kern.vertices)
    ext_k = extend_tree(kt, h=2 * h + 4)
    phi = build_phi(t, kern, ext_t, ext_k)
    w = verify_qi(phi, sample_radius=radius, seed=config.seed)
    consts = measure_tuc_constants(t, kern)
    w.predicted.update({
        "C_tree_bound": 2 * consts["M"],
        "C_overall_bound": 2 * consts["M"] + 2 * consts["A"] * consts["B"],
        "A": consts["A"], "B": consts["B"], "M": consts["M"],
    })
    return w


def _banner(tuc, verdicts):
    ram = verdicts.get("ramified")
    if ram is not None and ram.verdict == HYPERBOLIC:
        return ("no true form: a totally ramified defect sum exceeds 2 "
                f"({ram.aux['defect_sum']})")
    dm = verdicts.get("dm")
    if tuc is not None and tuc.tuc_pass and dm is not None \
            and dm.verdict == PARABOLIC:
        return ("true form exists: uniformness conditions hold and the "
                "extended graph shows parabolic evidence")
    if dm is not None and dm.verdict == HYPERBOLIC:
        return "hyperbolic evidence: no entire realization expected"
    hyp = [k for k, v in verdicts.items() if v.verdict == HYPERBOLIC]
    par = [k for k, v in verdicts.items() if v.verdict == PARABOLIC]
    if hyp and not par:
        return f"hyperbolic evidence via {', '.join(sorted(hyp))}"
    if par and not hyp:
        return f"parabolic evidence via {', '.join(sorted(par))}"
    return "inconclusive at this truncation scale"


# --------------------------------------------------------------------------
# file emission
# --------------------------------------------------------------------------

def trace_csv(verdict: TypeVerdict) -> str:
    lines = ["index,value"]
    for x, y in verdict.trace:
        lines.append(f"{x},{float(y):.12g}")
    return "\n".join(lines) + "\n"


def write_report(report: RunReport, out_dir, emit_csv=True, emit_png=True):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.txt").write_text(report.to_text())
    (out / "report.json").write_text(report.to_json())
    written = [out / "report.txt", out / "report.json"]
    if emit_csv:
        tdir = out / "traces"
        tdir.mkdir(exist_ok=True)
        for key, v in sorted(report.verdicts.items()):
            safe = key.replace("(", "_").replace(")", "").replace("=", "-")
            p = tdir / f"{safe}.csv"
            p.write_text(trace_csv(v))
            written.append(p)
    if emit_png:
        written.extend(render_figures(report, out / "figures"))
    return written


_FIGURE_STYLE = {
    "resistance-to-infinity": ("depth", "effective resistance", True),
    "doyle-merenkov": ("depth", "effective resistance", True),
    "nested-annuli": ("annulus count", "sum of 1/mod", True),
    "nevanlinna-wittich": ("generation", "sum of 1/s(n)", True),
    "thomassen-isoperimetric": ("depth", "isoperimetric constant", True),
    "totally-ramified": ("values", "defect sum", False),
}


def render_figures(report: RunReport, fig_dir):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    fig_dir = Path(fig_dir)
    fig_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for key, v in sorted(report.verdicts.items()):
        if len(v.trace) < 2:
            continue
        xlab, ylab, logx = _FIGURE_STYLE.get(v.criterion, ("index", "value", False))
        xs = [x for x, _ in v.trace]
        ys = [float(y) for _, y in v.trace]
        fig, ax = plt.subplots(figsize=(4.2, 3.0))
        ax.plot(xs, ys, marker="o", markersize=3, linewidth=1)
        if logx and min(xs) > 0:
            ax.set_xscale("log", base=2)
        ax.set_xlabel(xlab)
        ax.set_ylabel(ylab)
        ax.set_title(f"{v.criterion}: {v.verdict}", fontsize=9)
        ax.grid(alpha=0.3)
        fig.tight_layout()
        safe = key.replace("(", "_").replace(")", "").replace("=", "-")
        p = fig_dir / f"{safe}.png"
        fig.savefig(p, dpi=110)
        plt.close(fig)
        written.append(p)
    return written

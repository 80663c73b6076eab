"""Evaluation harness: feature extraction over a corpus, person-based and
general k-NN evaluation, MFCC vs GTCC comparison, and table reports
(one row per subject with SEN / SEL / SPE and a final Average row,
percentages printed with 2 decimals).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import click

from . import features, fixture, knn, profiles


@dataclass
class EvalConfig:
    corpus_root: Path
    feature_kinds: Sequence[str] = ("GAMMATONE", "MFCC")
    k_values: Sequence[int] = (1,)
    train_frac: float = 0.7
    seed: int = 42
    scopes: Sequence[str] = ("person", "general")
    output_dir: Optional[Path] = None

    def __post_init__(self):
        if not 0 < self.train_frac < 1:
            raise ValueError("train_frac must lie in (0, 1)")
        if any(k < 1 for k in self.k_values):
            raise ValueError("k values must be >= 1")


def _kind_of(name: str) -> features.BankKind:
    return features.BankKind.MEL if name.upper() in ("MEL", "MFCC") else features.BankKind.GAMMATONE


def _kind_label(name: str) -> str:
    return "MFCC" if _kind_of(name) is features.BankKind.MEL else "GTCC"


def _round2(x: float) -> float:
    return round(x + 1e-12, 2)


def _evaluate_split(train: knn.LabeledDataset, test: knn.LabeledDataset, k: int):
    model = knn.KnnModel(min(k, len(train)), train)
    cm = knn.evaluate(model, test)
    rep = knn.metrics(cm)
    return cm, rep


def run_eval(cfg: EvalConfig) -> dict:
    """Run every feature kind x scope x k combination; returns the report
    and, when an output dir is configured, writes JSON and text files."""
    runs = []
    for kind_name in cfg.feature_kinds:
        kind = _kind_of(kind_name)
        ds, skip = profiles.load_corpus(profiles.CorpusLayout(Path(cfg.corpus_root)), kind)
        if len(ds) == 0:
            raise ValueError(f"no usable takes under {cfg.corpus_root}")
        speakers = sorted(set(ds.speakers))
        for k in cfg.k_values:
            if "person" in cfg.scopes:
                subjects = []
                for spk in speakers:
                    train, test = knn.split_person_based(ds, spk, cfg.train_frac, cfg.seed)
                    cm, rep = _evaluate_split(train, test, k)
                    subjects.append(
                        {
                            "subject": spk,
                            "SEN": _round2(rep.macro_sen),
                            "SEL": _round2(rep.macro_sel),
                            "SPE": _round2(rep.macro_spe),
                            "overall": _round2(rep.overall),
                            "confusion": cm.to_json(),
                            "train_size": len(train),
                            "test_size": len(test),
                        }
                    )
                avg = {
                    col: _round2(sum(s[col] for s in subjects) / len(subjects))
                    for col in ("SEN", "SEL", "SPE", "overall")
                }
                runs.append(
                    {
                        "feature_kind": _kind_label(kind_name),
                        "scope": "person",
                        "k": k,
                        "subjects": subjects,
                        "average": avg,
                    }
                )
            if "general" in cfg.scopes:
                train, test = knn.split_general(ds, cfg.train_frac, cfg.seed)
                cm, rep = _evaluate_split(train, test, k)
                runs.append(
                    {
                        "feature_kind": _kind_label(kind_name),
                        "scope": "general",
                        "k": k,
                        "SEN": _round2(rep.macro_sen),
                        "SEL": _round2(rep.macro_sel),
                        "SPE": _round2(rep.macro_spe),
                        "overall": _round2(rep.overall),
                        "confusion": cm.to_json(),
                        "train_membership": _membership(ds, train),
                        "test_membership": _membership(ds, test),
                    }
                )
        if skip.skipped:
            runs.append({"feature_kind": _kind_label(kind_name), "skipped": skip.skipped})
    report = {
        "config": {
            "corpus_root": str(cfg.corpus_root),
            "feature_kinds": [
                _kind_label(kn) for kn in cfg.feature_kinds
            ],
            "k_values": list(cfg.k_values),
            "train_frac": cfg.train_frac,
            "seed": cfg.seed,
            "scopes": list(cfg.scopes),
        },
        "runs": runs,
    }
    if cfg.output_dir is not None:
        out = Path(cfg.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "eval.json").write_text(json.dumps(report, indent=2, sort_keys=True))
        (out / "eval.txt").write_text(format_report(report))
    return report


def _membership(ds: knn.LabeledDataset, subset: knn.LabeledDataset) -> List[str]:
    # stable identity for split-equality checks across feature kinds
    return list(subset.ids)


def format_run(run: dict) -> str:
    """One run as a plain-text table."""
    if "skipped" in run:
        lines = [f"{run['feature_kind']} skipped files:"]
        lines += [f"  {path}: {why}" for path, why in run["skipped"]]
        return "\n".join(lines) + "\n"
    head = f"{run['feature_kind']} k-NN (k={run['k']})"
    if run["scope"] == "person":
        lines = [f"{head} person-based classification", ""]
        lines.append(f"{'Subject':<10}{'SEN':>8}{'SEL':>8}{'SPE':>8}")
        for s in run["subjects"]:
            lines.append(f"{s['subject']:<10}{s['SEN']:>8.2f}{s['SEL']:>8.2f}{s['SPE']:>8.2f}")
        a = run["average"]
        lines.append(f"{'Average':<10}{a['SEN']:>8.2f}{a['SEL']:>8.2f}{a['SPE']:>8.2f}")
        return "\n".join(lines) + "\n"
    return (
        f"{head} general classification: overall {run['overall']:.2f} "
        f"(SEN {run['SEN']:.2f}, SEL {run['SEL']:.2f}, SPE {run['SPE']:.2f})\n"
    )


def format_report(report: dict) -> str:
    return "\n".join(format_run(r) for r in report["runs"])


def compare_features(cfg: EvalConfig) -> dict:
    """Run both feature kinds on identical splits and report overall deltas
    (GTCC minus MFCC) per scope and k."""
    cfg2 = EvalConfig(
        corpus_root=cfg.corpus_root,
        feature_kinds=("GAMMATONE", "MFCC"),
        k_values=cfg.k_values,
        train_frac=cfg.train_frac,
        seed=cfg.seed,
        scopes=cfg.scopes,
        output_dir=None,
    )
    report = run_eval(cfg2)
    deltas = []
    for k in cfg.k_values:
        for scope in cfg.scopes:
            pair: Dict[str, float] = {}
            for run in report["runs"]:
                if run.get("scope") == scope and run.get("k") == k:
                    if scope == "person":
                        pair[run["feature_kind"]] = run["average"]["overall"]
                    else:
                        pair[run["feature_kind"]] = run["overall"]
            if {"GTCC", "MFCC"} <= set(pair):
                deltas.append(
                    {
                        "scope": scope,
                        "k": k,
                        "gtcc_overall": pair["GTCC"],
                        "mfcc_overall": pair["MFCC"],
                        "delta": _round2(pair["GTCC"] - pair["MFCC"]),
                    }
                )
    out = {"report": report, "deltas": deltas}
    if cfg.output_dir is not None:
        dest = Path(cfg.output_dir)
        dest.mkdir(parents=True, exist_ok=True)
        (dest / "compare.json").write_text(json.dumps(out, indent=2, sort_keys=True))
    return out


@click.group()
def cli():
    """Voice-chess recognition evaluation tools."""


@cli.command("gen-fixture")
@click.option("--root", type=click.Path(path_type=Path), required=True)
@click.option("--speakers", type=int, default=10, show_default=True)
@click.option("--takes", type=int, default=10, show_default=True)
@click.option("--seed", type=int, default=42, show_default=True)
def gen_fixture(root: Path, speakers: int, takes: int, seed: int):
    """Generate a synthetic corpus under ROOT."""
    fixture.generate_corpus(root, speakers, takes, seed)
    click.echo(f"wrote {speakers} speakers x 29 words x {takes} takes under {root}")


@cli.command("extract")
@click.option("--root", type=click.Path(path_type=Path, exists=True), required=True)
@click.option("--kind", type=click.Choice(["GTCC", "MFCC"]), default="GTCC", show_default=True)
def extract(root: Path, kind: str):
    """Embed every take (fills the on-disk embedding cache)."""
    ds, skip = profiles.load_corpus(profiles.CorpusLayout(root), _kind_of(kind))
    click.echo(f"{len(ds)} embeddings, {len(skip.skipped)} skipped")
    for path, why in skip.skipped:
        click.echo(f"  skipped {path}: {why}", err=True)


@cli.command("eval")
@click.option("--root", type=click.Path(path_type=Path, exists=True), required=True)
@click.option("--kinds", default="GTCC,MFCC", show_default=True)
@click.option("--k", "k_values", default="1", show_default=True, help="comma-separated k values")
@click.option("--train-frac", type=float, default=0.7, show_default=True)
@click.option("--seed", type=int, default=42, show_default=True)
@click.option("--scopes", default="person,general", show_default=True)
@click.option("--out", type=click.Path(path_type=Path), default=None)
def eval_cmd(root, kinds, k_values, train_frac, seed, scopes, out):
    """Run the full evaluation and print the tables."""
    cfg = EvalConfig(
        corpus_root=root,
        feature_kinds=tuple(kinds.split(",")),
        k_values=tuple(int(v) for v in k_values.split(",")),
        train_frac=train_frac,
        seed=seed,
        scopes=tuple(scopes.split(",")),
        output_dir=out,
    )
    click.echo(format_report(run_eval(cfg)))


@cli.command("compare")
@click.option("--root", type=click.Path(path_type=Path, exists=True), required=True)
@click.option("--k", "k_values", default="1", show_default=True)
@click.option("--train-frac", type=float, default=0.7, show_default=True)
@click.option("--seed", type=int, default=42, show_default=True)
@click.option("--out", type=click.Path(path_type=Path), default=None)
def compare(root, k_values, train_frac, seed, out):
    """GTCC vs MFCC on identical splits."""
    cfg = EvalConfig(
        corpus_root=root,
        k_values=tuple(int(v) for v in k_values.split(",")),
        train_frac=train_frac,
        seed=seed,
        output_dir=out,
    )
    result = compare_features(cfg)
    for d in result["deltas"]:
        click.echo(
            f"{d['scope']:>8} k={d['k']}: GTCC {d['gtcc_overall']:.2f}  "
            f"MFCC {d['mfcc_overall']:.2f}  delta {d['delta']:+.2f}"
        )


@cli.command("report")
@click.argument("json_path", type=click.Path(path_type=Path, exists=True))
def report_cmd(json_path: Path):
    """Re-render the text tables from a saved JSON report."""
    click.echo(format_report(json.loads(Path(json_path).read_text())))


if __name__ == "__main__":
    cli()

"""Command-line pipeline: build, classify, eval, sweep, diff, explain,
generate. Machine-readable results go to files; a short human summary
goes to standard output.

Exit codes: 0 success, 2 parse error, 3 dimension mismatch, 4 bad
configuration or usage, 5 I/O failure.
"""

from __future__ import annotations

import json
import sys

import click

from . import core, dataio, evalkit, explain
from .errors import ConfigError, DimensionMismatchError, ParseError

EXIT_PARSE = 2
EXIT_DIMENSION = 3
EXIT_CONFIG = 4
EXIT_IO = 5


def _split_list(raw: str, what: str, convert):
    items = [item.strip() for item in raw.split(",") if item.strip()]
    if not items:
        raise ConfigError(f"{what} list is empty")
    try:
        return [convert(item) for item in items]
    except ValueError:
        raise ConfigError(f"invalid {what} list {raw!r}") from None


@click.group()
def cli():
    """Fuzzy fingerprint classification toolkit."""


@cli.command("build")
@click.argument("train_dataset")
@click.argument("library_out")
@click.option("--k", type=int, required=True, help="Fingerprint size (top-k features).")
@click.option("--a", type=float, default=0.8, show_default=True, help="Membership slope.")
@click.option("--norm", type=float, default=None, help="Similarity normalizer N (default: k).")
@click.option("--classes", default=None, help="Comma-separated class order override.")
def cmd_build(train_dataset, library_out, k, a, norm, classes):
    """Build a fingerprint library from a labeled dataset."""
    ds = dataio.read_dataset(train_dataset)
    order = ds.classes
    if classes is not None:
        order = _split_list(classes, "class", str)
        if sorted(order) != sorted(ds.classes):
            raise ConfigError("--classes must be a permutation of the dataset classes")
    if k >= ds.dim:
        click.echo(
            f"warning: k={k} >= dimension {ds.dim}; fingerprints hold {ds.dim} entries",
            err=True,
        )
    lib = core.build_library(ds.by_class(), k=k, a=a, norm=norm, class_order=order)
    dataio.save_library(lib, library_out)
    click.echo(
        f"wrote library {library_out} ({len(lib.class_order)} classes, dim={lib.dim}, "
        f"k={lib.k}, a={lib.a}, norm={lib.norm})"
    )


@cli.command("classify")
@click.argument("library")
@click.argument("dataset")
@click.argument("predictions_out")
@click.option("--scores-out", default=None, help="Also dump per-instance class scores (CSV).")
def cmd_classify(library, dataset, predictions_out, scores_out):
    """Classify a dataset against a fingerprint library."""
    lib = dataio.load_library(library)
    ds = dataio.read_dataset(dataset)
    preds: dict[str, str] = {}
    scores: dict[str, dict[str, float]] = {}
    for inst_id, _, vec in ds.instances():
        result = core.classify(vec, lib, label=inst_id)
        preds[inst_id] = result.predicted
        scores[inst_id] = result.scores
        for message in result.warnings:
            click.echo(f"warning: {inst_id}: {message}", err=True)
    evalkit.write_predictions(preds, ds.ids, predictions_out)
    if scores_out is not None:
        with open(scores_out, "w", encoding="utf-8") as fh:
            fh.write("id," + ",".join(lib.class_order) + "\n")
            for inst_id in ds.ids:
                cells = ",".join(repr(scores[inst_id][cls]) for cls in lib.class_order)
                fh.write(f"{inst_id},{cells}\n")
    click.echo(f"classified {len(ds)} instances -> {predictions_out}")


@cli.command("eval")
@click.argument("gold_dataset")
@click.argument("predictions")
@click.option("--report-out", default=None, help="Also write the full report as JSON.")
def cmd_eval(gold_dataset, predictions, report_out):
    """Score a predictions file against gold labels."""
    gold = dataio.read_dataset(gold_dataset)
    preds = evalkit.read_predictions(predictions)
    report = evalkit.evaluate(preds, gold)
    if report_out is not None:
        with open(report_out, "w", encoding="utf-8") as fh:
            json.dump(evalkit.report_to_dict(report), fh, indent=2)
            fh.write("\n")
    click.echo(evalkit.render_report(report), nl=False)


@cli.command("sweep")
@click.argument("train_dataset")
@click.argument("validation_dataset")
@click.option("--k", "k_list", required=True, help="Comma-separated fingerprint sizes.")
@click.option("--a", type=float, default=0.8, show_default=True, help="Membership slope.")
@click.option("--norm", type=float, default=None, help="Similarity normalizer N (default: k).")
@click.option("--plot-out", default=None, help="Write (k, macro_f1) plot data.")
def cmd_sweep(train_dataset, validation_dataset, k_list, a, norm, plot_out):
    """Score every fingerprint size in a list on a validation split."""
    train = dataio.read_dataset(train_dataset)
    validation = dataio.read_dataset(validation_dataset)
    ks = _split_list(k_list, "k", int)
    table = evalkit.sweep_k(train, validation, ks, a=a, norm=norm)
    if plot_out is not None:
        explain.emit_plot_data(table, plot_out)
    click.echo(evalkit.render_sweep(table), nl=False)


@cli.command("diff")
@click.argument("dataset")
@click.argument("baseline_predictions")
@click.argument("report_out")
@click.option("--library", default=None, help="Compute the fingerprint side from this library.")
@click.option("--ffp-preds", default=None, help="Read the fingerprint side from a predictions file.")
def cmd_diff(dataset, baseline_predictions, report_out, library, ffp_preds):
    """List instances where fingerprint and baseline predictions differ."""
    if (library is None) == (ffp_preds is None):
        raise ConfigError("pass exactly one of --library or --ffp-preds")
    ds = dataio.read_dataset(dataset)
    baseline = evalkit.read_predictions(baseline_predictions)
    if library is not None:
        lib = dataio.load_library(library)
        preds = evalkit.predict_dataset(ds, lib)
        scores = evalkit.score_dataset(ds, lib)
    else:
        preds = evalkit.read_predictions(ffp_preds)
        scores = None
    diff = evalkit.diff_baseline(preds, baseline, ds, scores=scores)
    rendered = evalkit.render_disagreements(diff)
    with open(report_out, "w", encoding="utf-8") as fh:
        fh.write(rendered)
    click.echo(rendered.splitlines()[0])


@cli.group("explain")
def cmd_explain():
    """Inspect fingerprints, intersections, and shared features."""


@cmd_explain.command("fingerprint")
@click.argument("library")
@click.argument("label")
@click.option(
    "--style",
    type=click.Choice(["ranked", "dense"]),
    default="ranked",
    show_default=True,
)
@click.option("--plot-out", default=None, help="Write (index, membership) plot data.")
def cmd_explain_fingerprint(library, label, style, plot_out):
    """Print one class fingerprint."""
    lib = dataio.load_library(library)
    if label not in lib.fingerprints:
        raise ConfigError(f"no fingerprint for label {label!r} in {library}")
    fp = lib.fingerprints[label]
    if plot_out is not None:
        explain.emit_plot_data(fp, plot_out)
    text = explain.render_fingerprint(fp, style=style)
    click.echo(text, nl=not text.endswith("\n"))


@cmd_explain.command("intersect")
@click.argument("library")
@click.argument("dataset")
@click.argument("instance_id")
@click.option("--vs", "vs_label", default=None, help="Class to intersect with (default: predicted).")
@click.option("--plot-out", default=None, help="Write (feature, min membership) plot data.")
def cmd_explain_intersect(library, dataset, instance_id, vs_label, plot_out):
    """Show why an instance scores what it does against a class."""
    lib = dataio.load_library(library)
    ds = dataio.read_dataset(dataset)
    try:
        row = ds.ids.index(instance_id)
    except ValueError:
        raise ConfigError(f"instance id {instance_id!r} not in {dataset}") from None
    vec = ds.vectors[row]
    if vs_label is None:
        vs_label = core.classify(vec, lib, label=instance_id).predicted
    elif vs_label not in lib.fingerprints:
        raise ConfigError(f"no fingerprint for label {vs_label!r} in {library}")
    instance_fp = core.fingerprint_instance(vec, k=lib.k, a=lib.a, label=instance_id)
    report = explain.intersect(instance_fp, lib.fingerprints[vs_label], lib.norm)
    if plot_out is not None:
        explain.emit_plot_data(report, plot_out)
    click.echo(explain.render_intersection(report), nl=False)


@cmd_explain.command("shared")
@click.argument("library")
@click.option("--min-classes", type=int, default=2, show_default=True)
def cmd_explain_shared(library, min_classes):
    """List features recurring across class fingerprints."""
    lib = dataio.load_library(library)
    report = explain.shared_features(lib, min_classes=min_classes)
    click.echo(explain.render_shared(report), nl=False)


@cli.command("generate")
@click.argument("dataset_out")
@click.option("--dim", type=int, required=True, help="Feature dimension.")
@click.option("--classes", required=True, help="Comma-separated class labels.")
@click.option("--counts", default=None, help="Comma-separated per-class instance counts.")
@click.option("--proportions", default=None, help="Comma-separated class weights.")
@click.option("--total", type=int, default=None, help="Total instances under --proportions.")
@click.option("--noise", type=float, default=0.0, show_default=True, help="Uniform noise scale.")
@click.option("--seed", type=int, default=0, show_default=True, help="Generator seed.")
def cmd_generate(dataset_out, dim, classes, counts, proportions, total, noise, seed):
    """Write a synthetic block-mean dataset with optional class skew."""
    labels = _split_list(classes, "class", str)
    if (counts is None) == (proportions is None):
        raise ConfigError("pass exactly one of --counts or --proportions")
    if counts is not None:
        count_list = tuple(_split_list(counts, "count", int))
    else:
        if total is None:
            raise ConfigError("--proportions requires --total")
        count_list = dataio.counts_from_proportions(
            _split_list(proportions, "proportion", float), total
        )
    if len(count_list) != len(labels):
        raise ConfigError("counts and classes must have matching lengths")
    spec = dataio.SyntheticSpec(
        labels=tuple(labels),
        counts=count_list,
        means=dataio.block_means(len(labels), dim),
        noise_scale=noise,
        seed=seed,
    )
    ds = dataio.generate_synthetic(spec)
    dataio.write_dataset(ds, dataset_out)
    click.echo(f"wrote {len(ds)} instances (dim={dim}, {len(labels)} classes) -> {dataset_out}")


def main(argv=None) -> int:
    """Run the CLI and map exceptions to documented exit codes."""
    try:
        cli.main(args=argv, prog_name="ffp", standalone_mode=False)
    except ParseError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_PARSE
    except DimensionMismatchError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_DIMENSION
    except ConfigError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_CONFIG
    except click.UsageError as exc:
        exc.show()
        return EXIT_CONFIG
    except click.ClickException as exc:
        exc.show()
        return EXIT_CONFIG
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.exceptions.Abort:
        return 130
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_IO
    return 0


def entrypoint():
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()

"""Introspection helpers: render fingerprints, intersect them, find
features shared across classes, and emit plain x/y plot data."""

from __future__ import annotations

from dataclasses import dataclass

from .core import ClassFingerprint, FingerprintLibrary, similarity
from .errors import ConfigError
from .evalkit import SweepTable


def _display_mu(mu: float) -> str:
    """Two-decimal display with trailing zeros dropped: 1, 0.89, 0.5."""
    return format(round(mu, 2), "g")


def _ranked_entries(fp: ClassFingerprint) -> list[tuple[int, float]]:
    return sorted(fp.entries.items(), key=lambda kv: (-kv[1], kv[0]))


def render_fingerprint(fp: ClassFingerprint, style: str = "ranked") -> str:
    """Render a fingerprint as text.

    ``ranked`` gives the compact set notation ``{(8,1),(679,0.89),...}``
    with memberships shown to two decimals. ``dense`` gives one
    ``index membership`` line per feature dimension, zeros included, at
    full precision.
    """
    if style == "ranked":
        body = ",".join(f"({idx},{_display_mu(mu)})" for idx, mu in _ranked_entries(fp))
        return "{" + body + "}"
    if style == "dense":
        lines = [f"{idx} {float(fp.entries.get(idx, 0.0))!r}" for idx in range(fp.dim)]
        return "\n".join(lines) + "\n"
    raise ConfigError(f"unknown render style {style!r}, expected 'ranked' or 'dense'")


@dataclass(frozen=True)
class SharedEntry:
    """One feature present in both fingerprints of an intersection."""

    feature: int
    instance_mu: float
    class_mu: float
    min_mu: float


@dataclass(frozen=True)
class IntersectionReport:
    """Feature-level overlap of an instance fingerprint with a class one."""

    instance: str
    label: str
    shared: tuple[SharedEntry, ...]
    contribution: float
    norm: float


def intersect(
    instance_fp: ClassFingerprint, class_fp: ClassFingerprint, norm: float
) -> IntersectionReport:
    """Break a similarity score down feature by feature.

    The contribution is computed by the same routine the classifier uses,
    so the breakdown always sums to the score actually assigned.
    """
    contribution = similarity(instance_fp, class_fp, norm)
    shared = [
        SharedEntry(
            feature=idx,
            instance_mu=instance_fp.entries[idx],
            class_mu=class_fp.entries[idx],
            min_mu=min(instance_fp.entries[idx], class_fp.entries[idx]),
        )
        for idx in instance_fp.entries.keys() & class_fp.entries.keys()
    ]
    shared.sort(key=lambda e: (-e.min_mu, e.feature))
    return IntersectionReport(
        instance=instance_fp.label,
        label=class_fp.label,
        shared=tuple(shared),
        contribution=contribution,
        norm=float(norm),
    )


def render_intersection(report: IntersectionReport) -> str:
    lines = [
        f"intersection of {report.instance} with class {report.label}",
        f"{'feature':>8} {'instance':>9} {'class':>9} {'min':>9}",
    ]
    for e in report.shared:
        lines.append(
            f"{e.feature:>8} {_display_mu(e.instance_mu):>9} "
            f"{_display_mu(e.class_mu):>9} {_display_mu(e.min_mu):>9}"
        )
    lines.append(f"shared features: {len(report.shared)}")
    lines.append(f"similarity: {report.contribution:.4f} (norm {_display_mu(report.norm)})")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class SharedFeatureReport:
    """Features appearing in at least ``min_classes`` fingerprints."""

    min_classes: int
    features: tuple[tuple[int, tuple[str, ...]], ...]


def shared_features(lib: FingerprintLibrary, min_classes: int = 2) -> SharedFeatureReport:
    """Find features recurring across class fingerprints.

    Results order by how many classes carry the feature, most first,
    then by feature index; the class tuples follow library order.
    """
    if min_classes < 2:
        raise ConfigError(f"min_classes must be at least 2, got {min_classes}")
    carriers: dict[int, list[str]] = {}
    for fp in lib:
        for idx in fp.support:
            carriers.setdefault(idx, []).append(fp.label)
    hits = [
        (idx, tuple(labels)) for idx, labels in carriers.items() if len(labels) >= min_classes
    ]
    hits.sort(key=lambda pair: (-len(pair[1]), pair[0]))
    return SharedFeatureReport(min_classes=min_classes, features=tuple(hits))


def render_shared(report: SharedFeatureReport) -> str:
    lines = [
        f"features shared by at least {report.min_classes} classes: {len(report.features)}"
    ]
    for idx, labels in report.features:
        lines.append(f"  {idx} ({len(labels)}): {','.join(labels)}")
    return "\n".join(lines) + "\n"


def _plot_pairs(obj) -> list[tuple[float, float]]:
    if isinstance(obj, ClassFingerprint):
        return [(idx, obj.entries.get(idx, 0.0)) for idx in range(obj.dim)]
    if isinstance(obj, IntersectionReport):
        return sorted((e.feature, e.min_mu) for e in obj.shared)
    if isinstance(obj, SweepTable):
        return list(obj.rows())
    raise ConfigError(f"no plot data emitter for {type(obj).__name__}")


def _format_number(x) -> str:
    xf = float(x)
    if xf.is_integer() and abs(xf) < 1e15:
        return str(int(xf))
    return repr(xf)


def emit_plot_data(obj, path) -> None:
    """Write an object as ``x y`` lines for external plotting.

    Fingerprints emit all d (index, membership) points, intersections
    emit (feature, shared membership), sweep tables emit (k, macro-F1).
    """
    lines = [f"{_format_number(x)} {_format_number(y)}" for x, y in _plot_pairs(obj)]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")

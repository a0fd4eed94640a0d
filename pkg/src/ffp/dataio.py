"""File formats, the bag-of-words vectorizer, and synthetic data generation.

Dataset files are plain UTF-8 text: a ``#dim=`` line, a ``#classes=``
line, then one ``id,label,v0,...,v(d-1)`` row per instance. Fingerprint
libraries are versioned JSON. Conversation files are JSON lines, one
dialogue per line. All floats serialize with shortest round-trip
precision, so write-then-read is lossless and reruns are byte-identical.
"""

from __future__ import annotations

import json
import re
import warnings
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from .core import ClassFingerprint, FingerprintLibrary, as_vector
from .errors import ConfigError, ParseError

LIBRARY_FORMAT_VERSION = 1

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


@dataclass(eq=False)
class LabeledDataset:
    """Labeled instance vectors with a declared class order."""

    ids: list[str]
    labels: list[str]
    vectors: np.ndarray
    classes: list[str]

    def __post_init__(self):
        self.vectors = np.asarray(self.vectors, dtype=np.float64)
        if self.vectors.ndim != 2:
            raise ConfigError(f"vectors must be 2-D, got shape {self.vectors.shape}")
        n = self.vectors.shape[0]
        if len(self.ids) != n or len(self.labels) != n:
            raise ConfigError("ids, labels, and vectors must have matching lengths")
        if len(set(self.ids)) != n:
            raise ConfigError("instance ids must be unique")
        if len(set(self.classes)) != len(self.classes):
            raise ConfigError("class labels must be distinct")
        unknown = set(self.labels) - set(self.classes)
        if unknown:
            raise ConfigError(f"labels not in declared classes: {sorted(unknown)}")
        if n and not np.all(np.isfinite(self.vectors)):
            raise ConfigError("vectors contain NaN or infinite values")

    @property
    def dim(self) -> int:
        return int(self.vectors.shape[1])

    def __len__(self) -> int:
        return int(self.vectors.shape[0])

    def instances(self):
        """Yield (id, label, vector) triples in dataset order."""
        for i in range(len(self)):
            yield self.ids[i], self.labels[i], self.vectors[i]

    def by_class(self) -> dict[str, np.ndarray]:
        """Rows grouped per declared class, preserving dataset order."""
        labels = np.asarray(self.labels, dtype=object)
        return {cls: self.vectors[labels == cls] for cls in self.classes}


def _check_field(value: str, what: str) -> str:
    if "," in value or "\n" in value or "\r" in value:
        raise ConfigError(f"{what} {value!r} may not contain commas or newlines")
    if value.startswith("#"):
        raise ConfigError(f"{what} {value!r} may not start with '#'")
    if not value:
        raise ConfigError(f"{what} may not be empty")
    return value


def read_dataset(path) -> LabeledDataset:
    """Parse a dataset file, reporting the offending line on any defect."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].startswith("#dim="):
        raise ParseError(path, 1, "expected '#dim=<d>' header")
    try:
        dim = int(lines[0][len("#dim="):])
    except ValueError:
        raise ParseError(path, 1, f"invalid dimension {lines[0][len('#dim='):]!r}") from None
    if dim < 1:
        raise ParseError(path, 1, f"dimension must be positive, got {dim}")
    if len(lines) < 2 or not lines[1].startswith("#classes="):
        raise ParseError(path, 2, "expected '#classes=<comma-separated labels>' header")
    classes_blob = lines[1][len("#classes="):]
    classes = [c for c in classes_blob.split(",") if c] if classes_blob else []
    if len(set(classes)) != len(classes):
        raise ParseError(path, 2, "duplicate class labels in header")

    ids: list[str] = []
    labels: list[str] = []
    rows: list[list[float]] = []
    seen: set[str] = set()
    for lineno, line in enumerate(lines[2:], start=3):
        if not line or line.startswith("#"):
            continue
        fields = line.split(",")
        if len(fields) != dim + 2:
            raise ParseError(
                path, lineno, f"expected {dim + 2} comma-separated fields, got {len(fields)}"
            )
        inst_id, label = fields[0], fields[1]
        if inst_id in seen:
            raise ParseError(path, lineno, f"duplicate instance id {inst_id!r}")
        if label not in classes:
            raise ParseError(path, lineno, f"label {label!r} not in declared classes")
        values = []
        for cell in fields[2:]:
            try:
                x = float(cell)
            except ValueError:
                raise ParseError(path, lineno, f"non-numeric cell {cell!r}") from None
            if not np.isfinite(x):
                raise ParseError(path, lineno, f"non-finite cell {cell!r}")
            values.append(x)
        seen.add(inst_id)
        ids.append(inst_id)
        labels.append(label)
        rows.append(values)

    vectors = np.array(rows, dtype=np.float64) if rows else np.empty((0, dim))
    return LabeledDataset(ids=ids, labels=labels, vectors=vectors, classes=classes)


def write_dataset(ds: LabeledDataset, path) -> None:
    """Write the canonical text form; read_dataset round-trips it exactly."""
    for cls in ds.classes:
        _check_field(cls, "class label")
    out = [f"#dim={ds.dim}", "#classes=" + ",".join(ds.classes)]
    for inst_id, label, vec in ds.instances():
        _check_field(inst_id, "instance id")
        cells = ",".join(repr(float(x)) for x in vec)
        out.append(f"{inst_id},{label},{cells}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(out) + "\n")


@dataclass(frozen=True)
class Vocabulary:
    """Ordered distinct tokens with their index mapping."""

    tokens: tuple[str, ...]
    index: dict[str, int] = field(compare=False)

    def __post_init__(self):
        if len(set(self.tokens)) != len(self.tokens):
            raise ConfigError("vocabulary tokens must be distinct")
        if self.index != {tok: i for i, tok in enumerate(self.tokens)}:
            raise ConfigError("vocabulary index must map tokens to their positions")

    @classmethod
    def from_tokens(cls, tokens: Iterable[str]) -> "Vocabulary":
        toks = tuple(tokens)
        return cls(tokens=toks, index={tok: i for i, tok in enumerate(toks)})

    def __len__(self) -> int:
        return len(self.tokens)


def tokenize(text: str) -> list[str]:
    """Lowercase and split on non-alphanumeric runs."""
    return _TOKEN_RE.findall(text.lower())


def vectorize_text(
    documents: Sequence[tuple[str, str, str]],
    vocab: Vocabulary | None = None,
) -> tuple[LabeledDataset, Vocabulary]:
    """Turn (id, label, text) documents into raw token-count vectors.

    Without a supplied vocabulary, tokens enter in first-occurrence order
    across the corpus. Under a supplied vocabulary, unknown tokens are
    dropped; a document whose tokens are all unknown yields a zero vector
    and a warning.
    """
    if not documents:
        raise ConfigError("empty corpus")
    tokenized = [(doc_id, label, tokenize(text)) for doc_id, label, text in documents]
    if vocab is None:
        ordered: dict[str, None] = {}
        for _, _, toks in tokenized:
            for tok in toks:
                ordered.setdefault(tok)
        if not ordered:
            raise ConfigError("corpus contains no tokens")
        vocab = Vocabulary.from_tokens(ordered)

    matrix = np.zeros((len(tokenized), len(vocab)), dtype=np.float64)
    ids, labels = [], []
    classes: dict[str, None] = {}
    for row, (doc_id, label, toks) in enumerate(tokenized):
        ids.append(doc_id)
        labels.append(label)
        classes.setdefault(label)
        hits = 0
        for tok in toks:
            col = vocab.index.get(tok)
            if col is not None:
                matrix[row, col] += 1.0
                hits += 1
        if toks and hits == 0:
            warnings.warn(
                f"document {doc_id!r} has no in-vocabulary tokens; vector is all zeros",
                stacklevel=2,
            )
    ds = LabeledDataset(ids=ids, labels=labels, vectors=matrix, classes=list(classes))
    return ds, vocab


@dataclass(eq=False)
class SyntheticSpec:
    """Recipe for a seeded synthetic dataset with optional class skew."""

    labels: tuple[str, ...]
    counts: tuple[int, ...]
    means: np.ndarray
    noise_scale: float
    seed: int

    def __post_init__(self):
        self.labels = tuple(self.labels)
        self.counts = tuple(int(c) for c in self.counts)
        self.means = np.asarray(self.means, dtype=np.float64)
        if len(set(self.labels)) != len(self.labels):
            raise ConfigError("class labels must be distinct")
        if len(self.labels) != len(self.counts):
            raise ConfigError("labels and counts must have matching lengths")
        if any(c < 1 for c in self.counts):
            raise ConfigError("every class count must be at least 1")
        if self.means.ndim != 2 or self.means.shape[0] != len(self.labels):
            raise ConfigError(
                f"means must have shape (num_classes, dim), got {self.means.shape}"
            )
        if not np.all(np.isfinite(self.means)):
            raise ConfigError("class means must be finite")
        if self.noise_scale < 0:
            raise ConfigError(f"noise scale must be non-negative, got {self.noise_scale}")

    @property
    def num_classes(self) -> int:
        return len(self.labels)

    @property
    def dim(self) -> int:
        return int(self.means.shape[1])


def counts_from_proportions(proportions: Sequence[float], total: int) -> tuple[int, ...]:
    """Largest-remainder apportionment of ``total`` instances.

    Each count stays within one of its exact share, so heavy skews like an
    83%-majority class realize faithfully.
    """
    props = [float(p) for p in proportions]
    if not props or any(p <= 0 for p in props):
        raise ConfigError("proportions must be positive")
    if total < 1:
        raise ConfigError(f"total must be at least 1, got {total}")
    weight = sum(props)
    exact = [p / weight * total for p in props]
    counts = [int(np.floor(x)) for x in exact]
    remainders = sorted(
        range(len(props)), key=lambda i: (-(exact[i] - counts[i]), i)
    )
    for i in remainders[: total - sum(counts)]:
        counts[i] += 1
    return tuple(counts)


def block_means(num_classes: int, dim: int, value: float = 1.0) -> np.ndarray:
    """Class means with disjoint contiguous feature blocks set to ``value``."""
    if num_classes < 1 or dim < num_classes:
        raise ConfigError("need dim >= num_classes >= 1 for block means")
    means = np.zeros((num_classes, dim))
    bounds = np.linspace(0, dim, num_classes + 1).astype(int)
    for c in range(num_classes):
        means[c, bounds[c]:bounds[c + 1]] = value
    return means


def generate_synthetic(spec: SyntheticSpec) -> LabeledDataset:
    """Draw class mean + uniform noise per cell from the seeded generator."""
    rng = np.random.default_rng(spec.seed)
    ids, labels, blocks = [], [], []
    for c, label in enumerate(spec.labels):
        n = spec.counts[c]
        noise = rng.uniform(-spec.noise_scale, spec.noise_scale, size=(n, spec.dim))
        blocks.append(spec.means[c] + noise)
        ids.extend(f"{label}-{i}" for i in range(n))
        labels.extend([label] * n)
    return LabeledDataset(
        ids=ids,
        labels=labels,
        vectors=np.concatenate(blocks, axis=0),
        classes=list(spec.labels),
    )


def _canonical_entries(fp: ClassFingerprint) -> list[list]:
    # Descending membership, then ascending index: canonical and diff-stable.
    items = sorted(fp.entries.items(), key=lambda kv: (-kv[1], kv[0]))
    return [[idx, mu] for idx, mu in items]


def save_library(lib: FingerprintLibrary, path) -> None:
    """Serialize a library to versioned JSON with full float precision."""
    doc = {
        "version": LIBRARY_FORMAT_VERSION,
        "dim": lib.dim,
        "k": lib.k,
        "a": lib.a,
        "norm": lib.norm,
        "class_order": list(lib.class_order),
        "fingerprints": [
            {"label": label, "entries": _canonical_entries(lib.fingerprints[label])}
            for label in lib.class_order
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_library(path) -> FingerprintLibrary:
    """Parse a library file, validating version, labels, and memberships."""
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(path, exc.lineno, f"invalid JSON: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ParseError(path, 1, "library file must hold a JSON object")
    version = doc.get("version")
    if version != LIBRARY_FORMAT_VERSION:
        raise ParseError(
            path, 1, f"unsupported library version {version!r}, expected {LIBRARY_FORMAT_VERSION}"
        )
    try:
        dim, k, a, norm = int(doc["dim"]), int(doc["k"]), float(doc["a"]), float(doc["norm"])
        class_order = [str(c) for c in doc["class_order"]]
        raw_fps = doc["fingerprints"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(path, 1, f"malformed library header: {exc}") from None
    if not raw_fps:
        raise ParseError(path, 1, "library contains no fingerprints")

    fingerprints: dict[str, ClassFingerprint] = {}
    for raw in raw_fps:
        try:
            label = str(raw["label"])
            pairs = [(int(i), float(mu)) for i, mu in raw["entries"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(path, 1, f"malformed fingerprint record: {exc}") from None
        if label in fingerprints:
            raise ParseError(path, 1, f"duplicate fingerprint label {label!r}")
        entries: dict[int, float] = {}
        for idx, mu in pairs:
            if idx in entries:
                raise ParseError(path, 1, f"duplicate feature {idx} in {label!r}")
            if not 0.0 < mu <= 1.0:
                raise ParseError(
                    path, 1, f"membership {mu} for feature {idx} in {label!r} outside (0, 1]"
                )
            entries[idx] = mu
        try:
            fingerprints[label] = ClassFingerprint(
                label=label, entries=entries, dim=dim, k=k, a=a
            )
        except ConfigError as exc:
            raise ParseError(path, 1, f"invalid fingerprint {label!r}: {exc}") from None
    try:
        return FingerprintLibrary(
            fingerprints=fingerprints,
            class_order=tuple(class_order),
            dim=dim,
            k=k,
            a=a,
            norm=norm,
        )
    except ConfigError as exc:
        raise ParseError(path, 1, f"inconsistent library: {exc}") from None


@dataclass(frozen=True)
class Turn:
    speaker: str
    text: str
    label: str


@dataclass(frozen=True)
class Dialogue:
    id: str
    turns: tuple[Turn, ...]


def read_conversations(path) -> list[Dialogue]:
    """Parse a JSON-lines conversation file: one dialogue per line."""
    dialogues: list[Dialogue] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip() or line.startswith("#"):
                continue
            try:
                rec = json.loads(line)
                turns = tuple(
                    Turn(speaker=str(t["speaker"]), text=str(t["text"]), label=str(t["label"]))
                    for t in rec["turns"]
                )
                dialogues.append(Dialogue(id=str(rec["dialogue"]), turns=turns))
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise ParseError(path, lineno, f"malformed dialogue record: {exc}") from None
    return dialogues


def write_conversations(dialogues: Iterable[Dialogue], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for d in dialogues:
            rec = {
                "dialogue": d.id,
                "turns": [
                    {"speaker": t.speaker, "text": t.text, "label": t.label} for t in d.turns
                ],
            }
            fh.write(json.dumps(rec) + "\n")

"""Conversation file to embedding dataset, one instance per utterance."""

import json
from dataclasses import dataclass

from embed_extract.errors import ExtractError
from embed_extract.windows import build_input, windows_for_dialogue


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
    """Parse the shared JSON-lines conversation format: one dialogue per line."""
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
                raise ExtractError(f"{path}:{lineno}: malformed dialogue record: {exc}") from None
    return dialogues


def _check_field(value: str, what: str) -> None:
    # The dataset line format cannot carry these characters in ids or labels.
    if "," in value or "\n" in value or value.startswith("#") or not value:
        raise ExtractError(f"{what} {value!r} cannot be written to a dataset file")


def _write_dataset(ids, labels, vectors, classes, dim, path) -> None:
    """Emit the shared dataset text format: header directives, then one
    comma-separated row per instance with repr-precision floats."""
    for cls in classes:
        _check_field(cls, "class label")
    out = [f"#dim={dim}", "#classes=" + ",".join(classes)]
    for inst_id, label, vec in zip(ids, labels, vectors):
        _check_field(inst_id, "instance id")
        cells = ",".join(repr(float(x)) for x in vec)
        out.append(f"{inst_id},{label},{cells}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(out) + "\n")


def _load_encoder(encoder_id: str):
    import torch
    from transformers import AutoModel, AutoTokenizer

    try:
        tokenizer = AutoTokenizer.from_pretrained(encoder_id)
        model = AutoModel.from_pretrained(encoder_id)
    except Exception as exc:
        raise ExtractError(f"cannot load encoder {encoder_id!r}: {exc}") from None
    if tokenizer.cls_token is None or tokenizer.sep_token is None:
        raise ExtractError(
            f"encoder {encoder_id!r} defines no classification/separator markers"
        )
    torch.set_num_threads(1)
    model.eval()
    return tokenizer, model


def extract(conversations_path, c: int, encoder_id: str, out_path) -> tuple[int, int]:
    """Embed every utterance with its context window and write a dataset.

    Returns (instance count, vector dimension). Vectors are the encoder's
    final hidden state at the leading marker position. Inference is forced
    single-threaded with gradients off so reruns are bit-identical.
    """
    import torch

    dialogues = read_conversations(conversations_path)
    if not any(d.turns for d in dialogues):
        raise ExtractError(f"{conversations_path}: no utterances to embed")

    tokenizer, model = _load_encoder(encoder_id)
    dim = int(model.config.hidden_size)
    # Right-side truncation drops the oldest context turns first, which is
    # the correct casualty order for most-recent-first windows.
    limit = getattr(model.config, "max_position_embeddings", None)

    ids: list[str] = []
    labels: list[str] = []
    vectors = []
    classes: list[str] = []
    for dialogue in dialogues:
        texts = [t.text for t in dialogue.turns]
        for i, window in enumerate(windows_for_dialogue(texts, c)):
            text = build_input(window, tokenizer.cls_token, tokenizer.sep_token)
            enc = tokenizer(
                text,
                return_tensors="pt",
                add_special_tokens=False,
                truncation=limit is not None,
                max_length=limit,
            )
            with torch.no_grad():
                hidden = model(**enc).last_hidden_state
            vec = hidden[0, 0, :].numpy()
            if vec.shape[0] != dim:
                raise ExtractError(
                    f"encoder returned dimension {vec.shape[0]}, expected {dim}"
                )
            ids.append(f"{dialogue.id}:{i}")
            labels.append(dialogue.turns[i].label)
            vectors.append(vec)
            if dialogue.turns[i].label not in classes:
                classes.append(dialogue.turns[i].label)

    _write_dataset(ids, labels, vectors, classes, dim, out_path)
    return len(ids), dim

"""Context windows over dialogue turns and encoder input assembly."""

from dataclasses import dataclass

from embed_extract.errors import ExtractError


@dataclass(frozen=True)
class ContextWindow:
    """A target utterance with up to ``c`` preceding turns, most recent first."""

    target: str
    context: tuple[str, ...]
    c: int

    def __post_init__(self):
        if not self.target.strip():
            raise ExtractError("target utterance must be non-empty")
        if self.c < 0:
            raise ExtractError(f"context size must be >= 0, got {self.c}")
        if len(self.context) > self.c:
            raise ExtractError(
                f"window holds {len(self.context)} context turns but c={self.c}"
            )


def windows_for_dialogue(texts: list[str], c: int) -> list[ContextWindow]:
    """One window per turn; context truncates at the dialogue start."""
    if c < 0:
        raise ExtractError(f"context size must be >= 0, got {c}")
    out = []
    for i, text in enumerate(texts):
        context = tuple(texts[max(0, i - c) : i][::-1])
        out.append(ContextWindow(target=text, context=context, c=c))
    return out


def build_input(window: ContextWindow, marker: str, separator: str) -> str:
    """Assemble the encoder input string.

    Layout: marker, target, separator, then each context turn (most recent
    first) followed by the separator. Marker strings come from the selected
    encoder's tokenizer, not from here.
    """
    parts = [marker, window.target, separator]
    for turn in window.context:
        parts.append(turn)
        parts.append(separator)
    return " ".join(parts)

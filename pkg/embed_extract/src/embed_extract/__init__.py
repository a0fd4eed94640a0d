from embed_extract.errors import ExtractError
from embed_extract.extract import Dialogue, Turn, extract, read_conversations
from embed_extract.windows import ContextWindow, build_input, windows_for_dialogue

__version__ = "0.1.0"

__all__ = [
    "ContextWindow",
    "Dialogue",
    "ExtractError",
    "Turn",
    "build_input",
    "extract",
    "read_conversations",
    "windows_for_dialogue",
    "__version__",
]

class ExtractError(Exception):
    """Any failure turning a conversation file into a dataset."""

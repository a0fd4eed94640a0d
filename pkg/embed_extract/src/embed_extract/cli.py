import sys

import click

from embed_extract.errors import ExtractError
from embed_extract.extract import extract


@click.command()
@click.option("--conversations", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--context", required=True, type=click.IntRange(min=0),
              help="Number of preceding turns to include (no default).")
@click.option("--encoder", required=True, help="Encoder checkpoint id or local path.")
@click.option("--out", required=True, type=click.Path(dir_okay=False, writable=True))
def cli(conversations, context, encoder, out):
    """Embed each utterance of a conversation file into a dataset."""
    count, dim = extract(conversations, context, encoder, out)
    click.echo(f"wrote {count} instances of dimension {dim} to {out}")


def main(argv=None) -> int:
    try:
        cli.main(args=argv, prog_name="embed-extract", standalone_mode=False)
    except ExtractError as exc:
        print(f"embed-extract: error: {exc}", file=sys.stderr)
        return 1
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return 2
    except OSError as exc:
        print(f"embed-extract: error: {exc}", file=sys.stderr)
        return 1
    return 0


def entrypoint() -> None:
    sys.exit(main())

"""Module entry point: ``python -m rotor_gpe <subcommand> ...``."""

from .cli import entrypoint

if __name__ == "__main__":
    raise SystemExit(entrypoint())

"""
Command-line front end for the secure-channel simulator.

`main.py` assembles the Typer application; each subcommand lives in its own
module under `commands/`.
"""

"""
Command-line interface for the statemerge toolkit.

The parser lives in main.py; each subcommand is a module in cli.commands.
"""

"""
Console Output
Tagged status lines ([OK], [FAILED], [WARN], [INFO]) for scripts and library code.
"""

import os
import sys

from dotenv import load_dotenv

load_dotenv()


def verbose_enabled() -> bool:
    return os.getenv("CUBICLAB_VERBOSE", "false").lower() == "true"


def log(message: str, tag: str = "INFO"):
    """
    Status line for library code. Goes to stderr, and only when
    CUBICLAB_VERBOSE=true, so JSON on stdout stays clean.
    """
    if verbose_enabled():
        print(f"[{tag}] {message}", file=sys.stderr)


def status(message: str, ok: bool):
    """[OK] / [FAILED] line on stdout, as printed by the verify suites and test scripts."""
    print(f"[{'OK' if ok else 'FAILED'}] {message}")


def banner(title: str):
    print("=" * 60)
    print(title)
    print("=" * 60)

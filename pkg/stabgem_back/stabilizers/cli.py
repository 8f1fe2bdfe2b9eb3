"""Process entry point: `stabgem <group> <action> [flags]`, returning the exit code."""

from __future__ import annotations

import os
import sys


def main(argv: list[str] | None = None) -> int:
    """
    Run the stabgem management command and return its exit code.

    0 on success, 2 for usage and validation errors, 3 when a certificate
    cannot be completed.
    """
    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "stabgem_back.settings")
    import django

    django.setup()

    from stabilizers.management.commands.stabgem import Command

    args = list(sys.argv[1:] if argv is None else argv)
    try:
        # run_from_argv reports argparse errors with usage text and exit 2,
        # and CommandError with its returncode
        Command().run_from_argv(["stabgem", "stabgem", *args])
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

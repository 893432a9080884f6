#!/usr/bin/env python3
"""
Main entry point for the qexgan CLI.
"""

import logging
import os
import sys
import warnings

from prompt_toolkit import print_formatted_text
from prompt_toolkit.formatted_text import HTML

from qexgan.argparsers.main_parser import create_main_parser
from qexgan.errors import QexganError
from qexgan.tui import print_error


def debug_enabled() -> bool:
    return os.getenv("DEBUG", "false").lower() in ("1", "true")


if debug_enabled():
    logging.basicConfig(
        level=logging.DEBUG, format="%(asctime)s %(name)s %(levelname)s %(message)s"
    )
else:
    logging.disable(logging.WARNING)
    warnings.filterwarnings("ignore")


def main(argv: list[str] | None = None) -> None:
    """Main entry point for the qexgan CLI.

    Exits 0 on success, 2 on a validation failure, 1 on any other error and
    130 on Ctrl-C.
    """
    parser = create_main_parser()
    args = parser.parse_args(argv)

    try:
        # Import the pipeline only when a command runs so --help stays fast
        from qexgan.runner import run_command

        run_command(args)
    except KeyboardInterrupt:
        print_formatted_text(HTML("\n<yellow>Goodbye! 👋</yellow>"))
        sys.exit(130)
    except QexganError as e:
        print_error(str(e))
        if debug_enabled():
            import traceback

            traceback.print_exc()
        sys.exit(e.exit_code)
    except Exception as e:
        print_error(f"{type(e).__name__}: {e}")
        if debug_enabled():
            import traceback

            traceback.print_exc()
        sys.exit(1)


if __name__ == "__main__":
    main()

from qexgan.tui.report import (
    display_evaluation,
    display_stats,
    print_error,
    print_info,
    print_success,
    print_warning,
)


__all__ = [
    "display_evaluation",
    "display_stats",
    "print_error",
    "print_info",
    "print_success",
    "print_warning",
]

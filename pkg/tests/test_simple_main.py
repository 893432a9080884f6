from unittest.mock import patch

import pytest

from qexgan import simple_main
from qexgan.errors import (
    ComputationError,
    EmptyInputError,
    WorkdirLockedError,
)


class TestMain:
    def test_success_returns_normally(self) -> None:
        with patch("qexgan.runner.run_command") as mock_run:
            simple_main.main(["pretrain-gen"])
        (args,), _ = mock_run.call_args
        assert args.command == "pretrain-gen"

    @pytest.mark.parametrize(
        "error,code",
        [
            (EmptyInputError("no pairs"), 2),
            (ComputationError("diverged"), 1),
            (WorkdirLockedError("work/.lock"), 1),
            (RuntimeError("boom"), 1),
        ],
    )
    def test_errors_map_to_exit_codes(self, error: Exception, code: int) -> None:
        with (
            patch("qexgan.runner.run_command", side_effect=error),
            patch("qexgan.simple_main.print_error") as mock_error,
        ):
            with pytest.raises(SystemExit) as exc_info:
                simple_main.main(["pretrain-gen"])
        assert exc_info.value.code == code
        mock_error.assert_called_once()

    def test_unexpected_errors_name_their_type(self) -> None:
        with (
            patch("qexgan.runner.run_command", side_effect=RuntimeError("boom")),
            patch("qexgan.simple_main.print_error") as mock_error,
        ):
            with pytest.raises(SystemExit):
                simple_main.main(["pretrain-gen"])
        mock_error.assert_called_once_with("RuntimeError: boom")

    def test_keyboard_interrupt(self) -> None:
        with (
            patch("qexgan.runner.run_command", side_effect=KeyboardInterrupt),
            patch("qexgan.simple_main.print_formatted_text") as mock_print,
        ):
            with pytest.raises(SystemExit) as exc_info:
                simple_main.main(["pretrain-gen"])
        assert exc_info.value.code == 130
        mock_print.assert_called_once()

    def test_argument_errors_exit_two(self) -> None:
        with pytest.raises(SystemExit) as exc_info:
            simple_main.main(["no-such-command"])
        assert exc_info.value.code == 2

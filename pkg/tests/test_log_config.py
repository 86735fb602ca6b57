"""Tests for logging configuration."""

from __future__ import annotations

import logging
import sys
from pathlib import Path

import pytest
from pytest_mock import MockerFixture

from pegcluster.log_config import LOGGER_NAME, setup_logging


def _reset_pegcluster_logger() -> None:
    logger = logging.getLogger(LOGGER_NAME)
    for handler in logger.handlers[:]:
        logger.removeHandler(handler)
        handler.close()
    logger.setLevel(logging.WARNING)


def test_setup_logging_console_only() -> None:
    _reset_pegcluster_logger()

    logger = setup_logging("DEBUG")
    assert logger.name == "pegcluster"
    assert logger.level == logging.DEBUG
    (handler,) = logger.handlers
    assert isinstance(handler, logging.StreamHandler)
    assert handler.stream is sys.stderr


def test_unknown_level_falls_back_to_warning() -> None:
    _reset_pegcluster_logger()
    assert setup_logging("chatty").level == logging.WARNING


def test_setup_logging_with_file(tmp_path: Path) -> None:
    _reset_pegcluster_logger()
    log_file = tmp_path / "logs" / "parse.log"
    logger = setup_logging("INFO", str(log_file))

    logger.debug("left-recursive growth")
    assert log_file.exists()
    assert "left-recursive growth" in log_file.read_text(encoding="utf-8")


def test_setup_logging_returns_existing_logger(tmp_path: Path) -> None:
    _reset_pegcluster_logger()
    first = setup_logging("INFO")
    second = setup_logging("DEBUG", str(tmp_path / "ignored.log"))
    assert first is second
    assert not (tmp_path / "ignored.log").exists()


def test_setup_logging_file_handler_failure(
    mocker: MockerFixture,
    tmp_path: Path,
    capsys: pytest.CaptureFixture[str],
) -> None:
    _reset_pegcluster_logger()
    mocker.patch("pegcluster.log_config.Path.mkdir", side_effect=OSError("denied"))

    logger = setup_logging("INFO", str(tmp_path / "logs" / "parse.log"))

    assert "Could not open log file" in capsys.readouterr().err

    assert all(
        not isinstance(handler, logging.FileHandler) for handler in logger.handlers
    )
    assert any(
        isinstance(handler, logging.StreamHandler) for handler in logger.handlers
    )

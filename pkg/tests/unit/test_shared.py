"""Unit tests for shared module."""

import logging
from unittest.mock import MagicMock, patch

import structlog

from errssl import shared
from errssl.config import Settings


class TestConfigureLogging:
    def test_adds_handler_when_unconfigured(self):
        with patch("logging.getLogger") as mock_get_logger, patch("structlog.configure"):
            mock_root = MagicMock()
            mock_root.handlers = []
            mock_get_logger.return_value = mock_root

            shared.configure_logging(Settings(log_level="warning"))

            mock_root.addHandler.assert_called_once()
            mock_root.setLevel.assert_called_once_with(logging.WARNING)

    def test_keeps_existing_handlers(self):
        with patch("logging.getLogger") as mock_get_logger, patch("structlog.configure"):
            mock_root = MagicMock()
            mock_root.handlers = [logging.NullHandler()]
            mock_get_logger.return_value = mock_root

            shared.configure_logging(Settings())

            mock_root.addHandler.assert_not_called()

    def test_json_renderer_selected(self):
        with patch("structlog.configure") as mock_configure:
            shared.configure_logging(Settings(log_format="json"))
        processors = mock_configure.call_args.kwargs["processors"]
        assert isinstance(processors[-1], structlog.processors.JSONRenderer)

    def test_repeated_calls_do_not_stack_handlers(self):
        root = logging.getLogger()
        level = root.level
        try:
            shared.configure_logging(Settings(log_level="ERROR"))
            count = len(root.handlers)
            shared.configure_logging(Settings(log_level="ERROR"))
            assert len(root.handlers) == count
        finally:
            root.setLevel(level)
            structlog.reset_defaults()

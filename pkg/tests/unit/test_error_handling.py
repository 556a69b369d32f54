"""
Unit tests for the exception hierarchy, exit codes and log level setup.
"""
import logging
from pathlib import Path

import pytest

from utils.error_handling import (
    EXIT_CONFIG_ERROR,
    EXIT_PIPELINE_ERROR,
    ConfigError,
    EnhancedErrorHandler,
    ErrorContext,
    ErrorSeverity,
    InspectionError,
    PipelineError,
    ProgressErrorHandler,
    SubjectNotInViewError,
    UserFriendlyError,
    VisionError,
    exit_code_for,
)
from utils.logger import LOG_LEVEL_ENV, resolve_log_level


class TestExceptions:
    """Test cases for error types."""

    @pytest.mark.unit
    def test_config_error_names_key(self):
        error = ConfigError("turbines[0].blade_length", "must be > 0")
        assert error.key == "turbines[0].blade_length"
        assert str(error) == "turbines[0].blade_length: must be > 0"
        assert isinstance(error, InspectionError)

    @pytest.mark.unit
    def test_pipeline_error_names_stage(self):
        cause = SubjectNotInViewError()
        error = PipelineError("render_silhouette", cause, turbine_id=1)
        assert error.stage == "render_silhouette"
        assert error.cause is cause
        assert str(error) == "render_silhouette (turbine 1): subject not in view"
        assert str(PipelineError("metrics", ValueError("boom"))) == "metrics: boom"

    @pytest.mark.unit
    def test_subject_not_in_view_is_vision_error(self):
        assert isinstance(SubjectNotInViewError(), VisionError)

    @pytest.mark.unit
    @pytest.mark.parametrize(
        "error,code",
        [
            (ConfigError("uav_count", "must be >= 1"), EXIT_CONFIG_ERROR),
            (FileNotFoundError("x"), EXIT_CONFIG_ERROR),
            (IsADirectoryError("x"), EXIT_CONFIG_ERROR),
            (PipelineError("binarize", VisionError("blade 0 not found in frame")), EXIT_PIPELINE_ERROR),
            (PermissionError("x"), EXIT_PIPELINE_ERROR),
        ],
    )
    def test_exit_codes(self, error, code):
        assert exit_code_for(error) == code


class TestUserFriendlyError:
    """Test cases for user-facing messages."""

    @pytest.mark.unit
    def test_message_with_context(self):
        context = ErrorContext(operation="load_scenario", file_path=Path("/tmp/site.yaml"), turbine_id=2)
        message = UserFriendlyError.get_user_friendly_message(ConfigError("seed", "must be >= 0"), context)
        assert message.startswith("Ошибка в файле сценария: seed: must be >= 0")
        assert "site.yaml" in message
        assert "турбина 2" in message

    @pytest.mark.unit
    def test_suggestions_follow_the_cause(self):
        error = PipelineError("render_silhouette", SubjectNotInViewError(), turbine_id=0)
        assert any("sensor.fov" in tip for tip in UserFriendlyError.get_suggestions(error))
        assert UserFriendlyError.describe(SubjectNotInViewError()) == "Турбина вне поля зрения сенсора"
        assert UserFriendlyError.describe(PermissionError()) == "Недостаточно прав для записи результатов"

    @pytest.mark.unit
    def test_unknown_error_type(self):
        message = UserFriendlyError.get_user_friendly_message(RuntimeError("odd"))
        assert message == "Произошла ошибка: odd"
        assert UserFriendlyError.get_suggestions(RuntimeError("odd"))


class TestEnhancedErrorHandler:
    """Test cases for the error handler."""

    @pytest.mark.unit
    def test_config_error_returns_exit_code(self, capsys):
        handler = EnhancedErrorHandler()
        code = handler.handle_config_error(ConfigError("uav_count", "must be >= 1"), Path("site.yaml"))
        assert code == EXIT_CONFIG_ERROR
        assert "docs/scenario_schema.md" in capsys.readouterr().out
        assert handler.error_stats == {"ConfigError": 1}

    @pytest.mark.unit
    def test_pipeline_error_keeps_stage(self):
        handler = EnhancedErrorHandler()
        error = PipelineError("render_silhouette", SubjectNotInViewError(), turbine_id=0)
        assert handler.handle_pipeline_error(error) == EXIT_PIPELINE_ERROR
        context = handler.recent_errors[-1].context
        assert (context.stage, context.turbine_id) == ("render_silhouette", 0)

    @pytest.mark.unit
    def test_recent_errors_are_capped(self):
        handler = EnhancedErrorHandler(max_recent_errors=3)
        for _ in range(5):
            handler.handle_error(VisionError("x"), severity=ErrorSeverity.LOW)
        assert len(handler.recent_errors) == 3
        assert handler.recent_errors[-1].severity is ErrorSeverity.LOW
        assert "VisionError: 5" in handler.get_error_summary()

    @pytest.mark.unit
    def test_empty_summary(self):
        assert EnhancedErrorHandler().get_error_summary().startswith("✅")


class TestProgressErrorHandler:
    """Test cases for per-step error accounting."""

    @pytest.mark.unit
    def test_final_report(self):
        handler = ProgressErrorHandler(4, "angle sweep")
        handler.report_success()
        handler.report_success()
        handler.report_success()
        handler.report_error(VisionError("blade 0 not found in frame"), "θ=30.00°")
        report = handler.get_final_report()
        assert handler.failed_items == 1
        assert "ANGLE SWEEP" in report
        assert "75.0%" in report
        assert "VisionError: 1" in report


class TestLogLevel:
    """Test cases for the log level environment variable."""

    @pytest.mark.unit
    def test_resolve_log_level(self, monkeypatch):
        monkeypatch.delenv(LOG_LEVEL_ENV, raising=False)
        assert resolve_log_level() == logging.INFO
        monkeypatch.setenv(LOG_LEVEL_ENV, "debug")
        assert resolve_log_level() == logging.DEBUG
        monkeypatch.setenv(LOG_LEVEL_ENV, "chatty")
        assert resolve_log_level(logging.WARNING) == logging.WARNING

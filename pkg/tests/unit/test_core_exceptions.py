"""Unit tests for core exceptions."""

import pytest

from entropy_lab.core.exceptions import (
    ConfigError,
    DegenerateProfileError,
    DomainError,
    EntropyLabError,
    NormalizationError,
    NumericalError,
)
from entropy_lab.models import Params


class TestExceptionHierarchy:
    """Test the exception hierarchy."""

    @pytest.mark.parametrize(
        "error_type",
        [DomainError, NormalizationError, DegenerateProfileError, NumericalError, ConfigError],
    )
    def test_all_derive_from_base(self, error_type):
        """Test every error is an EntropyLabError."""
        assert issubclass(error_type, EntropyLabError)

    def test_domain_errors_are_value_errors(self):
        """Test precondition failures can be caught as ValueError."""
        assert issubclass(NormalizationError, DomainError)
        assert issubclass(DegenerateProfileError, DomainError)
        with pytest.raises(ValueError):
            Params(3, 2.0, 2.5)

    def test_runtime_errors_are_not_domain_errors(self):
        """Test numerical and config failures stay outside DomainError."""
        assert not issubclass(NumericalError, DomainError)
        assert not issubclass(ConfigError, DomainError)


class TestExceptionUsage:
    """Test exception usage patterns."""

    def test_exception_chaining(self):
        """Test that exceptions can be chained."""
        with pytest.raises(ConfigError) as info:
            try:
                float("two")
            except ValueError as e:
                raise ConfigError("invalid value 'two' for p") from e

        assert isinstance(info.value.__cause__, ValueError)

    def test_message_names_precondition(self):
        """Test the message of a rejected exponent."""
        with pytest.raises(DomainError) as info:
            Params(3, 2.5)

        assert str(info.value) == "requires p < n and p ≤ 2, got n=3, p=2.5"

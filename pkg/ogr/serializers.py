from dataclasses import MISSING, fields

from rest_framework import serializers
from rest_framework.settings import api_settings

from .exceptions import ConfigurationError


def first_error(detail, path=()):
    """
    Walk a DRF error structure to its first message.

    Returns (path, message) where ``path`` is the tuple of keys and list
    indices leading to it; non-field errors attach to their parent.
    """
    if isinstance(detail, dict):
        for key, value in detail.items():
            child = path if key == api_settings.NON_FIELD_ERRORS_KEY else path + (str(key),)
            return first_error(value, child)
    if isinstance(detail, list):
        for index, item in enumerate(detail):
            if isinstance(item, (dict, list)):
                if item:
                    return first_error(item, path + (str(index),))
                continue
            return path, str(item)
    return path, str(detail)


def validate_or_raise(serializer_class, data, prefix=''):
    """Validated data of ``serializer_class``, or ConfigurationError at the first bad key."""
    serializer = serializer_class(data=data)
    if not serializer.is_valid():
        path, message = first_error(serializer.errors)
        key = '.'.join(part for part in (prefix, *path) if part)
        raise ConfigurationError(message, key=key or None)
    return dict(serializer.validated_data)


def as_validation_error(exc):
    """ConfigurationError → ValidationError nested along its dotted key."""
    detail = [exc.message]
    for part in reversed((exc.key or '').split('.')):
        if part:
            detail = {part: detail}
    return serializers.ValidationError(detail)


def dataclass_default(cls, name):
    """Default of field ``name`` on dataclass ``cls`` (None when it has none)."""
    for field in fields(cls):
        if field.name == name:
            return None if field.default is MISSING else field.default
    raise KeyError(name)


class StrictSerializer(serializers.Serializer):
    """Serializer that rejects keys it does not declare."""

    def to_internal_value(self, data):
        if isinstance(data, dict):
            unknown = sorted(set(data) - set(self.fields))
            if unknown:
                raise serializers.ValidationError(
                    {key: [f'unknown key; expected one of {sorted(self.fields)}'] for key in unknown}
                )
        return super().to_internal_value(data)


class OpenIntervalFloatField(serializers.FloatField):
    """
    FloatField with optional exclusive bounds, reported as an interval in
    error messages.
    """

    def __init__(self, *, above=None, below=None, **kwargs):
        self.above = above
        self.below = below
        super().__init__(**kwargs)

    def to_internal_value(self, data):
        value = super().to_internal_value(data)
        low_ok = self.above is None or value > self.above
        high_ok = self.below is None or value < self.below
        if not (low_ok and high_ok):
            low = '-inf' if self.above is None else f'{self.above:g}'
            high = 'inf' if self.below is None else f'{self.below:g}'
            raise serializers.ValidationError(f'must lie in ({low}, {high}), got {value:g}')
        return value


class FloatListField(serializers.ListField):
    child = serializers.FloatField()


class MatrixField(serializers.ListField):
    child = FloatListField()

    def to_internal_value(self, data):
        rows = super().to_internal_value(data)
        if rows and any(len(row) != len(rows[0]) for row in rows):
            raise serializers.ValidationError('rows must all have the same length')
        return rows

from rest_framework import serializers

from ...exceptions import ConfigurationError
from ...serializers import StrictSerializer, as_validation_error, validate_or_raise
from ..optimizer.serializers import OPTIMIZER_KINDS, OPTIMIZER_PARAMS_SERIALIZERS
from ..problems.services import PROBLEM_KINDS, validate_problem_params


class ProblemSpecSerializer(StrictSerializer):
    kind = serializers.ChoiceField(choices=PROBLEM_KINDS)
    params = serializers.DictField(default=dict)

    def validate(self, attrs):
        try:
            attrs['params'] = validate_problem_params(attrs['kind'], attrs['params'])
        except ConfigurationError as exc:
            raise as_validation_error(exc)
        return attrs


class OptimizerSpecSerializer(StrictSerializer):
    kind = serializers.ChoiceField(choices=OPTIMIZER_KINDS)
    name = serializers.RegexField(r'^[A-Za-z0-9_.-]+$', allow_null=True, default=None, max_length=64)
    params = serializers.DictField(default=dict)

    def validate(self, attrs):
        try:
            attrs['params'] = validate_or_raise(
                OPTIMIZER_PARAMS_SERIALIZERS[attrs['kind']], attrs['params'], prefix='params',
            )
        except ConfigurationError as exc:
            raise as_validation_error(exc)
        if attrs['name'] is None:
            attrs['name'] = attrs['kind']
        return attrs


class ExperimentConfigSerializer(StrictSerializer):
    name = serializers.CharField(default='experiment', max_length=64)
    problem = ProblemSpecSerializer()
    optimizers = OptimizerSpecSerializer(many=True, allow_empty=False)
    budget = serializers.IntegerField(min_value=1)
    seeds = serializers.ListField(
        child=serializers.IntegerField(min_value=0), allow_empty=False, default=lambda: [0],
    )
    stride = serializers.IntegerField(min_value=1, allow_null=True, default=None)
    threshold = serializers.FloatField(min_value=0.0, default=1e-6)
    common_random_numbers = serializers.BooleanField(default=True)
    out = serializers.CharField(allow_null=True, default=None)

    def validate_seeds(self, value):
        if len(set(value)) != len(value):
            raise serializers.ValidationError('seeds must be distinct')
        return value

    def validate(self, attrs):
        names = [spec['name'] for spec in attrs['optimizers']]
        for index, name in enumerate(names):
            if name in names[:index]:
                raise serializers.ValidationError(
                    {'optimizers': {index: {'name': [f'duplicate optimizer name {name!r}']}}}
                )
        return attrs

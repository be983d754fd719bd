from rest_framework import serializers

from ...serializers import OpenIntervalFloatField, StrictSerializer, dataclass_default
from .models import BASELINE_CHOICES, MODE_CHOICES, STEP_RULE_CHOICES, BaselineConfig, OptimizerConfig


def _ogr(name):
    return dataclass_default(OptimizerConfig, name)


def _baseline(name):
    return dataclass_default(BaselineConfig, name)


class OGRConfigSerializer(StrictSerializer):
    d = serializers.IntegerField(min_value=1, default=_ogr('d'))
    alpha = OpenIntervalFloatField(above=0.0, max_value=1.0, default=_ogr('alpha'))
    beta = OpenIntervalFloatField(above=0.0, below=1.0, default=_ogr('beta'))
    gamma = serializers.FloatField(min_value=0.0, default=_ogr('gamma'))
    epsilon = OpenIntervalFloatField(above=0.0, default=_ogr('epsilon'))
    eta = serializers.FloatField(min_value=0.0, default=_ogr('eta'))
    warmup_steps = serializers.IntegerField(min_value=2, allow_null=True, default=None)
    diag_period = serializers.IntegerField(min_value=1, default=_ogr('diag_period'))
    ortho_period = serializers.IntegerField(min_value=1, default=_ogr('ortho_period'))
    mode = serializers.ChoiceField(choices=MODE_CHOICES, default=_ogr('mode'))
    explore_kappa = serializers.FloatField(min_value=0.0, allow_null=True, default=None)
    max_step_norm = OpenIntervalFloatField(above=0.0, allow_null=True, default=None)
    step_cap_factor = OpenIntervalFloatField(above=0.0, allow_null=True, default=_ogr('step_cap_factor'))
    step_rule = serializers.ChoiceField(choices=STEP_RULE_CHOICES, default=_ogr('step_rule'))
    tanh_scale = OpenIntervalFloatField(above=0.0, default=_ogr('tanh_scale'))
    negative_gradient_fraction = serializers.FloatField(
        min_value=0.0, default=_ogr('negative_gradient_fraction'),
    )
    warmup_gamma_scale = serializers.FloatField(min_value=0.0, default=_ogr('warmup_gamma_scale'))
    warmup_probe = serializers.FloatField(min_value=0.0, default=_ogr('warmup_probe'))
    probe_std = serializers.FloatField(min_value=0.0, default=_ogr('probe_std'))
    ortho_tol_loose = OpenIntervalFloatField(above=0.0, default=_ogr('ortho_tol_loose'))
    ortho_tol_tight = OpenIntervalFloatField(above=0.0, default=_ogr('ortho_tol_tight'))

    def validate(self, attrs):
        if attrs['ortho_tol_tight'] >= attrs['ortho_tol_loose']:
            raise serializers.ValidationError(
                {'ortho_tol_tight': ['must be smaller than ortho_tol_loose']}
            )
        if attrs['warmup_steps'] is None:
            attrs['warmup_steps'] = 3 * attrs['d']
        return attrs


class SGDParamsSerializer(StrictSerializer):
    lr = OpenIntervalFloatField(above=0.0, default=_baseline('lr'))


class MomentumParamsSerializer(SGDParamsSerializer):
    momentum = serializers.FloatField(min_value=0.0, default=_baseline('momentum'))

    def validate_momentum(self, value):
        if value >= 1.0:
            raise serializers.ValidationError('must lie in [0, 1)')
        return value


class AdamParamsSerializer(SGDParamsSerializer):
    beta1 = OpenIntervalFloatField(above=0.0, below=1.0, default=_baseline('beta1'))
    beta2 = OpenIntervalFloatField(above=0.0, below=1.0, default=_baseline('beta2'))
    eps = OpenIntervalFloatField(above=0.0, default=_baseline('eps'))


OPTIMIZER_PARAMS_SERIALIZERS = {
    'ogr': OGRConfigSerializer,
    'sgd': SGDParamsSerializer,
    'momentum': MomentumParamsSerializer,
    'adam': AdamParamsSerializer,
}

OPTIMIZER_KINDS = ('ogr',) + BASELINE_CHOICES

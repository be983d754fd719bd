from rest_framework import serializers

from ...serializers import FloatListField, MatrixField, OpenIntervalFloatField, StrictSerializer


class NoisyParamsSerializer(StrictSerializer):
    noise = serializers.FloatField(min_value=0.0, default=0.0)


class QuadraticParamsSerializer(NoisyParamsSerializer):
    hessian = MatrixField(allow_null=True, default=None)
    center = FloatListField(allow_null=True, default=None)
    dim = serializers.IntegerField(min_value=1, allow_null=True, default=None)
    condition = serializers.FloatField(min_value=1.0, default=10.0)
    min_eigenvalue = OpenIntervalFloatField(above=0.0, default=1.0)
    seed = serializers.IntegerField(min_value=0, default=0)

    def validate(self, attrs):
        if attrs['hessian'] is not None:
            if attrs['dim'] is not None and attrs['dim'] != len(attrs['hessian']):
                raise serializers.ValidationError({'dim': ['does not match the hessian order']})
            attrs['dim'] = len(attrs['hessian'])
        elif attrs['dim'] is None:
            attrs['dim'] = 10
        if attrs['center'] is not None and len(attrs['center']) != attrs['dim']:
            raise serializers.ValidationError({'center': [f"must have length {attrs['dim']}"]})
        return attrs


class SaddleParamsSerializer(NoisyParamsSerializer):
    curvatures = FloatListField(min_length=1, default=lambda: [1.0, -1.0])
    center = FloatListField(allow_null=True, default=None)
    quartic = serializers.FloatField(min_value=0.0, default=0.25)

    def validate_curvatures(self, value):
        if any(curvature == 0.0 for curvature in value):
            raise serializers.ValidationError('curvatures must be nonzero')
        return value

    def validate(self, attrs):
        if attrs['center'] is not None and len(attrs['center']) != len(attrs['curvatures']):
            raise serializers.ValidationError({'center': ['must match the number of curvatures']})
        return attrs


class RosenbrockParamsSerializer(NoisyParamsSerializer):
    dim = serializers.IntegerField(min_value=2, default=2)
    a = serializers.FloatField(default=1.0)
    b = OpenIntervalFloatField(above=0.0, default=100.0)


class PlateauParamsSerializer(NoisyParamsSerializer):
    dim = serializers.IntegerField(min_value=1, default=10)
    height = OpenIntervalFloatField(above=0.0, default=1.0)
    width = OpenIntervalFloatField(above=0.0, default=1.0)
    center = serializers.FloatField(default=0.0)
    start_offset = OpenIntervalFloatField(above=1.0, default=6.0)


class MLPParamsSerializer(StrictSerializer):
    n_inputs = serializers.IntegerField(min_value=1, default=8)
    n_hidden = serializers.IntegerField(min_value=1, max_value=64, default=16)
    n_outputs = serializers.IntegerField(min_value=1, default=1)
    n_samples = serializers.IntegerField(min_value=1, default=256)
    batch_size = serializers.IntegerField(min_value=1, default=32)
    data_seed = serializers.IntegerField(min_value=0, default=0)
    init_scale = OpenIntervalFloatField(above=0.0, default=1.0)
    label_noise = serializers.FloatField(min_value=0.0, default=0.1)

    def validate(self, attrs):
        if attrs['n_samples'] % attrs['batch_size']:
            raise serializers.ValidationError({'batch_size': ['must divide n_samples']})
        return attrs


PROBLEM_PARAMS_SERIALIZERS = {
    'quadratic': QuadraticParamsSerializer,
    'saddle': SaddleParamsSerializer,
    'rosenbrock': RosenbrockParamsSerializer,
    'plateau': PlateauParamsSerializer,
    'mlp': MLPParamsSerializer,
}

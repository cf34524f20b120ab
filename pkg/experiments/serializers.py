from django.conf import settings
from rest_framework import serializers

from dynamics.serializers import InstanceSerializer
from probability.serializers import DomainSerializer, UnitsField
from sampler.rng import SEED_MAX

from .config import MODES, OUTPUTS, ExperimentConfig


def _default(key):
    return lambda: settings.CORRSTOCH[key]


class ExperimentConfigSerializer(DomainSerializer):
    """
    Validates a run description assembled from a JSON config file and command
    line flags. Missing values fall back to ``settings.CORRSTOCH``.
    """

    mode = serializers.ChoiceField(choices=MODES)
    dims = serializers.ListField(
        child=serializers.IntegerField(min_value=2), min_length=2, max_length=2, required=False
    )
    seed = serializers.IntegerField(min_value=0, max_value=SEED_MAX, default=_default('DEFAULT_SEED'))
    trials = serializers.IntegerField(min_value=1, default=_default('DEFAULT_TRIALS'))
    samples = serializers.IntegerField(min_value=1, default=_default('DEFAULT_SAMPLES'))
    tolerance = serializers.FloatField(default=_default('DEFAULT_TOLERANCE'))
    units = UnitsField(default=_default('DEFAULT_UNITS'))
    output = serializers.ChoiceField(choices=OUTPUTS, default='json')
    workers = serializers.IntegerField(min_value=1, default=_default('DEFAULT_WORKERS'))
    instance = InstanceSerializer(required=False)

    def validate_tolerance(self, value):
        if not value > 0:
            raise serializers.ValidationError('Ensure this value is greater than 0.')
        return value

    def validate(self, attrs):
        instance = attrs.get('instance', {}).get('built')
        if instance is not None:
            if min(instance.d_s, instance.d_e) < 2:
                raise serializers.ValidationError(
                    {'instance': [f'Dimensions must be at least 2 each, got {instance.d_s}x{instance.d_e}.']}
                )
            if 'dims' in attrs and tuple(attrs['dims']) != (instance.d_s, instance.d_e):
                raise serializers.ValidationError(
                    {'dims': [f'The inline instance is {instance.d_s}x{instance.d_e}.']}
                )
            dims = [instance.d_s, instance.d_e]
        else:
            dims = attrs.get('dims', [2, 2])
        if attrs['mode'] == 'random-instance' and attrs['output'] == 'csv':
            raise serializers.ValidationError({'output': ['random-instance writes JSON only.']})
        attrs['built'] = ExperimentConfig(
            mode=attrs['mode'],
            d_s=dims[0],
            d_e=dims[1],
            seed=attrs['seed'],
            trials=attrs['trials'],
            samples=attrs['samples'],
            tolerance=attrs['tolerance'],
            units=attrs['units'],
            output=attrs['output'],
            workers=attrs['workers'],
            instance=instance,
        )
        return attrs


def first_error(errors, prefix=''):
    """Flatten DRF errors to ``(field path, message)`` for the first failing field."""
    if isinstance(errors, dict):
        field, detail = next(iter(errors.items()))
        path = field if field != 'non_field_errors' or not prefix else ''
        return first_error(detail, f'{prefix}.{path}'.strip('.'))
    if isinstance(errors, list) and errors and not isinstance(errors[0], str):
        return first_error(errors[0], prefix)
    message = errors[0] if isinstance(errors, list) else errors
    return prefix or 'config', str(message)

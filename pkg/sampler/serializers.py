import tablib
from rest_framework import serializers

from probability.serializers import DomainSerializer

from .exceptions import SamplerError
from .reconstruction import EmpiricalProcess
from .rng import SEED_MAX
from .simulation import RunConfig


class RunConfigSerializer(DomainSerializer):
    samples = serializers.IntegerField(min_value=1)
    seed = serializers.IntegerField(min_value=0, max_value=SEED_MAX)
    dim_system = serializers.IntegerField(min_value=1, source='d_s')
    dim_env = serializers.IntegerField(min_value=1, source='d_e')

    def validate(self, attrs):
        try:
            attrs['built'] = RunConfig(attrs['samples'], attrs['seed'], attrs['d_s'], attrs['d_e'])
        except SamplerError as exc:
            raise serializers.ValidationError(str(exc))
        return attrs


class EmpiricalProcessSerializer(DomainSerializer):
    dim_system = serializers.IntegerField(read_only=True, source='dim')
    samples = serializers.IntegerField(min_value=1)
    seed = serializers.IntegerField(min_value=0, max_value=SEED_MAX)
    accepted = serializers.ListField(child=serializers.ListField(child=serializers.IntegerField(min_value=0)))
    counts = serializers.ListField(
        child=serializers.ListField(child=serializers.ListField(child=serializers.IntegerField(min_value=0)))
    )

    def to_representation(self, instance):
        return {
            'dim_system': instance.dim,
            'samples': instance.samples,
            'seed': instance.seed,
            'accepted': instance.accepted.tolist(),
            'counts': instance.counts.tolist(),
        }

    def validate(self, attrs):
        try:
            attrs['built'] = EmpiricalProcess(attrs['counts'], attrs['accepted'], attrs['samples'], attrs['seed'])
        except ValueError as exc:
            raise serializers.ValidationError({'counts': [str(exc)]})
        return attrs


def histogram_dataset(empirical):
    """One row per basis preparation: ``j, k, accepted`` and the output histogram."""
    d = empirical.dim
    data = tablib.Dataset(headers=['j', 'k', 'samples', 'accepted'] + [f'out_{a}' for a in range(d)])
    data.title = 'histograms'
    for j in range(d):
        for k in range(d):
            data.append([j, k, empirical.samples, int(empirical.accepted[j, k])]
                        + [int(c) for c in empirical.histogram(j, k)])
    return data

from rest_framework import serializers

from probability.exceptions import ProbabilityError
from probability.serializers import (
    DomainSerializer,
    JointDistSerializer,
    MatrixField,
    ProbVecField,
    StochMatrixSerializer,
)

from .channels import LAYOUT, JointChannel
from .instances import Instance
from .process import ProcessMap


class JointChannelSerializer(DomainSerializer):
    layout = serializers.ChoiceField(choices=[LAYOUT], default=LAYOUT)
    dim_system = serializers.IntegerField(min_value=1, source='d_s')
    dim_env = serializers.IntegerField(min_value=1, source='d_e')
    matrix = MatrixField(source='gamma.entries')

    def validate(self, attrs):
        entries = attrs['gamma']['entries']
        try:
            attrs['built'] = JointChannel(entries, attrs['d_s'], attrs['d_e'])
        except ProbabilityError as exc:
            raise serializers.ValidationError({'matrix': [str(exc)]})
        return attrs


class ProcessMapSerializer(DomainSerializer):
    """``basis_outputs`` travel as ``d_S**2`` vectors in ``(j, k)`` lexicographic order."""

    dim_system = serializers.IntegerField(read_only=True, source='dim')
    marginal = ProbVecField()
    basis_outputs = MatrixField()
    estimated = serializers.BooleanField(default=False)

    def to_representation(self, instance):
        data = super().to_representation(instance)
        dim = instance.dim
        data['basis_outputs'] = instance.basis_outputs.reshape(dim * dim, dim).tolist()
        return data

    def validate(self, attrs):
        marginal = attrs['marginal']
        rows = attrs['basis_outputs']
        dim = marginal.dim
        if rows.shape != (dim * dim, dim):
            raise serializers.ValidationError(
                {'basis_outputs': [f'Expected {dim * dim} vectors of length {dim}, got {rows.shape}.']}
            )
        try:
            attrs['built'] = ProcessMap(rows.reshape(dim, dim, dim), marginal, attrs['estimated'])
        except ProbabilityError as exc:
            raise serializers.ValidationError({'basis_outputs': [str(exc)]})
        return attrs


class InstanceSerializer(DomainSerializer):
    channel = JointChannelSerializer()
    joint = JointDistSerializer()
    preparation = StochMatrixSerializer()

    def validate(self, attrs):
        channel = attrs['channel']['built']
        joint = attrs['joint']['built']
        xi = attrs['preparation']['built']
        if (channel.d_s, channel.d_e) != (joint.d_s, joint.d_e):
            raise serializers.ValidationError(
                {'joint': [f'Joint state is {joint.d_s}x{joint.d_e} but the channel acts on '
                           f'{channel.d_s}x{channel.d_e}.']}
            )
        if xi.shape != (channel.d_s, channel.d_s):
            raise serializers.ValidationError(
                {'preparation': [f'Preparation must be {channel.d_s}x{channel.d_s}.']}
            )
        attrs['built'] = Instance(channel, joint, xi)
        return attrs

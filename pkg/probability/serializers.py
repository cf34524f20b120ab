import math

import numpy as np
from rest_framework import serializers

from .distributions import CONVENTION, JointDist, ProbVec, StochMatrix
from .exceptions import ProbabilityError
from .information import UNITS, convert


class ProbVecField(serializers.ListField):
    """A ProbVec on the wire: a plain array of numbers."""

    child = serializers.FloatField()

    def to_representation(self, value):
        return [float(x) for x in value.entries]

    def to_internal_value(self, data):
        values = super().to_internal_value(data)
        try:
            return ProbVec(values)
        except ProbabilityError as exc:
            raise serializers.ValidationError(str(exc))


class MatrixField(serializers.ListField):
    """Array of rows, returned as a 2-d float array."""

    child = serializers.ListField(child=serializers.FloatField(), allow_empty=False)

    def to_representation(self, value):
        return np.asarray(value, dtype=float).tolist()

    def to_internal_value(self, data):
        rows = super().to_internal_value(data)
        if len({len(row) for row in rows}) > 1:
            raise serializers.ValidationError('Rows must all have the same length.')
        return np.array(rows, dtype=float)


class EntropyField(serializers.FloatField):
    """
    A quantity measured in nats, presented in the units found in the
    serializer context. Infinities are written as "+inf" / "-inf".
    """

    def to_representation(self, value):
        value = convert(float(value), self.context.get('units', 'nats'))
        if math.isinf(value):
            return '+inf' if value > 0 else '-inf'
        return value

    def to_internal_value(self, data):
        if data in ('+inf', 'inf'):
            return math.inf
        if data == '-inf':
            return -math.inf
        return super().to_internal_value(data)


class UnitsField(serializers.ChoiceField):
    def __init__(self, **kwargs):
        super().__init__(choices=UNITS, **kwargs)


class DomainSerializer(serializers.Serializer):
    """
    Serializer whose validated data builds an immutable domain value.

    ``validate`` stores the constructed value under ``built`` and ``save()``
    hands it back, so callers write ``serializer.save()`` as for model forms.
    """

    def create(self, validated_data):
        return validated_data['built']

    def update(self, instance, validated_data):
        raise NotImplementedError('domain values are immutable')

    @classmethod
    def build(cls, data):
        serializer = cls(data=data)
        serializer.is_valid(raise_exception=True)
        return serializer.save()


class StochMatrixSerializer(DomainSerializer):
    convention = serializers.ChoiceField(choices=[CONVENTION], default=CONVENTION)
    d_out = serializers.IntegerField(min_value=1, required=False)
    d_in = serializers.IntegerField(min_value=1, required=False)
    matrix = MatrixField(source='entries')

    def validate(self, attrs):
        rows = attrs['entries']
        for axis, name in enumerate(('d_out', 'd_in')):
            if name in attrs and attrs[name] != rows.shape[axis]:
                raise serializers.ValidationError(
                    {name: [f'Declared {attrs[name]} but the matrix has {rows.shape[axis]}.']}
                )
        try:
            attrs['built'] = StochMatrix(rows)
        except ProbabilityError as exc:
            raise serializers.ValidationError({'matrix': [str(exc)]})
        return attrs


class JointDistSerializer(DomainSerializer):
    convention = serializers.ChoiceField(choices=[CONVENTION], default=CONVENTION)
    dim_system = serializers.IntegerField(min_value=1, required=False, source='d_s')
    dim_env = serializers.IntegerField(min_value=1, required=False, source='d_e')
    matrix = MatrixField(source='entries')

    def validate(self, attrs):
        rows = attrs['entries']
        for axis, (key, name) in enumerate((('d_s', 'dim_system'), ('d_e', 'dim_env'))):
            if key in attrs and attrs[key] != rows.shape[axis]:
                raise serializers.ValidationError(
                    {name: [f'Declared {attrs[key]} but the matrix has {rows.shape[axis]}.']}
                )
        try:
            attrs['built'] = JointDist(rows)
        except ProbabilityError as exc:
            raise serializers.ValidationError({'matrix': [str(exc)]})
        return attrs

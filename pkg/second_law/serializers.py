from rest_framework import serializers

from probability.serializers import EntropyField, StochMatrixSerializer


class SecondLawReportSerializer(serializers.Serializer):
    """Read-only; ``units`` in the context selects nats or bits for the entropic fields."""

    lhs = EntropyField()
    rhs = EntropyField()
    slack = EntropyField()
    satisfied = serializers.BooleanField()
    degenerate = serializers.BooleanField()
    epsilon = serializers.ListField(child=serializers.FloatField())
    residual = serializers.FloatField()
    unique = serializers.BooleanField()
    flags = serializers.ListField(child=serializers.ListField(child=serializers.IntegerField()))


class LiftedMapSerializer(serializers.Serializer):
    dim_system = serializers.IntegerField(source='dim')
    matrix = StochMatrixSerializer()
    flags = serializers.ListField(child=serializers.ListField(child=serializers.IntegerField()))

from rest_framework import serializers


class EstimateSerializer(serializers.Serializer):
    point = serializers.FloatField()
    ci_low = serializers.FloatField()
    ci_high = serializers.FloatField()
    n = serializers.IntegerField(source='n_samples')
    method = serializers.CharField()


class IntervalSchemeSerializer(serializers.Serializer):
    """Serializer for interval schemes: the name and the [a, b] windows"""

    name = serializers.CharField()
    windows = serializers.ListField(child=serializers.ListField(child=serializers.IntegerField()))

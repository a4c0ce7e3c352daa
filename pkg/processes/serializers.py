from rest_framework import serializers


class HypothesesSerializer(serializers.Serializer):
    is_supermartingale = serializers.BooleanField()
    is_rs = serializers.BooleanField()
    is_rm = serializers.BooleanField()
    is_deterministic = serializers.BooleanField()


class FamilyDescriptorSerializer(serializers.Serializer):
    """Serializer for a process family: kind, parameters and certificate summary"""

    kind = serializers.CharField()
    params = serializers.DictField()
    initial_mean = serializers.FloatField()
    K = serializers.FloatField()
    hypotheses = HypothesesSerializer()
    tracks = serializers.ListField(child=serializers.CharField())
    certificate = serializers.SerializerMethodField()

    def get_certificate(self, obj):
        return obj.certificate()

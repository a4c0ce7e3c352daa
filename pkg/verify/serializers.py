from rest_framework import serializers

from estimators.serializers import EstimateSerializer
from moduli.counterfunctions import ExtendedIndex
from .reports import VERDICT_CHOICES


class VerificationReportSerializer(serializers.Serializer):
    """Serializer for verification reports"""

    claim = serializers.CharField()
    bound = serializers.SerializerMethodField()
    estimate = EstimateSerializer(allow_null=True)
    verdict = serializers.ChoiceField(choices=VERDICT_CHOICES)
    repro = serializers.DictField()
    details = serializers.DictField()

    def get_bound(self, obj):
        if isinstance(obj.bound, ExtendedIndex):
            return obj.bound.to_dict()
        return obj.bound

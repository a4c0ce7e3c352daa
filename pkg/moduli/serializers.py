from rest_framework import serializers


class ProvenanceSerializer(serializers.Serializer):
    """Serializer for a construction tree (rule, params, children)"""

    rule = serializers.CharField()
    tag = serializers.CharField(read_only=True)
    label = serializers.CharField(allow_blank=True)
    params = serializers.DictField()
    notes = serializers.ListField(child=serializers.CharField())
    children = serializers.SerializerMethodField()

    def get_children(self, obj):
        return [
            {'role': role, 'tree': ProvenanceSerializer(node).data}
            for role, node in obj.children
        ]


class ExtendedIndexSerializer(serializers.Serializer):
    """Serializer for a possibly saturated index bound"""

    value = serializers.IntegerField()
    saturated = serializers.BooleanField()

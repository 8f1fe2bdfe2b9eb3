from __future__ import annotations

from typing import Any

from rest_framework import serializers

from stabilizers.codes import commutation_violations
from stabilizers.models import CertificateRun, CertificateRunKind
from stabilizers.pauli import PauliOperator

_PAULI_LETTERS = set("IXYZ")


class PauliStringField(serializers.CharField):
    """Unsigned Pauli string over the letters I, X, Y, Z."""

    def to_internal_value(self, data: Any) -> str:
        value = super().to_internal_value(data).strip()
        bad = sorted(set(value) - _PAULI_LETTERS)
        if bad:
            raise serializers.ValidationError(
                f"Pauli string contains invalid characters: {''.join(bad)}"
            )
        return value


class PauliOperatorField(serializers.Field):
    """Signed operator rendered as text such as "+XIZ" or "-iY"."""

    def to_representation(self, value: PauliOperator) -> str:
        return value.label

    def to_internal_value(self, data: Any) -> PauliOperator:
        try:
            return PauliOperator.from_label(str(data))
        except ValueError as exc:
            raise serializers.ValidationError(str(exc)) from exc


class RegionField(serializers.Field):
    """Region rendered as its sorted qubit ids."""

    def to_representation(self, value) -> list[int]:
        return [int(q) for q in value.qubits]

    def to_internal_value(self, data: Any) -> list[int]:
        if not isinstance(data, list) or not all(isinstance(q, int) for q in data):
            raise serializers.ValidationError("Region must be a list of qubit ids")
        return sorted(set(data))


# ==============================================================================
# CODE AND CIRCUIT FILES
# ==============================================================================


class QubitSerializer(serializers.Serializer):
    id = serializers.IntegerField(min_value=0, help_text="Qubit id, 0..n-1")
    x = serializers.FloatField(help_text="Horizontal coordinate")
    y = serializers.FloatField(help_text="Vertical coordinate")


class GeneratorSerializer(serializers.Serializer):
    pauli = PauliStringField(help_text="Pauli string of length n")
    sign = serializers.ChoiceField(choices=["+1", "-1"], default="+1")


class CodeFileSerializer(serializers.Serializer):
    """
    Validates the JSON code-file schema.

    Beyond field types it checks that every qubit id appears exactly once,
    that every Pauli string has length n and that generators commute. Errors
    name the offending generator indices.
    """

    version = serializers.IntegerField(min_value=1, max_value=1)
    n = serializers.IntegerField(min_value=1)
    qubits = QubitSerializer(many=True)
    periods = serializers.ListField(
        child=serializers.FloatField(min_value=0.0),
        min_length=2,
        max_length=2,
        allow_null=True,
        required=False,
        default=None,
    )
    generators = GeneratorSerializer(many=True, allow_empty=False)
    metadata = serializers.DictField(required=False, default=dict)

    def validate(self, attrs: dict[str, Any]) -> dict[str, Any]:
        n = attrs["n"]
        ids = [q["id"] for q in attrs["qubits"]]
        duplicates = sorted({i for i in ids if ids.count(i) > 1})
        if duplicates:
            raise serializers.ValidationError({"qubits": f"duplicate qubit ids: {duplicates}"})
        missing = sorted(set(range(n)) - set(ids))
        extra = sorted(set(ids) - set(range(n)))
        if missing or extra:
            raise serializers.ValidationError(
                {"qubits": f"qubit ids must be 0..{n - 1}; missing {missing}, unexpected {extra}"}
            )
        wrong_length = [
            i for i, g in enumerate(attrs["generators"]) if len(g["pauli"]) != n
        ]
        if wrong_length:
            raise serializers.ValidationError(
                {"generators": f"generators {wrong_length} do not have length {n}"}
            )
        operators = [
            PauliOperator.from_label(g["pauli"]).with_phase(0 if g["sign"] == "+1" else 2)
            for g in attrs["generators"]
        ]
        violations = commutation_violations(operators)
        if violations:
            pairs = ", ".join(f"{i} and {j}" for i, j in violations)
            raise serializers.ValidationError({"generators": f"anticommuting generators: {pairs}"})
        if attrs.get("periods") is not None and min(attrs["periods"]) <= 0:
            raise serializers.ValidationError({"periods": "periods must be positive"})
        return attrs


class GateSerializer(serializers.Serializer):
    gate = serializers.CharField(help_text="Gate name, e.g. H, S, CX")
    qubits = serializers.ListField(
        child=serializers.IntegerField(min_value=0), min_length=1, max_length=2
    )


class CircuitFileSerializer(serializers.Serializer):
    """Layers of gates; locality and disjointness are checked against a layout later."""

    n = serializers.IntegerField(min_value=1, required=False)
    layers = serializers.ListField(child=GateSerializer(many=True), allow_empty=True)


# ==============================================================================
# REPORTS
# ==============================================================================


class BraidingTripleSerializer(serializers.Serializer):
    gamma1 = PauliOperatorField()
    gamma2 = PauliOperatorField()
    gamma2p = PauliOperatorField()
    Q = RegionField()
    Qup = RegionField()
    Qup_prime = RegionField()
    provenance = serializers.DictField()


class ExchangeTripleSerializer(serializers.Serializer):
    m1 = PauliOperatorField()
    m2 = PauliOperatorField()
    m3 = PauliOperatorField()
    junction = serializers.IntegerField()
    endpoints = serializers.DictField(child=RegionField())


class MeshLogicalReportSerializer(serializers.Serializer):
    l1 = PauliOperatorField()
    l2 = PauliOperatorField()
    mesh1 = RegionField()
    mesh2 = RegionField()
    intersection_squares = serializers.ListField(child=RegionField())
    Q = RegionField()
    spec1 = serializers.SerializerMethodField()
    spec2 = serializers.SerializerMethodField()

    def get_spec1(self, obj) -> dict:
        return obj.spec1.as_dict()

    def get_spec2(self, obj) -> dict:
        return obj.spec2.as_dict()


class GemCertificateSerializer(serializers.Serializer):
    """Certificate body as written to report files."""

    kind = serializers.CharField()
    t = serializers.IntegerField()
    epsilon = serializers.FloatField(allow_null=True)
    epsilon_prime = serializers.FloatField()
    m = serializers.IntegerField()
    bound_bits = serializers.FloatField()
    alpha_effective = serializers.FloatField()
    patches = serializers.ListField(child=RegionField())
    witnesses = serializers.SerializerMethodField()
    provenance = serializers.DictField()

    def get_witnesses(self, obj) -> list[dict]:
        """Serialize each witness with the serializer matching its type."""
        rendered = []
        for witness in obj.per_patch_witness:
            if hasattr(witness, "gamma1"):
                rendered.append({"type": "braiding", **BraidingTripleSerializer(witness).data})
            else:
                rendered.append({"type": "exchange", **ExchangeTripleSerializer(witness).data})
        return rendered


# ==============================================================================
# LEDGER
# ==============================================================================


class CertificateRunSerializer(serializers.ModelSerializer):
    """Ledger rows as listed by `report list`."""

    bound_per_qubit = serializers.SerializerMethodField(
        help_text="Certified bits per physical qubit"
    )

    class Meta:
        model = CertificateRun
        fields = [
            "id",
            "kind",
            "family",
            "n",
            "t",
            "m",
            "bound_bits",
            "bound_per_qubit",
            "alpha_effective",
            "seed",
            "passed",
            "digest",
            "created_at",
        ]
        read_only_fields = ["id", "created_at"]
        extra_kwargs = {
            "kind": {"help_text": f"One of {', '.join(CertificateRunKind.values)}"},
            "digest": {"help_text": "SHA-256 of the JSON report"},
        }

    def get_bound_per_qubit(self, obj: CertificateRun) -> float:
        """Bound divided by the qubit count."""
        return obj.bound_per_qubit

"""
Filters for the certificate ledger.

Used by `stabgem report list`, which feeds its flags to the FilterSet the
same way query parameters would be.
"""

from __future__ import annotations

import django_filters
from django.db.models import QuerySet

from stabilizers.models import CertificateRun, CertificateRunKind


class CertificateRunFilter(django_filters.FilterSet):
    """
    Filter set for CertificateRun.

    Provides filtering by:
    - Kind (exact)
    - Family (exact, comma-separated list)
    - Depth t (exact, greater than/equal, less than/equal)
    - Minimum certified bound
    - Passed flag
    """

    kind = django_filters.ChoiceFilter(
        field_name="kind",
        choices=CertificateRunKind.choices,
        help_text="Filter by certificate kind (e.g., kind=PATCH)",
    )

    family = django_filters.CharFilter(
        field_name="family",
        lookup_expr="exact",
        help_text="Filter by code family (e.g., family=toric)",
    )
    family__in = django_filters.CharFilter(
        field_name="family",
        method="filter_family_in",
        help_text="Filter by several families (e.g., family__in=toric,honeycomb)",
    )

    t = django_filters.NumberFilter(field_name="t", lookup_expr="exact")
    t__gte = django_filters.NumberFilter(field_name="t", lookup_expr="gte")
    t__lte = django_filters.NumberFilter(field_name="t", lookup_expr="lte")

    min_bound = django_filters.NumberFilter(
        field_name="bound_bits",
        lookup_expr="gte",
        help_text="Only runs certifying at least this many bits",
    )

    passed = django_filters.BooleanFilter(field_name="passed")

    class Meta:
        model = CertificateRun
        fields = ["kind", "family", "t", "passed"]

    def filter_family_in(
        self, queryset: QuerySet[CertificateRun], name: str, value: str
    ) -> QuerySet[CertificateRun]:
        """
        Filter by multiple families using comma-separated values.

        Args:
            queryset: The base queryset to filter
            name: The field name (not used)
            value: Comma-separated family names (e.g., "toric,honeycomb")

        Returns:
            Filtered queryset
        """
        if not value:
            return queryset

        families = [family.strip() for family in value.split(",")]
        return queryset.filter(family__in=families)

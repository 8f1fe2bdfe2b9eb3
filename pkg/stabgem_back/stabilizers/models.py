from __future__ import annotations

from django.core.validators import MinValueValidator
from django.db import models
from django.db.models import Max


class CertificateRunQuerySet(models.QuerySet["CertificateRun"]):
    """Custom queryset with common filtering methods."""

    def for_kind(self, kind: str) -> CertificateRunQuerySet:
        """Filter runs of one certificate kind."""
        return self.filter(kind=kind)

    def for_family(self, family: str) -> CertificateRunQuerySet:
        """Filter runs on one code family."""
        return self.filter(family=family)

    def for_depth(self, t: int) -> CertificateRunQuerySet:
        """Filter runs for a specific circuit depth."""
        return self.filter(t=t)

    def passed(self) -> CertificateRunQuerySet:
        """Only runs whose certificate was completed."""
        return self.filter(passed=True)

    def with_min_bound(self, bits: float) -> CertificateRunQuerySet:
        """Runs that certified at least `bits`."""
        return self.filter(bound_bits__gte=bits)

    def best_bound(self) -> float:
        """Largest certified bound in the queryset."""
        result = self.aggregate(best=Max("bound_bits"))["best"]
        return result if result is not None else 0.0


class CertificateRunManager(models.Manager["CertificateRun"]):
    """Custom manager for CertificateRun model."""

    def get_queryset(self) -> CertificateRunQuerySet:
        """Return custom queryset."""
        return CertificateRunQuerySet(self.model, using=self._db)

    def for_kind(self, kind: str) -> CertificateRunQuerySet:
        return self.get_queryset().for_kind(kind)

    def for_family(self, family: str) -> CertificateRunQuerySet:
        return self.get_queryset().for_family(family)

    def for_depth(self, t: int) -> CertificateRunQuerySet:
        return self.get_queryset().for_depth(t)

    def passed(self) -> CertificateRunQuerySet:
        return self.get_queryset().passed()

    def with_min_bound(self, bits: float) -> CertificateRunQuerySet:
        return self.get_queryset().with_min_bound(bits)


class CertificateRunKind(models.TextChoices):
    """Certificate and bound computations that can be recorded."""

    PATCH = "PATCH", "Patch certificate"
    THEOREM2 = "THEOREM2", "Mesh intersection certificate"
    SEQUENTIAL = "SEQUENTIAL", "Sequential projection bound"
    MIXED = "MIXED", "Mixed-state syndrome bound"


class CertificateRun(models.Model):
    """
    One recorded certificate computation.

    The report payload and its digest are stored as written; the timestamp
    lives only here so report files stay byte-identical between runs.
    """

    kind = models.CharField(
        max_length=12,
        choices=CertificateRunKind.choices,
        help_text="Which certificate produced the row",
    )

    family = models.CharField(
        max_length=32,
        help_text="Code family (toric, honeycomb, custom, ...)",
    )

    n = models.PositiveIntegerField(help_text="Physical qubit count")

    t = models.PositiveSmallIntegerField(default=0, help_text="Circuit depth")

    m = models.PositiveIntegerField(
        default=0,
        help_text="Number of disentangled patches or verified intersections",
    )

    bound_bits = models.FloatField(
        help_text="Certified lower bound in bits",
        validators=[MinValueValidator(0.0, message="Bounds cannot be negative")],
    )

    alpha_effective = models.FloatField(
        default=0.0,
        help_text="Bound normalised by the instance size",
    )

    seed = models.BigIntegerField(null=True, blank=True, help_text="Seed used, if any")

    passed = models.BooleanField(default=True, help_text="Whether every witness verified")

    digest = models.CharField(max_length=64, help_text="SHA-256 of the JSON report")

    payload = models.JSONField(help_text="The report as written")

    # Audit fields
    created_at = models.DateTimeField(
        auto_now_add=True,
        help_text="Timestamp when the run was recorded",
    )

    objects = CertificateRunManager()

    class Meta:
        indexes = [
            models.Index(fields=["kind"], name="idx_run_kind"),
            models.Index(fields=["family", "t"], name="idx_run_family_depth"),
            models.Index(fields=["-created_at"], name="idx_run_created_desc"),
        ]

        constraints = [
            models.CheckConstraint(
                condition=models.Q(bound_bits__gte=0),
                name="check_bound_non_negative",
                violation_error_message="Bound must be non-negative.",
            ),
        ]

        verbose_name = "Certificate run"
        verbose_name_plural = "Certificate runs"

        ordering = ["-created_at", "kind"]

    def __str__(self):
        """String representation for listings."""
        return f"{self.get_kind_display()} {self.family} n={self.n} t={self.t}: {self.bound_bits:.4f} bits"

    def __repr__(self):
        """Developer-friendly representation."""
        return f"<CertificateRun: {self.kind} {self.family} n={self.n} t={self.t} {self.bound_bits}>"

    @property
    def bound_per_qubit(self) -> float:
        """Certified bits per physical qubit."""
        return self.bound_bits / self.n if self.n else 0.0

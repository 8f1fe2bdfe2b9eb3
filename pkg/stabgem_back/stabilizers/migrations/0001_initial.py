# Generated by Django 5.2.8 on 2026-10-19 09:12

import django.core.validators
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='CertificateRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('kind', models.CharField(choices=[('PATCH', 'Patch certificate'), ('THEOREM2', 'Mesh intersection certificate'), ('SEQUENTIAL', 'Sequential projection bound'), ('MIXED', 'Mixed-state syndrome bound')], help_text='Which certificate produced the row', max_length=12)),
                ('family', models.CharField(help_text='Code family (toric, honeycomb, custom, ...)', max_length=32)),
                ('n', models.PositiveIntegerField(help_text='Physical qubit count')),
                ('t', models.PositiveSmallIntegerField(default=0, help_text='Circuit depth')),
                ('m', models.PositiveIntegerField(default=0, help_text='Number of disentangled patches or verified intersections')),
                ('bound_bits', models.FloatField(help_text='Certified lower bound in bits', validators=[django.core.validators.MinValueValidator(0.0, message='Bounds cannot be negative')])),
                ('alpha_effective', models.FloatField(default=0.0, help_text='Bound normalised by the instance size')),
                ('seed', models.BigIntegerField(blank=True, help_text='Seed used, if any', null=True)),
                ('passed', models.BooleanField(default=True, help_text='Whether every witness verified')),
                ('digest', models.CharField(help_text='SHA-256 of the JSON report', max_length=64)),
                ('payload', models.JSONField(help_text='The report as written')),
                ('created_at', models.DateTimeField(auto_now_add=True, help_text='Timestamp when the run was recorded')),
            ],
            options={
                'verbose_name': 'Certificate run',
                'verbose_name_plural': 'Certificate runs',
                'ordering': ['-created_at', 'kind'],
                'indexes': [models.Index(fields=['kind'], name='idx_run_kind'), models.Index(fields=['family', 't'], name='idx_run_family_depth'), models.Index(fields=['-created_at'], name='idx_run_created_desc')],
                'constraints': [models.CheckConstraint(condition=models.Q(('bound_bits__gte', 0)), name='check_bound_non_negative', violation_error_message='Bound must be non-negative.')],
            },
        ),
    ]

from django.apps import AppConfig


class StabilizersConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'stabilizers'
    verbose_name = 'Stabilizer entanglement audits'

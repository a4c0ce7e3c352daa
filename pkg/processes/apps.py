from django.apps import AppConfig


class ProcessesConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'processes'
    verbose_name = "Process families"

    def ready(self):
        """Register the schedule-backed rate of divergence with the rule registry"""
        import processes.schedules  # noqa: F401

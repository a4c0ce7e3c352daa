from django.apps import AppConfig


class ModuliConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'moduli'
    verbose_name = "Bound calculus"

    def ready(self):
        """Import the rule modules so every provenance rule is registered"""
        import moduli.leaves  # noqa: F401
        import moduli.calculus  # noqa: F401
        import moduli.robbins_siegmund  # noqa: F401
        import moduli.robbins_monro  # noqa: F401

import os

import django

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "quantrs.settings")
django.setup()

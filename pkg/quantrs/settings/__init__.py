import os

if os.getenv('DJANGO_ENV', 'development') == 'production':
    from .production import *
else:
    from .development import *

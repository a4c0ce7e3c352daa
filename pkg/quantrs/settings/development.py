from .base import *

# Development-specific settings
DEBUG = True

LOGGING['loggers'].update({
    app: {'handlers': ['console'], 'level': 'DEBUG', 'propagate': False}
    for app in ('moduli', 'processes', 'estimators', 'verify', 'experiments')
})

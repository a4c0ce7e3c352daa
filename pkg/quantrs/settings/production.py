from .base import *

DEBUG = False

# Batch runs: keep the console quiet except for problems
LOGGING['loggers'].update({
    app: {'handlers': ['console'], 'level': 'WARNING', 'propagate': False}
    for app in ('moduli', 'processes', 'estimators', 'verify', 'experiments')
})

QRS_WORKERS = int(os.getenv('QRS_WORKERS', '4'))

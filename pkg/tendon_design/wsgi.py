"""
WSGI entry point for the tendon_design project.

Serves the design evaluation API, e.g. ``gunicorn tendon_design.wsgi``.
"""

import os

from django.core.wsgi import get_wsgi_application

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'tendon_design.settings')

application = get_wsgi_application()

"""
ASGI entry point for the tendon_design project, for async servers hosting
the design evaluation API.
"""

import os

from django.core.asgi import get_asgi_application

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'tendon_design.settings')

application = get_asgi_application()

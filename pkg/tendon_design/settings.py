"""
Django settings for the tendon_design project.
Every tunable value can be overridden from the environment.
"""
import os
from pathlib import Path

BASE_DIR = Path(__file__).resolve().parent.parent

# Security
SECRET_KEY = os.environ.get('SECRET_KEY', 'tendon-design-development-key')
DEBUG = os.environ.get('DEBUG', 'False').lower() == 'true'

ALLOWED_HOSTS = [host.strip() for host in os.environ.get('ALLOWED_HOSTS', 'localhost,127.0.0.1').split(',') if host.strip()]

# Database: none. Django falls back to its dummy backend and no operation touches it.
DATABASES = {}

# Applications
INSTALLED_APPS = [
    'rest_framework',
    'geometry',
    'mechanism',
    'torque_space',
    'objectives',
    'moo',
    'experiments',
]

MIDDLEWARE = [
    'django.middleware.security.SecurityMiddleware',
    'django.middleware.common.CommonMiddleware',
]

ROOT_URLCONF = 'tendon_design.urls'
WSGI_APPLICATION = 'tendon_design.wsgi.application'

# Templates (SVG renderings are Django templates)
TEMPLATES = [
    {
        'BACKEND': 'django.template.backends.django.DjangoTemplates',
        'DIRS': [],
        'APP_DIRS': True,
        'OPTIONS': {
            'context_processors': [],
        },
    },
]

# Internationalization
LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'
USE_I18N = False
USE_TZ = True

# REST Framework
REST_FRAMEWORK = {
    'DEFAULT_PERMISSION_CLASSES': [
        'rest_framework.permissions.AllowAny',
    ],
    'DEFAULT_AUTHENTICATION_CLASSES': [],
    'UNAUTHENTICATED_USER': None,
    'DEFAULT_RENDERER_CLASSES': [
        'rest_framework.renderers.JSONRenderer',
    ],
}

# Logging
LOG_LEVEL = os.environ.get('LOG_LEVEL', 'INFO').upper()

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '{levelname} {asctime} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'plain',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': LOG_LEVEL,
    },
}

# Design search defaults
TENDON_DESIGN = {
    'EPSILON': float(os.environ.get('TENDON_EPSILON', '1e-4')),
    'R_MIN': float(os.environ.get('TENDON_R_MIN', '1e-3')),
    'BRENT_MAX_ITER': 20,
    'BRENT_XATOL': 1e-6,
    'PRESCAN_POINTS': 9,
    'EVALUATION_WORKERS': int(os.environ.get('TENDON_WORKERS', '1')),
    'PRESETS_DIR': BASE_DIR / 'experiments' / 'presets',
}

"""
URL configuration for the tendon_design project.

Only the stateless design evaluation API is exposed over HTTP; the search
itself runs through the management commands.
"""
from django.urls import path, include

urlpatterns = [
    path('', include('experiments.urls')),
]

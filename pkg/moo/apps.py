from django.apps import AppConfig


class MooConfig(AppConfig):
    name = 'moo'

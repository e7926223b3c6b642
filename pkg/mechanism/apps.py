from django.apps import AppConfig


class MechanismAppConfig(AppConfig):
    name = 'mechanism'

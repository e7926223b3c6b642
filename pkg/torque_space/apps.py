from django.apps import AppConfig


class TorqueSpaceConfig(AppConfig):
    name = 'torque_space'

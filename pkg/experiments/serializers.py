from django.conf import settings
from rest_framework import serializers

from mechanism.exceptions import ConfigurationError
from mechanism.types import JOINT_AXES, MechanismConfig


def _setting(name):
    return lambda: settings.TENDON_DESIGN[name]


class MechanismSerializer(serializers.Serializer):
    """Link geometry and wire layout"""
    disc_radius = serializers.FloatField()
    link_length = serializers.FloatField()
    joint_axes = serializers.ListField(
        child=serializers.ChoiceField(choices=JOINT_AXES), min_length=2, max_length=3
    )
    wire_count = serializers.IntegerField(min_value=1, max_value=12)
    points_per_wire = serializers.IntegerField(min_value=2, max_value=3)
    link_clearance = serializers.FloatField(min_value=0.0, default=0.0)

    def validate(self, attrs):
        try:
            MechanismConfig(**attrs)
        except ConfigurationError as exc:
            raise serializers.ValidationError(str(exc))
        return attrs


class TensionSerializer(serializers.Serializer):
    """Muscle tension limits in newtons"""
    f_min = serializers.FloatField(min_value=0.0)
    f_max = serializers.FloatField()

    def validate(self, attrs):
        if attrs['f_min'] >= attrs['f_max']:
            raise serializers.ValidationError('f_min must be smaller than f_max')
        return attrs


class TrajectorySerializer(serializers.Serializer):
    """Joint-angle waypoints in degrees"""
    waypoints = serializers.ListField(
        child=serializers.ListField(child=serializers.FloatField(), min_length=2, max_length=3),
        min_length=2,
    )
    close_loop = serializers.BooleanField(default=False)

    def validate_waypoints(self, value):
        if len({len(waypoint) for waypoint in value}) != 1:
            raise serializers.ValidationError('All waypoints must have the same number of angles')
        return value


class ThresholdsSerializer(serializers.Serializer):
    epsilon = serializers.FloatField(default=_setting('EPSILON'))
    r_min = serializers.FloatField(default=_setting('R_MIN'))
    sphere_center = serializers.ListField(
        child=serializers.FloatField(), min_length=2, max_length=3, required=False, allow_null=True, default=None
    )

    def validate_epsilon(self, value):
        if value <= 0:
            raise serializers.ValidationError('epsilon must be positive')
        return value

    def validate_r_min(self, value):
        if value <= 0:
            raise serializers.ValidationError('r_min must be positive')
        return value


class GASerializer(serializers.Serializer):
    """NSGA-II budget and operator settings"""
    population = serializers.IntegerField(min_value=4, default=50)
    generations = serializers.IntegerField(min_value=1, default=600)
    seed = serializers.IntegerField(min_value=0, default=0)
    crossover_prob = serializers.FloatField(min_value=0.0, max_value=1.0, default=0.9)
    crossover_eta = serializers.FloatField(default=20.0)
    mutation_prob = serializers.FloatField(min_value=0.0, max_value=1.0, required=False, allow_null=True, default=None)
    mutation_eta = serializers.FloatField(default=20.0)
    workers = serializers.IntegerField(min_value=1, default=_setting('EVALUATION_WORKERS'))

    def validate_population(self, value):
        if value % 2:
            raise serializers.ValidationError('population must be even')
        return value

    def validate(self, attrs):
        if attrs['crossover_eta'] <= 0 or attrs['mutation_eta'] <= 0:
            raise serializers.ValidationError('Distribution indices must be positive')
        return attrs


class SelectionSerializer(serializers.Serializer):
    design_2 = serializers.ChoiceField(choices=['global', 'crossing'], default='global')


class ExperimentConfigSerializer(serializers.Serializer):
    """Complete experiment configuration tree"""
    name = serializers.CharField(required=False, allow_blank=True, default='')
    mechanism = MechanismSerializer()
    tension = TensionSerializer()
    trajectory = TrajectorySerializer()
    thresholds = ThresholdsSerializer(required=False)
    ga = GASerializer(required=False)
    selection = SelectionSerializer(required=False)
    output = serializers.CharField(required=False, allow_null=True, default=None)

    def validate(self, attrs):
        for name in ('thresholds', 'ga', 'selection'):
            if name not in attrs:
                attrs[name] = self.fields[name].run_validation({})
        dof_count = len(attrs['mechanism']['joint_axes'])
        if len(attrs['trajectory']['waypoints'][0]) != dof_count:
            raise serializers.ValidationError({
                'trajectory': {'waypoints': [f'Waypoints must have {dof_count} angles to match joint_axes']}
            })
        center = attrs['thresholds'].get('sphere_center')
        if center is not None and len(center) != dof_count:
            raise serializers.ValidationError({
                'thresholds': {'sphere_center': [f'sphere_center must have {dof_count} components']}
            })
        return attrs


class EvaluateDesignSerializer(serializers.Serializer):
    """Request body of the evaluation endpoint"""
    config = serializers.DictField()
    design = serializers.DictField()

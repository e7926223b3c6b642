import dataclasses
import logging

from rest_framework import status
from rest_framework.permissions import AllowAny
from rest_framework.response import Response
from rest_framework.views import APIView

from mechanism.exceptions import ConfigurationError
from objectives.evaluation import evaluate, validate_design

from .config import config_from_tree
from .designs import design_from_dict
from .serializers import EvaluateDesignSerializer

logger = logging.getLogger(__name__)


class EvaluateDesignView(APIView):
    """Evaluates one design under an experiment config; stateless"""
    permission_classes = [AllowAny]

    def post(self, request):
        serializer = EvaluateDesignSerializer(data=request.data)

        if not serializer.is_valid():
            return Response(serializer.errors, status=status.HTTP_400_BAD_REQUEST)

        data = serializer.validated_data
        try:
            experiment = config_from_tree(data['config'], source='config')
            design = design_from_dict(data['design'], experiment.mechanism)
            contacts = validate_design(experiment.mechanism, design)
            evaluation = evaluate(
                experiment.mechanism, design, experiment.trajectory, experiment.bounds,
                experiment.epsilon, experiment.r_min, experiment.sphere_center,
            )
        except ConfigurationError as exc:
            logger.warning(f"Rejected evaluation request: {exc}")
            return Response({'error': str(exc)}, status=status.HTTP_400_BAD_REQUEST)

        logger.info(f"Evaluated design for '{experiment.name}': E_cross={evaluation.e_cross}")
        return Response(dataclasses.replace(evaluation, link_contacts=contacts).as_dict(), status=status.HTTP_200_OK)

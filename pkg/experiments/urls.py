from django.urls import path

from .views import EvaluateDesignView

urlpatterns = [
    path('api/designs/evaluate/', EvaluateDesignView.as_view(), name='evaluate-design'),
]

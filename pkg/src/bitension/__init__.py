"""Numerical tension, Jacobi, and bitension machinery for chart-defined maps."""

__version__ = "0.1.0"

from .charts import (ChartDomain, DomainError, RiemannianMetric, SmoothMap,
                     VectorFieldAlongMap)
from .geometry import (GeometryInputError, MapState, MetricError, bienergy,
                       bitension_field, christoffel, conformality_factor,
                       curvature_tensor, first_variation, jacobi_apply,
                       pullback_metric, tension_field)

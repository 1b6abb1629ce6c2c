"""Ground-truth generators: model-space closed forms and a Euclidean graph laboratory."""

from .model import (ModelTriangle, comparison_angle, geodesic_sphere_exact_ninj,
                    law_of_cosines_angle, law_of_cosines_side)
from .graphs import (GraphHypersurface, ProductMetric, flat_metric, gaussian_bump, graph_normal,
                     graph_secfund, paraboloid, plane, polynomial, principal_curvatures, quadric,
                     secfund_norms, shape_operator, sphere_cap, upward_normals, warped_metric)
from .lab import (BitangentSphere, ReachSample, bitangent_sphere_search, empirical_ninj,
                  lattice_samples, radial_angle_empirical, reach_sample, sample_surface)
from .experiments import (NAMED_EXPERIMENTS, DescriptorError, run_experiment,
                          validate_descriptor)

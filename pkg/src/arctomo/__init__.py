"""Great-circle arc transform on the sphere: harmonics, quadrature, singular values, inversion."""
from .arcs import (Arc, ArcMeasurements, arc_from_endpoints, arc_polyline, fixed_point_arc,
                   fixed_point_invert, fixed_point_transform, forward_quadrature,
                   forward_spectral, read_measurements, write_measurements)
from .errors import (AntipodalError, DegenerateError, DomainError, ExactnessWarning,
                     MeasurementFormatError, QuadratureFormatError, SingularValueError)
from .inversion import (FilterSpec, ReconstructionReport, add_noise, invert, make_phantom,
                        rmse, simulate)
from .quadrature import (QuadratureS2, QuadratureSO3, gauss_legendre_s2, gauss_legendre_so3,
                         load_nodes, s1_x_s2_so3, save_nodes, verify_exactness)
from .rotation import (EulerRotation, RotationalCoeffs, euler_to_matrix, matrix_to_euler,
                       rotational_analyze, rotational_synthesize, wigner_d, wigner_D)
from .spectral import (mu, mu_limit, normalized_mu2, sigma, singular_function_E,
                       singular_function_Z, singular_value_table)
from .sphere import (Direction, SphericalAngles, SphericalCoeffs, analyze, evaluate,
                     legendre_at_zero, legendre_normalized, sph_harm)

__version__ = "0.1.0"

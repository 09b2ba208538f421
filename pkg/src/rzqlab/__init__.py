"""rzqlab: a pseudospectral laboratory for a fifth-order integrable
Camassa-Holm-type equation on the torus, with a large-box real-line
surrogate, pseudo-peakon dynamics, and reproducible experiment reports."""

from .errors import (BlowUpError, BoundaryLeakWarning, ConfigurationError,
                     DegenerateInputError, DomainError, NearCollisionWarning,
                     ResolutionError, ResolutionWarning, StabilityError,
                     SurrogateInvalidError)
from .spectral import (Grid, PeriodicField, SobolevIndex, derivative,
                       field_from_function, from_spectrum, lambda_pow, mean,
                       product, random_field, resample, sobolev_norm,
                       sup_norms, to_spectrum)
from .operators import (DefectRate, InequalityRecord, MollifierSpec,
                        ccm_commutator_check, kato_ponce_check, mollify,
                        mollifier_defect_rate, mollifier_symbol,
                        product_lemma_check)
from .dynamics import (EvolutionConfig, LifespanEstimate, RhsForm, Trajectory,
                       conserved_quantities, empirical_lifespan, evolve,
                       rhs_burgers_equiv, rhs_m_form, rhs_mollified,
                       rhs_nonlocal, stability_ceiling, step)
from .peakons import (PeakonEnsemble, PeakonTrajectory, ensemble_to_field,
                      evolve_peakons, hamiltonian, peakon_flow,
                      peakon_sobolev_norm_sq, pseudo_peakon,
                      pseudo_peakon_fourier)
from .reporting import (ExperimentReport, SlopeFit, SweepRecord, Verdict,
                        fit_loglog, report_to_csv, report_to_json)

__version__ = "0.1.0"

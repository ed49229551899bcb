from .elbo import elbo
from .estep import estep_update_y, estep_update_factors
from .mstep import mstep_update_loadings, mstep_update_lambda, mstep_update_beta
from .identifiability import apply_identifiability
from .init import init_params
from .machine import VariationalEM, fit

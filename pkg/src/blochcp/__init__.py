"""Complete positivity of Bloch-matrix superoperators on n-qubit systems."""
from .bloch import (BlochVector, bloch_from_density, density_from_bloch, is_positive_semidefinite,
                    purity)
from .channels import (CPReport, SignedOperatorSum, apply, bloch_matrix, certify, choi_matrix,
                       elements_linearly_independent, is_completely_positive, is_trace_preserving,
                       is_unital, sign_verdict)
from .diagonal_af import (DiagonalSpec, af_betas, diagonal_from_channel, is_cp_diagonal,
                          kraus_from_spec, one_qubit_af_inequalities, one_qubit_positivity)
from .errors import BlochCPError, ContractError, InputError, NotCompletelyPositiveError, ResourceError
from .pauli_basis import basis_element, pauli, sign_table, tensor
from .svd_reduction import (decompose_unital, is_unital_quantum_operation, rotation_to_unitary,
                            signed_svd)

__version__ = "0.1.0"

"""ptbzero: exact depth-zero distinction and epsilon-factor calculus.

The package machine-verifies, by exact computation over small residue
fields, the depth-zero case of a local distinction conjecture: it builds
tame and conductor-2 characters on towers of local fields in equal
characteristic, evaluates Gauss-sum epsilon factors and lambda constants
against a battery of standard identities, classifies the selfduality type
of monomial Weil parameters two independent ways, realizes the matching
depth-zero supercuspidal data over the residue field (Green cuspidal
characters, Shalika and twisted-unitary-distinction Hom dimensions), and
sweeps every admissible case checking that distinction, symplecticity of
the twisted parameter, and the sign of the local epsilon value move in
lockstep.
"""

__version__ = "0.1.0"

"""Graph spectra, heat diffusion and spectral diagnostics."""

from geognn.spectral.alignment import (
    AlignmentReport,
    align_spectra,
    multiplicity_clusters,
    sampled_reference,
)
from geognn.spectral.eig import Spectrum, eig_sym
from geognn.spectral.heat import (
    HeatRoute,
    default_spectrum,
    heat_apply,
    heat_tail_bound,
    spectral_response_apply,
)
from geognn.spectral.partition import (
    FdtDecomposition,
    FreqPartition,
    alpha_partition,
    eigengap,
    fdt_decompose,
    weyl_N1,
)

__all__ = [
    # Eigenpairs
    "Spectrum",
    "eig_sym",
    # Heat semigroup
    "HeatRoute",
    "default_spectrum",
    "spectral_response_apply",
    "heat_apply",
    "heat_tail_bound",
    # Alignment
    "AlignmentReport",
    "multiplicity_clusters",
    "sampled_reference",
    "align_spectra",
    # Partitions
    "FreqPartition",
    "alpha_partition",
    "eigengap",
    "weyl_N1",
    "FdtDecomposition",
    "fdt_decompose",
]

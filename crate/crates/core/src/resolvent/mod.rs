//! Concrete generators (matrices, multiplication symbols, convolution
//! semigroups on periodic grids), regularized resolvent families built from
//! them by subordination, and checks of the defining identities.

mod checks;
mod family;
mod generator;
mod grid;

pub use checks::{
    commutation_check, laplace_characterization, matrix_family, multiset_distance, normalization_limit, resolvent_value,
    spectral_inclusion_check, verify_resolvent_equation, CommutationReport, LaplacePoint, LaplaceReport, InclusionResidual,
    NormalizationReport, ResolventPoint, ResolventReport, SpectralReport, GRID_RESOLVENT_TOL, LAPLACE_TOL, INCLUSION_TOL,
    MATRIX_RESOLVENT_TOL, SPECTRAL_TOL,
};
pub use family::{base_family, convolve_in_time, subordinate, FamilyKind, OperatorFamily};
pub use generator::{Generator, GeneratorKind, KernelFamily, SymbolTag};
pub use grid::{Grid, SampledField};

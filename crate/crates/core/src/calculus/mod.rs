//! Operations on hyperbolic sheaves: global sections, vanishing cycles,
//! specialization and the Fourier transform.

mod blocks;
mod fourier;
mod global;
mod selection;
mod specialize;
mod stalk;
mod vanishing;

pub use fourier::{
    double_fourier_experiment, fourier, fourier_cross_check, fourier_cross_check_all, fourier_cross_complex,
    inclusion_exclusion_check, microlocalize_experimental, relative_fourier, split_product, CrossCheck, DoubleFourier,
    FourierTransform, Microlocalization,
};
pub use global::{
    ensure_valid, hyperbolic_from_stalks, hyperbolic_from_stalks_check, hyperbolic_from_stalks_complex, ordinary_stalk,
    ordinary_stalk_complex, rgamma_compact, rgamma_compact_complex, rgamma_full, rgamma_full_complex,
};
pub use selection::{
    build_selection_complex, complex_statistics, quotient_orientation, Block, Grading, SelectionComplex, Variant,
};
pub use specialize::{
    bispec_consistency, image_flat, specialize, specialize_along, BispecReport, FiberSummary, Specialization,
};
pub use stalk::{h0_stalk, H0Stalk, StalkSummary};
pub use vanishing::{
    half_space_selection, nonnegative_on, polarizations, vanishing_cycles, vanishing_instances, VanishingCycles,
};

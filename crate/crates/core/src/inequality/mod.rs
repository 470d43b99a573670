//! Space-time Fourier analysis: modulation shells, Bourgain norms and ratio
//! probes for the Strichartz, bilinear and `X^{b,0}` embedding estimates.

mod ensembles;
mod probes;
mod shells;
mod spacetime;

pub use ensembles::{
    initial_data, last_over_median, max_by_truncation, multi_shell, product_order_drift, random_forcing,
    shell_localized, spacetime_random, BilinearSummary, BilinearSweep, DataKind, TruncationSweep,
};
pub use probes::{
    apply_cutoff, bilinear_ratio, cutoff, duhamel_field, embedding_ratio, inhomog_ratio, strichartz_ratio,
    BilinearProbe,
};
pub use shells::{
    bin_scale, bourgain_norm, dyadic_decompose, lp_spacetime_norm, modulation_project, overlapping_project,
    BourgainParams, ModulationShell,
};
pub use spacetime::{sample_times, SpaceTimeField};

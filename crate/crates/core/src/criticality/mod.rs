//! Null- versus positive-criticality: the logarithmic cut-off family, its
//! energy integrals and decay fit, and the combined verdict.

mod cutoff;
mod experiment;

pub use cutoff::{epsilon_max, eval_cutoff, CutoffFamily, CutoffJet, CutoffQuantity, CutoffRegion};
pub use experiment::{
    attainment_ratio, criticality_integrals, criticality_sweep, criticality_verdict, epsilon_seed, rate_fit,
    strictly_decreasing, AttainmentReport, Criticality, CriticalityIntegrals, Evidence, RateFit, SweepRow,
    VerdictParams, VerdictReport, RATE_FIT_TOLERANCE,
};

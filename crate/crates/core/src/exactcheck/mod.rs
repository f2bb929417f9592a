//! Exhaustive oracle over small finite product spaces.
//!
//! [`ExactModel`] tabulates the Doob martingale `Y_k = E(f | F_k)`, the
//! conditional failure probabilities of `Gamma`, the events `B_k` and the
//! stopping time `T` exactly. The checks compare these against every bound
//! in [`crate::bounds`].

mod checks;
mod generator;
mod model;
mod space;
mod spec;

pub use checks::{
    doob_trace, exact_tbdi_check, martingale_lemma_check, minimal_lipschitz, BoundCheck,
    ExactReport, LemmaCheck, LemmaReport, LipschitzMode, MartingalePath, MartingaleTrace,
    StoppedMartingale, COMPARE_SLACK, EVENT_SLACK,
};
pub use generator::{
    check_instance, generate_space, instance_rng, run_martingale_suite, run_product_space_suite,
    Counterexample, GeneratorConfig, LemmaSuiteSummary, SuiteSummary,
};
pub use model::ExactModel;
pub use space::{FiniteProductSpace, SpaceError, SpaceLimits};
pub use spec::{EventSpec, FnSpec};

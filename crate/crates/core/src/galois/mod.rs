//! Galois points: fibers, Monte Carlo screening, collineation, deck and
//! birational certificates, and the orchestrator that combines them.

mod birational;
mod collineation;
mod deck;
mod fiber;
mod monte_carlo;
mod report;

pub use birational::{
    affine_points, certify_birational, permutation_action, AffinePlaneMap, BirationalGroup, PointMap,
};
pub use collineation::{central_collineation_group, is_central_with_center, CollineationMode, DEFAULT_BRUTE_Q_CAP};
pub(crate) use deck::upoly_text;
pub use deck::{deck_group, deck_group_over, Parametrization, RationalMap1D};
pub use fiber::{classify_center, fiber_polynomial, frame_for, transform_form, PointClass, ProjectionFiber};
pub use monte_carlo::{constant_field_bound, monte_carlo_screen, verify_witness, MonteCarloOutcome, Witness};
pub use report::{
    fixes_point, is_galois_point, joint_structure, lemma_line, monte_carlo_galois, CertifiedGroup, GaloisReport,
    LemmaLine, Method, RunConfig, Strategy, Verdict,
};

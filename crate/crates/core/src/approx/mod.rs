//! Approximating functions, approximable points, witness searches and the
//! transference and convergence audits built on them.

pub mod dichotomy;
pub mod psi;
pub mod series;
pub mod sets;
pub mod transference;

pub use dichotomy::{run_dichotomy, DichotomyConfig, DichotomyReport, WindowStat};
pub use psi::{height, s_norm_int, s_norm_vec, ApproxFunction, PsiValue};
pub use series::{borel_cantelli_sum, lower_order, lower_order_fn, series_audit, BorelCantelliReport, Convergence, DyadicSum, LowerOrder, SeriesReport};
pub use sets::{
    derivative_split, is_approximable, is_approximable_padic, phi_membership, solution_search, DerivativeSplit, NonzeroConvention,
    PhiMethod, PhiVerdict, PlaceSplit, SPoint, SSystem, SolutionList, Witness,
};
pub use transference::{intersection_witness, it_ht_membership, IntersectionReport, MembershipTrace, SetKind, TransferenceParams};

//! Planning-outcome regressions and the land-use deviation regression.

mod binary;
mod landuse;
mod linalg;
mod ols;
mod records;
mod report;

pub use binary::{
    fit_binary, log_likelihood, log_likelihood_parts, FitResult, Link, LOGLIK_TOLERANCE,
    MAX_ITERATIONS, SEPARATION_BOUND,
};
pub use landuse::{
    aggregate_landuse, parse_share_table, read_share_table, LandUseCategory, LandUseGroup,
    ShareTable,
};
pub use linalg::Design;
pub use ols::{deviation_regression, fit_ols, OlsResult};
pub use records::{
    fit_logit, fit_planning, fit_probit, parse_planning_csv, planning_design, read_planning_csv,
    synthetic_planning_records, write_planning_csv, ModelSpec, PlanningRecord, SiteDistances,
    Technology,
};
pub use report::{format_fit_report, format_ols_report, stars};

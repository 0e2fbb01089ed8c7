//! Weighted Fekete points, the transfinite-diameter sequence, and the exact
//! integer certificate for small numbers of points.

mod certificate;
mod points;

pub use certificate::{
    exact_gs_certificate, exact_gs_certificate_with_budget, weighted_discriminant, Expansion, GSCertificate,
    DEFAULT_TERM_BUDGET,
};
pub use points::{fekete_points, log_vandermonde, transfinite_sequence, FeketeSet};

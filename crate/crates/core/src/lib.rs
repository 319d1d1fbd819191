//! Exact counting of polygon diagrams on oriented bordered surfaces.
//!
//! A polygon diagram places disjoint polygons on a genus-`g` surface with
//! `n` boundary components so that the polygon vertices are exactly the
//! marked boundary points; counting them by the number of points on each
//! boundary gives the family `P`. Forbidding boundary-parallel edges gives
//! the pruned family `Q`, and restricting every polygon to a bigon gives the
//! pruned arc family `N`. All three are computed here in exact rational
//! arithmetic, together with the structural verification layer: parity-
//! stratified polynomial fits, structure-polynomial extraction, top-degree
//! coefficient comparison between families, ψ-class intersection numbers
//! read off from top coefficients, and a generating-differential pullback
//! check on the one-holed torus.
//!
//! Modules:
//! - [`exact`]: big-rational arithmetic and the combinatorial conventions.
//! - [`poly`]: exact multivariate polynomials, tensor-grid interpolation,
//!   and parity-stratified quasi-polynomials.
//! - [`series`]: truncated Laurent series for the pullback check.
//! - [`counts`]: the memoized counting engines for `P`, `Q`, `N` and the
//!   cuff transform between them.
//! - [`identities`]: Bernoulli numbers, parity power sums, the moment
//!   polynomial family, and constrained convolution sums.
//! - [`analysis`]: fits, structure polynomials, intersection tables, and
//!   the pullback report.
//! - [`verify`]: the named check suites behind `polycount verify`.

pub mod analysis;
pub mod counts;
pub mod exact;
pub mod identities;
pub mod poly;
pub mod series;
pub mod verify;

pub use analysis::{
    fit_quasipoly, intersection_numbers, pullback_check, qn_top_check, structure_polynomial,
    FitReport, IntersectionTable, PullbackReport, TopRatioReport,
};
pub use counts::{
    cuff_count, p_closed, q11_closed, q_base, CountCache, CountKey, Counter, Family, SurfaceClass,
};
pub use exact::Rat;
pub use poly::{MultiPoly, ParityClass, ParitySignature, QuasiPoly};
pub use series::LaurentSeries;

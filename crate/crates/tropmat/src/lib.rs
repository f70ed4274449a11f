//! Exact computations with tropical linear spaces, matroids, truncated
//! tropical ideals and Bergman fans.
//!
//! All arithmetic is over the min-plus semifield `(Q ∪ {∞}, min, +)` with
//! arbitrary-precision rational scalars. No floating point is used anywhere,
//! so ties (a minimum attained twice) are detected exactly.

pub mod bergman;
pub mod ideal;
pub mod matroid;
pub mod poly;
pub mod realisable;
pub mod report;
pub mod sample;
pub mod trop;
pub mod valuated;
pub mod vamos;

pub use matroid::Matroid;
pub use trop::{MinPlusSpan, TropValue, TropVector};

//! The graded fiber algebra `W ⊗ Λ ⊗ F` and its structural operators.

pub mod element;
pub mod fiber;
pub mod key;
pub mod product;
pub mod serial;
pub mod series;

pub use element::{GradedElement, TruncationOrder};
pub use fiber::{EndMatrix, Fiber, FiberKind, FiberMul, FiberVector, Scalar};
pub use key::GradedKey;
pub use product::{
    ad, ad_cutoff, scaled_ad, scaled_ad_cutoff, scaled_mul, scaled_mul_cutoff, try_weyl_mul, weyl_mul, weyl_mul_cutoff,
    weyl_mul_symbol_part,
};
pub use series::{FormalEndo, FormalFunction, FormalSection, FormalSeries};

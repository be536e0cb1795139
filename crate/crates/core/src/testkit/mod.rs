//! Oracles, random inputs and the property harness.

pub mod oracle;
pub mod random;
pub mod scenarios;
pub mod shrink;
pub mod suite;

pub use oracle::{moyal_oracle, poisson_bracket};
pub use random::{random_element, random_endo, random_function, random_section, RandomSpec, Sampler};
pub use shrink::{check_all, shrink, Shrinkable};
pub use suite::{run_property_suite, SuiteOptions, Trials};

//! Quantitative safety and liveness over infinite traces.
//!
//! ```
//! use qsl_core::props::builtins::min_response;
//! use qsl_core::{classify, Check, Lasso, Property64};
//!
//! let p: Property64 = min_response(8)?;
//! let l = Lasso::parse("; rq tk gr", p.alphabet())?;
//! assert_eq!(p.domain().format(&p.eval_lasso(&l)?), "1");
//! let report = classify(&p, 6)?;
//! assert!(report.verdict(Check::Safe).unwrap().is_yes());
//! # Ok::<(), qsl_core::Error>(())
//! ```

pub mod classify;
pub mod closure;
pub mod decompose;
pub mod domains;
pub mod error;
pub mod format;
pub mod graph;
pub mod monitor;
pub mod props;
pub mod sample;
pub mod scalar;
pub mod traces;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use classify::{classify, classify_with, Check, ClassificationReport, Verdict};
pub use decompose::{cosafety_coliveness, liveness_liveness, safety_liveness, verify_decomposition, Mode};
pub use domains::{ExtNat, Relation, Value, ValueDomain};
pub use monitor::{synthesize, AbstractMonitor, GhostState};
pub use props::{Property, ValueFunction};
pub use traces::{Alphabet, FiniteTrace, Lasso, Trace};

/// Double-precision instantiations.
pub type Value64 = Value<f64>;
pub type Property64 = Property<f64>;
pub type Report64 = ClassificationReport<f64>;
pub type Monitor64 = AbstractMonitor<f64>;
pub type Ghost64 = GhostState<f64>;

//! Program synthesis from noisy input/output examples.
//!
//! Programs range over a user-supplied grammar. Finite tree automata
//! collect every program of bounded scope height consistent with the
//! examples; weighted variants track a per-program dataset loss, and
//! synthesis picks the accepted program optimising an objective over loss
//! and complexity.

pub mod cfta;
pub mod dataset;
pub mod dsl;
pub mod error;
pub mod loss;
pub mod noise;
pub mod objective;
pub mod sfta;
pub mod synthesis;
pub mod value;

pub use cfta::{build_cfta, BuildOptions, Cfta, Label, State, StateId, Transition};
pub use dsl::{Grammar, GrammarBuilder, Program};
pub use error::*;
pub use dataset::ValueKind;
pub use loss::{DataSet, Example, LossKind, PerExampleLoss};
pub use noise::NoiseSpec;
pub use objective::{CostTable, Objective, ObjectiveValue};
pub use sfta::Sfta;
pub use synthesis::{SynthesisResult, Task};
pub use value::{Dir, Env, Value, Weight, WEIGHT_EPSILON};

//! Search for cryptographically strong bijective S-boxes with a
//! hill-climbing genetic algorithm steered by a Walsh spectrum cost, plus
//! the usual S-box property analysis (nonlinearity, differential
//! uniformity, algebraic degree and algebraic immunity).

pub mod error;
pub mod evolution;
pub mod gf2;
pub mod harness;
pub mod properties;
pub mod sbox;
pub mod seed;
pub mod spectral;

pub use error::{Error, Result};
pub use evolution::{
    elite_selection, ga_baseline, ga_modified, run_single, BaselineGaParams, Candidate, RunRecord,
    SearchOutcome, SearchParams,
};
pub use properties::{full_report, PropertyReport};
pub use sbox::{SBox, TruthTable};
pub use seed::RngSeed;
pub use spectral::{Cost, CostParams, EvalResult, Evaluator, WalshSpectrum, WhsEvaluator};

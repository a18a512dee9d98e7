//! Empirical verification of norm inequalities, operator bounds and the
//! exponent bookkeeping behind them, over seeded random function corpora.

mod aux;
mod calibrate;
mod checks;
mod constants;
mod corpus;
mod report;
mod suite;

pub use aux::{eta_identity_check, eval_aux, log_log_slope, AuxExponents, AuxValues};
pub use calibrate::{
    calibrate, calibrated_checks, potential_grand_pair, run_calibrated, Calibration, CalibratedCheck, CalibratedParams,
    CalibrationEntry, CALIBRATION_SAMPLES, CALIBRATION_SEED,
};
pub use checks::{
    commutator_cz, commutator_potential, dominance_check, embedding_chain_check, fefferman_stein_check,
    operator_norm_ratio, reduction_transfer_check, sample_ratios, stability, FormulaBound, NormEval, NormSpec,
    Stability,
};
pub use constants::ConstantFormula;
pub use corpus::{CorpusSpec, Family};
pub use report::{CorpusInfo, VerificationReport, Verdict};
pub use suite::{
    run_suite, space_report, summary_csv, write_outputs, CheckKind, CorpusSettings, SpaceSpec, SuiteConfig, SuiteOutcome,
    SuiteParams, Tolerances,
};

use thiserror::Error;

use crate::funcnorm::NormError;
use crate::homspace::{SpaceError, SpaceIoError};
use crate::operators::OperatorError;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("invalid exponents: {0}")]
    InvalidExponents(String),
    #[error("singular denominator at x = {0}")]
    SingularDenominator(f64),
    #[error("parameters out of range: {0}")]
    OutOfRange(String),
    #[error("{0}: every sample has a zero denominator")]
    AllSamplesDegenerate(String),
    #[error("hypothesis {which} failed: {witness}")]
    HypothesisFailed { which: String, witness: String },
    #[error("no checks selected")]
    NoChecks,
    #[error("config: {0}")]
    Config(String),
    #[error("calibration: {0}")]
    Calibration(String),
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    SpaceIo(#[from] SpaceIoError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

//! Evaluation tooling for machine translation of low-resource language
//! pairs: parallel corpus preparation, automatic metrics (BLEU, TER, ChrF,
//! unigram F1), SQM/MQM human-evaluation scoring with Cohen's kappa,
//! hyperparameter grids and energy reports.

pub mod corpus;
pub mod green;
pub mod hpo;
pub mod humaneval;
pub mod metrics;
pub mod reports;

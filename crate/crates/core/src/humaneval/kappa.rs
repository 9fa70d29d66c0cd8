use std::fmt;

use serde::{Deserialize, Serialize};

use super::{HumanEvalError, Result};
use crate::metrics::round_to;

/// Cohen's interpretation bands, plus a marker for perfect observed
/// agreement where kappa is undefined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KappaBand {
    None,
    Slight,
    Fair,
    Moderate,
    Substantial,
    AlmostPerfect,
    DegeneratePerfect,
}

impl KappaBand {
    /// Classifies a kappa value after rounding it to two decimals, the
    /// precision the band boundaries are stated in.
    pub fn from_kappa(kappa: f64) -> Self {
        let k = round_to(kappa, 2);
        if k <= 0.0 {
            KappaBand::None
        } else if k <= 0.20 {
            KappaBand::Slight
        } else if k <= 0.40 {
            KappaBand::Fair
        } else if k <= 0.60 {
            KappaBand::Moderate
        } else if k <= 0.80 {
            KappaBand::Substantial
        } else {
            KappaBand::AlmostPerfect
        }
    }

    /// Fair or better, counting perfect observed agreement.
    pub fn at_least_fair(self) -> bool {
        self >= KappaBand::Fair
    }

    pub fn label(self) -> &'static str {
        match self {
            KappaBand::None => "none",
            KappaBand::Slight => "slight",
            KappaBand::Fair => "fair",
            KappaBand::Moderate => "moderate",
            KappaBand::Substantial => "substantial",
            KappaBand::AlmostPerfect => "almost-perfect",
            KappaBand::DegeneratePerfect => "degenerate-perfect",
        }
    }
}

impl fmt::Display for KappaBand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KappaResult {
    /// `None` when chance agreement is 1 and the statistic is undefined; the
    /// observed agreement `p_o` (then 1) is reported instead.
    pub kappa: Option<f64>,
    pub p_o: f64,
    pub p_e: f64,
    pub band: KappaBand,
}

impl KappaResult {
    pub fn is_degenerate(&self) -> bool {
        self.kappa.is_none()
    }

    /// `0.24`, or `po = 1` for the degenerate case.
    pub fn display_value(&self) -> String {
        match self.kappa {
            Some(k) => format!("{:.2}", round_to(k, 2) + 0.0),
            None => format!("po = {}", self.p_o),
        }
    }
}

pub fn kappa_band(result: &KappaResult) -> KappaBand {
    match result.kappa {
        Some(k) => KappaBand::from_kappa(k),
        None => KappaBand::DegeneratePerfect,
    }
}

/// Cohen's kappa for two binary labelings of the same items.
///
/// Counts stay integral until the final division:
/// `kappa = (n·agree − S) / (n² − S)` with `S = yes_a·yes_b + no_a·no_b`,
/// which equals `(p_o − p_e) / (1 − p_e)`.
pub fn cohen_kappa(labels_a: &[bool], labels_b: &[bool]) -> Result<KappaResult> {
    if labels_a.len() != labels_b.len() {
        return Err(HumanEvalError::LengthMismatch {
            left: labels_a.len(),
            right: labels_b.len(),
        });
    }
    if labels_a.is_empty() {
        return Err(HumanEvalError::EmptyInput);
    }
    let n = labels_a.len() as u128;
    let agree = labels_a
        .iter()
        .zip(labels_b)
        .filter(|(a, b)| a == b)
        .count() as u128;
    let yes_a = labels_a.iter().filter(|&&x| x).count() as u128;
    let yes_b = labels_b.iter().filter(|&&x| x).count() as u128;
    let chance = yes_a * yes_b + (n - yes_a) * (n - yes_b);
    let n2 = n * n;
    let p_o = agree as f64 / n as f64;
    let p_e = chance as f64 / n2 as f64;
    let kappa = (chance != n2).then(|| {
        let num = (n * agree) as f64 - chance as f64;
        num / (n2 - chance) as f64
    });
    let mut result = KappaResult {
        kappa,
        p_o,
        p_e,
        band: KappaBand::None,
    };
    result.band = kappa_band(&result);
    Ok(result)
}

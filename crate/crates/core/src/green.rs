//! Energy and emissions estimates for fine-tuning runs.
//!
//! Energy is a static estimate: the GPU is assumed to draw a fixed fraction
//! of its rated maximum power for the whole run. No power is measured.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::round_to;

/// Assumed fraction of maximum power drawn during training.
pub const DEFAULT_UTILIZATION: f64 = 0.8;

#[derive(Debug, Error, PartialEq)]
pub enum GreenError {
    #[error("invalid GPU profile: {0}")]
    InvalidProfile(String),
    #[error("runtime must be positive, got {0} h")]
    InvalidRuntime(f64),
    #[error("{name} must be non-negative, got {value}")]
    NegativeInput { name: &'static str, value: f64 },
    #[error("carbon intensity is required unless the region is declared carbon neutral")]
    MissingIntensity,
}

pub type Result<T, E = GreenError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GpuProfile {
    pub name: String,
    pub max_power_watts: f64,
    pub utilization: f64,
}

impl GpuProfile {
    pub fn new(name: &str, max_power_watts: f64, utilization: f64) -> Result<Self> {
        let profile = Self {
            name: name.to_string(),
            max_power_watts,
            utilization,
        };
        profile.validate()?;
        Ok(profile)
    }

    /// 40 GB A100 (SXM4), 400 W rated, at the default utilization.
    pub fn a100_sxm4_40gb() -> Self {
        Self {
            name: "NVIDIA A100-SXM4-40GB".into(),
            max_power_watts: 400.0,
            utilization: DEFAULT_UTILIZATION,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.max_power_watts.is_finite() && self.max_power_watts > 0.0) {
            return Err(GreenError::InvalidProfile(format!(
                "max power {} W must be positive",
                self.max_power_watts
            )));
        }
        if !(self.utilization > 0.0 && self.utilization <= 1.0) {
            return Err(GreenError::InvalidProfile(format!(
                "utilization {} must lie in (0, 1]",
                self.utilization
            )));
        }
        Ok(())
    }
}

/// `max_power_watts × utilization × runtime_hours / 1000`.
pub fn energy_kwh(profile: &GpuProfile, runtime_hours: f64) -> Result<f64> {
    profile.validate()?;
    if !(runtime_hours.is_finite() && runtime_hours > 0.0) {
        return Err(GreenError::InvalidRuntime(runtime_hours));
    }
    Ok(profile.max_power_watts * profile.utilization * runtime_hours / 1000.0)
}

/// kgCO2 for `kwh` at `intensity` kgCO2/kWh.
pub fn emissions_kg(kwh: f64, intensity: f64) -> Result<f64> {
    for (name, value) in [("energy", kwh), ("carbon intensity", intensity)] {
        if !(value >= 0.0 && value.is_finite()) {
            return Err(GreenError::NegativeInput { name, value });
        }
    }
    Ok(kwh * intensity)
}

/// Where the carbon intensity of a run comes from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "value")]
pub enum CarbonIntensity {
    /// User-supplied kgCO2 per kWh.
    Measured(f64),
    /// The user asserts the region is carbon neutral.
    CarbonNeutral,
}

impl CarbonIntensity {
    pub fn from_options(intensity: Option<f64>, carbon_neutral: bool) -> Result<Self> {
        match (intensity, carbon_neutral) {
            (Some(v), _) => Ok(CarbonIntensity::Measured(v)),
            (None, true) => Ok(CarbonIntensity::CarbonNeutral),
            (None, false) => Err(GreenError::MissingIntensity),
        }
    }

    pub fn kg_per_kwh(self) -> f64 {
        match self {
            CarbonIntensity::Measured(v) => v,
            CarbonIntensity::CarbonNeutral => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub system_id: String,
    pub runtime_hours: f64,
    pub region_carbon_intensity: CarbonIntensity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub run: RunRecord,
    pub gpu: GpuProfile,
    pub kwh: f64,
    pub kg_co2: f64,
    pub note: String,
}

impl EnergyReport {
    pub fn compute(run: RunRecord, gpu: GpuProfile) -> Result<Self> {
        let kwh = energy_kwh(&gpu, run.runtime_hours)?;
        let kg_co2 = emissions_kg(kwh, run.region_carbon_intensity.kg_per_kwh())?;
        let note = format!(
            "estimate assumes the GPU draws {:.0}% of its {} W maximum for the whole run; utilization is an assumption, not a measurement",
            gpu.utilization * 100.0,
            gpu.max_power_watts
        );
        Ok(Self {
            run,
            gpu,
            kwh,
            kg_co2,
            note,
        })
    }

    /// kWh rounded to one decimal for display.
    pub fn kwh_display(&self) -> f64 {
        round_to(self.kwh, 1)
    }
}

/// Table with the columns System, Runtime (Hours), kWh, kgCO2.
pub fn render_table(reports: &[EnergyReport]) -> String {
    let header = ["System", "Runtime (Hours)", "kWh", "kgCO2"];
    let rows: Vec<[String; 4]> = reports
        .iter()
        .map(|r| {
            [
                r.run.system_id.clone(),
                format!("{:.2}", r.run.runtime_hours),
                format!("{:.1}", r.kwh_display()),
                format!("{:.2}", r.kg_co2),
            ]
        })
        .collect();
    let mut widths = header.map(|h| h.chars().count());
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: [&str; 4]| -> String {
        let mut s = format!("{:<w$}", cells[0], w = widths[0]);
        for (cell, w) in cells[1..].iter().zip(&widths[1..]) {
            s.push_str(&format!("  {cell:>w$}", w = *w));
        }
        s.push('\n');
        s
    };
    let mut out = line(header);
    for row in &rows {
        out.push_str(&line([&row[0], &row[1], &row[2], &row[3]]));
    }
    for note in reports
        .iter()
        .map(|r| &r.note)
        .collect::<std::collections::BTreeSet<_>>()
    {
        out.push_str(&format!("note: {note}\n"));
    }
    out
}

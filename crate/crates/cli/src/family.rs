//! State families and test names accepted on the command line.

use std::fmt;
use std::str::FromStr;

use locc_core::bellspace::{figure1_state, isotropic_state, state_from_bell_matrix};
use locc_core::hypothesis::{TestKind, TwoOutcomeTest};
use locc_core::qcore::{re, DensityMatrix};
use nalgebra::Matrix4;
use serde::Serialize;

use crate::output::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    /// Weight `θ` on `φ0`, the rest spread evenly.
    Isotropic,
    /// Bell-diagonal; the off-`φ0` weight `1 - θ` is split in proportion `p : q : r`.
    BellDiagonal { p: f64, q: f64, r: f64 },
    /// Diagonal `(θ, (1-θ)/3, (1-θ)/3, (1-θ)/3)` with a common real coherence among
    /// `φ1, φ2, φ3`, projected onto the density matrices.
    Figure1,
}

impl Family {
    pub fn state(&self, theta: f64, offdiag: f64) -> CliResult<DensityMatrix> {
        if !(theta > 0.0 && theta <= 1.0) {
            return Err(CliError::Usage(format!("theta {theta} outside (0, 1]")));
        }
        match *self {
            Family::Isotropic => Ok(isotropic_state(theta)?),
            Family::Figure1 => Ok(figure1_state(theta, offdiag)?),
            Family::BellDiagonal { p, q, r } => {
                let s = p + q + r;
                let scale = if s > 0.0 { (1.0 - theta) / s } else { 0.0 };
                let mut x = Matrix4::zeros();
                let w = [theta, p * scale, q * scale, r * scale];
                if s <= 0.0 && theta < 1.0 {
                    return Err(CliError::Usage("bell_diagonal weights must not all vanish".into()));
                }
                for (i, wi) in w.iter().enumerate() {
                    x[(i, i)] = re(*wi);
                }
                Ok(state_from_bell_matrix(&x)?)
            }
        }
    }

    /// The fidelity a bare `bell_diagonal:p,q,r` stands for when no `θ` is given.
    pub fn default_theta(&self) -> Option<f64> {
        match *self {
            Family::BellDiagonal { p, q, r } if p + q + r <= 1.0 => Some(1.0 - p - q - r),
            _ => None,
        }
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        match s {
            "isotropic" => return Ok(Family::Isotropic),
            "figure1" => return Ok(Family::Figure1),
            _ => {}
        }
        let body = s
            .strip_prefix("bell_diagonal")
            .map(|b| b.trim_start_matches([':', '(']).trim_end_matches(')'))
            .ok_or_else(|| format!("unknown family '{s}' (expected isotropic, figure1 or bell_diagonal:p,q,r)"))?;
        let w: Vec<f64> = body
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|e| format!("bad weight '{t}': {e}")))
            .collect::<Result<_, _>>()?;
        match w[..] {
            [p, q, r] if w.iter().all(|x| *x >= 0.0 && x.is_finite()) => Ok(Family::BellDiagonal { p, q, r }),
            _ => Err(format!("bell_diagonal needs three nonnegative weights, got '{body}'")),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Isotropic => f.write_str("isotropic"),
            Family::Figure1 => f.write_str("figure1"),
            Family::BellDiagonal { p, q, r } => write!(f, "bell_diagonal:{p},{q},{r}"),
        }
    }
}

/// The two-pair tests compared in the β curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CurveTest {
    #[serde(rename = "TG")]
    Global,
    #[serde(rename = "TW")]
    IndependentPairs,
    #[serde(rename = "TU")]
    LocalCollective,
    #[serde(rename = "TV")]
    SamplewiseLocal,
    #[serde(rename = "Tu2")]
    LocalProduct,
}

impl CurveTest {
    /// Expected order of the type 2 errors near `θ = 1`, smallest first.
    pub const ORDER: [CurveTest; 5] = [
        CurveTest::Global,
        CurveTest::IndependentPairs,
        CurveTest::LocalCollective,
        CurveTest::SamplewiseLocal,
        CurveTest::LocalProduct,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CurveTest::Global => "TG",
            CurveTest::IndependentPairs => "TW",
            CurveTest::LocalCollective => "TU",
            CurveTest::SamplewiseLocal => "TV",
            CurveTest::LocalProduct => "Tu2",
        }
    }

    pub fn kind(self) -> TestKind {
        match self {
            CurveTest::Global => TestKind::GlobalProduct,
            CurveTest::IndependentPairs => TestKind::IndependentPairs,
            CurveTest::LocalCollective => TestKind::LocalCollective,
            CurveTest::SamplewiseLocal => TestKind::SamplewiseLocal,
            CurveTest::LocalProduct => TestKind::LocalProduct,
        }
    }

    pub fn build(self) -> CliResult<TwoOutcomeTest> {
        Ok(TwoOutcomeTest::build(self.kind(), 2, 2)?)
    }
}

impl FromStr for CurveTest {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CurveTest::ORDER
            .into_iter()
            .find(|t| t.name() == s.trim())
            .ok_or_else(|| format!("unknown test '{s}' (expected TG, Tu2, TU, TV or TW)"))
    }
}

impl fmt::Display for CurveTest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Inclusive `start:stop:step` grid, or a single value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThetaGrid {
    pub spec: String,
    pub values: Vec<f64>,
}

impl FromStr for ThetaGrid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<f64> = s
            .split(':')
            .map(|t| t.trim().parse::<f64>().map_err(|e| format!("bad grid entry '{t}': {e}")))
            .collect::<Result<_, _>>()?;
        let values = match parts[..] {
            [x] => vec![x],
            [start, stop, step] => {
                if step.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) || stop < start {
                    return Err(format!("grid '{s}' needs start <= stop and a positive step"));
                }
                let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
                if count > 100_000 {
                    return Err(format!("grid '{s}' has {count} points"));
                }
                (0..count).map(|k| ((start + k as f64 * step) * 1e12).round() / 1e12).collect()
            }
            _ => return Err(format!("grid '{s}' is neither a value nor start:stop:step")),
        };
        if values.iter().any(|&t| !(t > 0.0 && t <= 1.0)) {
            return Err(format!("grid '{s}' leaves (0, 1]"));
        }
        Ok(ThetaGrid {
            spec: s.to_string(),
            values,
        })
    }
}

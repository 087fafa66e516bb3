//! Left- and right-hand sides of the wave/particle correlation inequalities.
//!
//! The left-hand side is the squared modulus of the cross-site amplitude
//! correlation, written through the four measured quadrature correlators:
//!
//! ```text
//! LHS = (⟨X₁X₂⟩ + ⟨Y₁Y₂⟩)² + (⟨X₁Y₂⟩ − ⟨Y₁X₂⟩)²
//! ```
//!
//! Four right-hand sides are supported:
//!
//! | variant | bound                          |
//! |---------|--------------------------------|
//! | R1      | `⟨N₁N₂⟩`                       |
//! | R2      | `⟨N₁⟩⟨N₂⟩`                     |
//! | R3      | `⟨(C₁ₓ²+C₁ᵧ²)(C₂ₓ²+C₂ᵧ²)⟩`     |
//! | R4      | `⟨C₁ₓ²+C₁ᵧ²⟩⟨C₂ₓ²+C₂ᵧ²⟩`       |
//!
//! R1 and R2 rely on the local constraint `X² + Y² = N`; R3 and R4 use only
//! the two quadrature observables. R2 is not part of the default set.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::fock::{expectation, Operator, QuantumState, SingleModeObservables};

/// Margins above this count as a violation.
pub const VIOLATION_TOLERANCE: f64 = 1e-9;

/// Largest imaginary part tolerated on a Hermitian expectation value.
pub const REALITY_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    R1,
    R2,
    R3,
    R4,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::R1, Variant::R2, Variant::R3, Variant::R4];
    pub const DEFAULT: [Variant; 3] = [Variant::R1, Variant::R3, Variant::R4];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::R1 => "r1",
            Variant::R2 => "r2",
            Variant::R3 => "r3",
            Variant::R4 => "r4",
        }
    }

    /// Whether the bound was derived using `X² + Y² = N`.
    pub fn is_constrained(self) -> bool {
        matches!(self, Variant::R1 | Variant::R2)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "r1" => Ok(Variant::R1),
            "r2" => Ok(Variant::R2),
            "r3" => Ok(Variant::R3),
            "r4" => Ok(Variant::R4),
            other => Err(invalid(format!(
                "unknown inequality variant `{other}` (expected r1..r4)"
            ))),
        }
    }
}

/// Every expectation value entering the inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorSet {
    pub xx: f64,
    pub yy: f64,
    pub xy: f64,
    pub yx: f64,
    pub n1n2: f64,
    pub n1: f64,
    pub n2: f64,
    /// `⟨(C₁ₓ²+C₁ᵧ²)(C₂ₓ²+C₂ᵧ²)⟩`
    pub s1s2: f64,
    pub s1: f64,
    pub s2: f64,
    pub order_k: u32,
}

fn real_part(label: &str, z: Complex64) -> Result<f64> {
    if z.im.abs() > REALITY_TOLERANCE {
        return Err(Error::NumericalConsistency(format!(
            "expectation of {label} has imaginary part {:.3e}",
            z.im
        )));
    }
    Ok(z.re)
}

/// Quantum correlators for `Ĉ = âᵏ` on both modes of a two-mode state.
pub fn correlator_set(state: &QuantumState, k: u32) -> Result<CorrelatorSet> {
    let system = state.system();
    if !system.is_two_mode() {
        return Err(invalid(format!(
            "correlators need a two-mode state, got {} modes",
            system.num_modes()
        )));
    }
    let (d1, d2) = (system.dims()[0], system.dims()[1]);
    let m1 = SingleModeObservables::new(d1, k)?;
    let m2 = SingleModeObservables::new(d2, k)?;
    let q1 = SingleModeObservables::square_sum(d1, k)?;
    let q2 = SingleModeObservables::square_sum(d2, k)?;

    let pair = |label: &str, a, b| -> Result<f64> {
        let op = Operator::tensor(system, &[(0, a), (1, b)])?;
        real_part(label, expectation(state, &op)?)
    };
    let single = |label: &str, mode, a| -> Result<f64> {
        let op = Operator::local(system, mode, a)?;
        real_part(label, expectation(state, &op)?)
    };

    Ok(CorrelatorSet {
        xx: pair("X1 X2", &m1.x, &m2.x)?,
        yy: pair("Y1 Y2", &m1.y, &m2.y)?,
        xy: pair("X1 Y2", &m1.x, &m2.y)?,
        yx: pair("Y1 X2", &m1.y, &m2.x)?,
        n1n2: pair("N1 N2", &m1.n, &m2.n)?,
        n1: single("N1", 0, &m1.n)?,
        n2: single("N2", 1, &m2.n)?,
        s1s2: pair("S1 S2", &q1, &q2)?,
        s1: single("S1", 0, &q1)?,
        s2: single("S2", 1, &q2)?,
        order_k: k,
    })
}

pub fn wave_lhs(cs: &CorrelatorSet) -> f64 {
    (cs.xx + cs.yy).powi(2) + (cs.xy - cs.yx).powi(2)
}

pub fn rhs_value(cs: &CorrelatorSet, variant: Variant) -> f64 {
    match variant {
        Variant::R1 => cs.n1n2,
        Variant::R2 => cs.n1 * cs.n2,
        Variant::R3 => cs.s1s2,
        Variant::R4 => cs.s1 * cs.s2,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariantOutcome {
    pub variant: Variant,
    pub rhs: f64,
    /// `lhs − rhs`
    pub margin: f64,
    pub violated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub lhs: f64,
    pub outcomes: Vec<VariantOutcome>,
    pub order_k: u32,
    pub source_label: String,
}

impl InequalityReport {
    pub fn from_correlators(
        cs: &CorrelatorSet,
        variants: &[Variant],
        tolerance: f64,
        source_label: impl Into<String>,
    ) -> Self {
        let lhs = wave_lhs(cs);
        let outcomes = variants
            .iter()
            .map(|&variant| {
                let rhs = rhs_value(cs, variant);
                let margin = lhs - rhs;
                VariantOutcome {
                    variant,
                    rhs,
                    margin,
                    violated: margin > tolerance,
                }
            })
            .collect();
        Self {
            lhs,
            outcomes,
            order_k: cs.order_k,
            source_label: source_label.into(),
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.source_label = label.into();
        self
    }

    pub fn outcome(&self, variant: Variant) -> Option<&VariantOutcome> {
        self.outcomes.iter().find(|o| o.variant == variant)
    }

    pub fn rhs(&self, variant: Variant) -> Option<f64> {
        self.outcome(variant).map(|o| o.rhs)
    }

    pub fn margin(&self, variant: Variant) -> Option<f64> {
        self.outcome(variant).map(|o| o.margin)
    }

    /// `false` for variants not in the report.
    pub fn violated(&self, variant: Variant) -> bool {
        self.outcome(variant).is_some_and(|o| o.violated)
    }

    pub fn any_violated(&self) -> bool {
        self.outcomes.iter().any(|o| o.violated)
    }
}

/// Correlators and report for a quantum state at the default tolerance.
pub fn evaluate(state: &QuantumState, k: u32, variants: &[Variant]) -> Result<InequalityReport> {
    evaluate_with_tolerance(state, k, variants, VIOLATION_TOLERANCE)
}

pub fn evaluate_with_tolerance(
    state: &QuantumState,
    k: u32,
    variants: &[Variant],
    tolerance: f64,
) -> Result<InequalityReport> {
    let cs = correlator_set(state, k)?;
    Ok(InequalityReport::from_correlators(&cs, variants, tolerance, "quantum"))
}

/// `|wave_lhs − |⟨Ĉ₁Ĉ₂†⟩|²|`, an algebraic cross-check of the quadrature
/// form of the left-hand side.
pub fn lhs_identity_check(state: &QuantumState, k: u32) -> Result<f64> {
    let cs = correlator_set(state, k)?;
    let system = state.system();
    let c1 = SingleModeObservables::new(system.dims()[0], k)?.c;
    let c2 = SingleModeObservables::new(system.dims()[1], k)?.c;
    let op = Operator::tensor(system, &[(0, &c1), (1, &c2.adjoint())])?;
    let direct = expectation(state, &op)?.norm_sqr();
    Ok((wave_lhs(&cs) - direct).abs())
}

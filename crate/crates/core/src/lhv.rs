//! Local-hidden-variable ensembles.
//!
//! Each hidden-variable outcome assigns definite local values
//! `(X₁, Y₁, N₁, X₂, Y₂, N₂)`; correlators are weighted averages over the
//! ensemble. Under the local constraint `Xⱼ² + Yⱼ² = Nⱼ` the left-hand side
//! is bounded by both `⟨N₁N₂⟩` and `⟨N₁⟩⟨N₂⟩` (Cauchy–Schwarz). Without it,
//! assignments such as `X = Y = 1, N = 0` violate the bound freely.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::inequality::{rhs_value, wave_lhs, CorrelatorSet, InequalityReport, Variant, VIOLATION_TOLERANCE};

/// Default pass threshold of the ensemble-level constraint test.
pub const CONSTRAINT_TOLERANCE: f64 = 1e-9;

/// Support size of ensembles explored by [`adversarial_search`].
pub const MAX_SUPPORT_POINTS: usize = 4;

/// One hidden-variable outcome: local amplitudes and intensities at both sites.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LhvAssignment {
    pub x1: f64,
    pub y1: f64,
    pub n1: f64,
    pub x2: f64,
    pub y2: f64,
    pub n2: f64,
}

impl LhvAssignment {
    pub fn new(x1: f64, y1: f64, n1: f64, x2: f64, y2: f64, n2: f64) -> Self {
        Self { x1, y1, n1, x2, y2, n2 }
    }

    /// Assignment with `nⱼ = xⱼ² + yⱼ²`.
    pub fn constrained(x1: f64, y1: f64, x2: f64, y2: f64) -> Self {
        Self::new(x1, y1, x1 * x1 + y1 * y1, x2, y2, x2 * x2 + y2 * y2)
    }

    /// Signed `xⱼ² + yⱼ² − nⱼ` for both sites.
    pub fn residuals(&self) -> [f64; 2] {
        [
            self.x1 * self.x1 + self.y1 * self.y1 - self.n1,
            self.x2 * self.x2 + self.y2 * self.y2 - self.n2,
        ]
    }

    pub fn scaled(&self, s: f64) -> Self {
        let s2 = s * s;
        Self::new(
            s * self.x1,
            s * self.y1,
            s2 * self.n1,
            s * self.x2,
            s * self.y2,
            s2 * self.n2,
        )
    }

    fn is_valid(&self) -> bool {
        let all = [self.x1, self.y1, self.n1, self.x2, self.y2, self.n2];
        all.iter().all(|v| v.is_finite()) && self.n1 >= 0.0 && self.n2 >= 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedAssignment {
    pub weight: f64,
    pub assignment: LhvAssignment,
}

/// Normalized weighted collection of hidden-variable outcomes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LhvEnsemble {
    points: Vec<WeightedAssignment>,
}

impl LhvEnsemble {
    /// Builds an ensemble from positive (not necessarily normalized) weights.
    pub fn new(points: impl IntoIterator<Item = (f64, LhvAssignment)>) -> Result<Self> {
        let raw: Vec<(f64, LhvAssignment)> = points.into_iter().collect();
        if raw.is_empty() {
            return Err(invalid("ensemble needs at least one point"));
        }
        for (i, (w, a)) in raw.iter().enumerate() {
            if !w.is_finite() || *w <= 0.0 {
                return Err(invalid(format!("point {i} has non-positive weight {w}")));
            }
            if !a.is_valid() {
                return Err(invalid(format!(
                    "point {i} has a negative intensity or non-finite value"
                )));
            }
        }
        let total: f64 = raw.iter().map(|(w, _)| w).sum();
        Ok(Self {
            points: raw
                .into_iter()
                .map(|(w, assignment)| WeightedAssignment {
                    weight: w / total,
                    assignment,
                })
                .collect(),
        })
    }

    /// Equal-weight ensemble.
    pub fn uniform(assignments: impl IntoIterator<Item = LhvAssignment>) -> Result<Self> {
        Self::new(assignments.into_iter().map(|a| (1.0, a)))
    }

    pub fn points(&self) -> &[WeightedAssignment] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Amplitudes times `s`, intensities times `s²`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::new(self.points.iter().map(|p| (p.weight, p.assignment.scaled(s))))
    }

    pub fn report(&self, variants: &[Variant]) -> InequalityReport {
        InequalityReport::from_correlators(&ensemble_correlators(self), variants, VIOLATION_TOLERANCE, "lhv")
    }
}

/// The assignment `Xⱼ = Yⱼ = 1, Nⱼ = 0` at both sites.
pub fn cs_counter_model() -> LhvEnsemble {
    LhvEnsemble::uniform([LhvAssignment::new(1.0, 1.0, 0.0, 1.0, 1.0, 0.0)]).expect("counter-model point is valid")
}

/// Largest `|xⱼ² + yⱼ² − nⱼ|` over points and sites.
pub fn constraint_residual(ensemble: &LhvEnsemble) -> f64 {
    ensemble
        .points
        .iter()
        .flat_map(|p| p.assignment.residuals())
        .map(f64::abs)
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstraintTest {
    /// Ensemble mean of `xⱼ² + yⱼ² − nⱼ` for each site.
    pub mean_residual: [f64; 2],
    pub max_residual: f64,
    pub pass: bool,
}

pub fn ensemble_level_constraint_test(ensemble: &LhvEnsemble) -> ConstraintTest {
    ensemble_level_constraint_test_with_tolerance(ensemble, CONSTRAINT_TOLERANCE)
}

pub fn ensemble_level_constraint_test_with_tolerance(ensemble: &LhvEnsemble, tolerance: f64) -> ConstraintTest {
    let mut mean_residual = [0.0; 2];
    for p in &ensemble.points {
        let r = p.assignment.residuals();
        mean_residual[0] += p.weight * r[0];
        mean_residual[1] += p.weight * r[1];
    }
    let max_residual = constraint_residual(ensemble);
    ConstraintTest {
        mean_residual,
        max_residual,
        pass: max_residual < tolerance,
    }
}

/// Weighted averages of every product entering the inequalities; the
/// `s` fields use the classical reading `sⱼ = xⱼ² + yⱼ²`.
pub fn ensemble_correlators(ensemble: &LhvEnsemble) -> CorrelatorSet {
    let mut cs = CorrelatorSet {
        xx: 0.0,
        yy: 0.0,
        xy: 0.0,
        yx: 0.0,
        n1n2: 0.0,
        n1: 0.0,
        n2: 0.0,
        s1s2: 0.0,
        s1: 0.0,
        s2: 0.0,
        order_k: 1,
    };
    for p in &ensemble.points {
        let w = p.weight;
        let a = &p.assignment;
        let s1 = a.x1 * a.x1 + a.y1 * a.y1;
        let s2 = a.x2 * a.x2 + a.y2 * a.y2;
        cs.xx += w * a.x1 * a.x2;
        cs.yy += w * a.y1 * a.y2;
        cs.xy += w * a.x1 * a.y2;
        cs.yx += w * a.y1 * a.x2;
        cs.n1n2 += w * a.n1 * a.n2;
        cs.n1 += w * a.n1;
        cs.n2 += w * a.n2;
        cs.s1s2 += w * s1 * s2;
        cs.s1 += w * s1;
        cs.s2 += w * s2;
    }
    cs
}

/// Equal-weight constrained ensemble with amplitude components drawn
/// uniformly from `[−scale, scale]`.
pub fn sample_constrained(count: usize, seed: u64, amplitude_scale: f64) -> Result<LhvEnsemble> {
    if count == 0 {
        return Err(invalid("sample count must be at least 1"));
    }
    if !amplitude_scale.is_finite() || amplitude_scale <= 0.0 {
        return Err(invalid(format!(
            "amplitude scale must be positive and finite, got {amplitude_scale}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = amplitude_scale;
    let points: Vec<LhvAssignment> = (0..count)
        .map(|_| {
            let x1 = rng.random_range(-a..=a);
            let y1 = rng.random_range(-a..=a);
            let x2 = rng.random_range(-a..=a);
            let y2 = rng.random_range(-a..=a);
            LhvAssignment::constrained(x1, y1, x2, y2)
        })
        .collect();
    LhvEnsemble::uniform(points)
}

/// Box for the adversarial search: `|x|, |y| ≤ amplitude`,
/// `n ∈ [0, intensity_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchBounds {
    pub amplitude: f64,
    pub intensity_max: f64,
}

impl Default for SearchBounds {
    fn default() -> Self {
        Self {
            amplitude: 1.0,
            intensity_max: 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Force `nⱼ = xⱼ² + yⱼ²`; the intensity bound is then unused.
    pub constrained: bool,
    pub variant: Variant,
    /// Maximum number of objective evaluations.
    pub budget: u64,
    pub bounds: SearchBounds,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub best_ensemble: LhvEnsemble,
    /// `lhs − rhs` of the best ensemble.
    pub best_score: f64,
    pub evaluations_used: u64,
    pub seed: u64,
}

// per point: weight logit, x1, y1, x2, y2, n1, n2
const PARAMS_PER_POINT: usize = 7;
const LOGIT_RANGE: f64 = 8.0;
const STALL_LIMIT: u32 = 400;
const MIN_STEP: f64 = 1e-7;
const INITIAL_STEP: f64 = 0.3;

struct SearchSpace {
    constrained: bool,
    variant: Variant,
    bounds: SearchBounds,
}

impl SearchSpace {
    fn dim(&self) -> usize {
        PARAMS_PER_POINT * MAX_SUPPORT_POINTS
    }

    /// Natural length of each coordinate, used to scale steps and clipping.
    fn range(&self, i: usize) -> (f64, f64) {
        match i % PARAMS_PER_POINT {
            0 => (-LOGIT_RANGE, LOGIT_RANGE),
            1..=4 => (-self.bounds.amplitude, self.bounds.amplitude),
            _ => (0.0, self.bounds.intensity_max),
        }
    }

    fn random_point(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        (0..self.dim())
            .map(|i| match i % PARAMS_PER_POINT {
                0 => rng.sample::<f64, _>(StandardNormal),
                _ => {
                    let (lo, hi) = self.range(i);
                    rng.random_range(lo..=hi)
                }
            })
            .collect()
    }

    fn perturb(&self, params: &[f64], step: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
        params
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let (lo, hi) = self.range(i);
                let z: f64 = rng.sample(StandardNormal);
                (v + step * (hi - lo) * z).clamp(lo, hi)
            })
            .collect()
    }

    fn decode(&self, params: &[f64]) -> LhvEnsemble {
        let chunks: Vec<&[f64]> = params.chunks(PARAMS_PER_POINT).collect();
        let max_logit = chunks.iter().map(|c| c[0]).fold(f64::NEG_INFINITY, f64::max);
        let points = chunks.iter().map(|c| {
            let weight = (c[0] - max_logit).exp();
            let assignment = if self.constrained {
                LhvAssignment::constrained(c[1], c[2], c[3], c[4])
            } else {
                LhvAssignment::new(c[1], c[2], c[5], c[3], c[4], c[6])
            };
            (weight, assignment)
        });
        LhvEnsemble::new(points).expect("decoded parameters lie in the search box")
    }

    fn score(&self, params: &[f64]) -> f64 {
        let cs = ensemble_correlators(&self.decode(params));
        wave_lhs(&cs) - rhs_value(&cs, self.variant)
    }
}

/// Multi-start stochastic hill climbing over ensembles of
/// [`MAX_SUPPORT_POINTS`] points, maximizing `lhs − rhs(variant)`.
///
/// Each start perturbs all coordinates with Gaussian steps and adapts the
/// step length by the one-fifth success rule; a start ends when the step
/// collapses or the score stalls. Fully determined by `config.seed`.
pub fn adversarial_search(config: &SearchConfig) -> Result<SearchOutcome> {
    let SearchBounds {
        amplitude,
        intensity_max,
    } = config.bounds;
    if config.budget == 0 {
        return Err(invalid("search budget must be at least 1 evaluation"));
    }
    if !amplitude.is_finite() || amplitude <= 0.0 {
        return Err(invalid(format!(
            "amplitude bound must be positive and finite, got {amplitude}"
        )));
    }
    if !intensity_max.is_finite() || intensity_max < 0.0 {
        return Err(invalid(format!(
            "intensity bound must be nonnegative and finite, got {intensity_max}"
        )));
    }
    let space = SearchSpace {
        constrained: config.constrained,
        variant: config.variant,
        bounds: config.bounds,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut used = 0u64;
    let mut best: Option<(f64, Vec<f64>)> = None;

    let grow = (1.0f64 / 3.0).exp();
    let shrink = (-1.0f64 / 12.0).exp();

    while used < config.budget {
        let mut current = space.random_point(&mut rng);
        let mut current_score = space.score(&current);
        used += 1;
        let mut step = INITIAL_STEP;
        let mut stall = 0u32;

        while used < config.budget && step > MIN_STEP && stall < STALL_LIMIT {
            let candidate = space.perturb(&current, step, &mut rng);
            let s = space.score(&candidate);
            used += 1;
            if s >= current_score {
                stall = if s > current_score { 0 } else { stall + 1 };
                current = candidate;
                current_score = s;
                step *= grow;
            } else {
                stall += 1;
                step *= shrink;
            }
            step = step.min(1.0);
        }

        if best.as_ref().is_none_or(|(b, _)| current_score > *b) {
            best = Some((current_score, current));
        }
    }

    let (best_score, params) = best.expect("budget of at least one evaluation");
    Ok(SearchOutcome {
        best_ensemble: space.decode(&params),
        best_score,
        evaluations_used: used,
        seed: config.seed,
    })
}

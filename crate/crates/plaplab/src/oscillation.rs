//! Sampled-ball oscillation estimators: log-BMO seminorms, Muckenhoupt
//! brackets, the weighted-BMO comparison quantities, and the per-ball
//! comparison inequalities between them.
//!
//! Every sup here is a lower bound computed over an explicit, seeded ball
//! list; reports carry that provenance. Acceptance-style checks compare
//! per-ball values against closed-form oracles, never against the abstract
//! sup over all balls.

use std::sync::Arc;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::ball::{Ball, BallQuadrature, Point, QuadratureSpec, Region2};
use crate::domain::PolygonalDomain;
use crate::error::{Error, Result};
use crate::spd::{matrix_log, SymMatrix};
use crate::weight::MatrixWeightField;

/// Region the sampler draws ball centers from.
#[derive(Debug, Clone)]
pub enum SamplerRegion {
    Box { lo: Point, hi: Point },
    Polygon(Arc<PolygonalDomain>),
}

impl SamplerRegion {
    fn bbox(&self) -> (Point, Point) {
        match self {
            SamplerRegion::Box { lo, hi } => (*lo, *hi),
            SamplerRegion::Polygon(d) => d.bbox(),
        }
    }

    fn contains(&self, p: Point) -> bool {
        match self {
            SamplerRegion::Box { lo, hi } => {
                p[0] >= lo[0] && p[0] <= hi[0] && p[1] >= lo[1] && p[1] <= hi[1]
            }
            SamplerRegion::Polygon(d) => d.contains(p),
        }
    }

    /// Clip predicate for ball quadrature when means are restricted to Ω.
    pub fn clip(&self) -> Option<&dyn Region2> {
        match self {
            SamplerRegion::Box { .. } => None,
            SamplerRegion::Polygon(d) => Some(d.as_ref()),
        }
    }
}

/// Deterministic ball generator: a center grid over the region plus seeded
/// uniform centers, crossed with dyadic radii R, R/2, ..., R/2^levels.
#[derive(Debug, Clone)]
pub struct BallSampler {
    pub region: SamplerRegion,
    pub max_radius: f64,
    pub levels: usize,
    pub grid: usize,
    pub n_random: usize,
    pub seed: u64,
}

impl BallSampler {
    pub fn new(region: SamplerRegion, max_radius: f64, seed: u64) -> Self {
        BallSampler { region, max_radius, levels: 6, grid: 17, n_random: 256, seed }
    }

    pub fn radii(&self) -> Vec<f64> {
        (0..=self.levels).map(|k| self.max_radius / (1u64 << k) as f64).collect()
    }

    pub fn centers(&self) -> Vec<Point> {
        let (lo, hi) = self.region.bbox();
        let mut centers = Vec::new();
        if self.grid >= 2 {
            for i in 0..self.grid {
                for j in 0..self.grid {
                    let p = [
                        lo[0] + (hi[0] - lo[0]) * i as f64 / (self.grid - 1) as f64,
                        lo[1] + (hi[1] - lo[1]) * j as f64 / (self.grid - 1) as f64,
                    ];
                    if self.region.contains(p) {
                        centers.push(p);
                    }
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut found = 0usize;
        let mut guard = 0usize;
        while found < self.n_random && guard < 100_000 * self.n_random.max(1) {
            let p = [rng.gen_range(lo[0]..hi[0]), rng.gen_range(lo[1]..hi[1])];
            if self.region.contains(p) {
                centers.push(p);
                found += 1;
            }
            guard += 1;
        }
        centers
    }

    pub fn balls(&self) -> Vec<Ball> {
        let radii = self.radii();
        let mut balls = Vec::new();
        for c in self.centers() {
            for &r in &radii {
                balls.push(Ball { center: c, radius: r });
            }
        }
        balls
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BallValue {
    pub center: Point,
    pub radius: f64,
    pub value: f64,
}

/// Per-ball values of one oscillation quantity with the running maximum
/// (the sampled sup, a lower bound for the true sup) and provenance.
#[derive(Debug, Clone, Serialize)]
pub struct OscillationReport {
    pub quantity: String,
    pub sup_estimate: f64,
    pub ball_count: usize,
    pub seed: u64,
    pub clipped: bool,
    pub values: Vec<BallValue>,
}

impl OscillationReport {
    fn from_values(quantity: &str, values: Vec<BallValue>, seed: u64, clipped: bool) -> Self {
        let sup_estimate = values.iter().map(|v| v.value).fold(0.0, f64::max);
        OscillationReport {
            quantity: quantity.to_string(),
            sup_estimate,
            ball_count: values.len(),
            seed,
            clipped,
            values,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }

    /// One-line CSV summary: quantity, sup estimate, ball count, seed.
    pub fn csv_summary(&self) -> String {
        format!("{},{},{},{}\n", self.quantity, self.sup_estimate, self.ball_count, self.seed)
    }

    pub fn per_ball_csv(&self) -> String {
        let mut out = String::from("center_x,center_y,radius,value\n");
        for v in &self.values {
            out.push_str(&format!("{},{},{},{}\n", v.center[0], v.center[1], v.radius, v.value));
        }
        out
    }
}

fn map_balls<F>(balls: &[Ball], f: F) -> Result<Vec<BallValue>>
where
    F: Fn(&Ball) -> Result<f64> + Sync,
{
    balls
        .par_iter()
        .map(|b| Ok(BallValue { center: b.center, radius: b.radius, value: f(b)? }))
        .collect()
}

// ---------------------------------------------------------------------------
// log-BMO seminorm

/// ⨍_B |log M − ⟨log M⟩_B| per ball (spectral norm), sup over the sampler's
/// balls. The estimate is a lower bound for the true seminorm.
pub fn bmo_seminorm_matrix(
    field: &MatrixWeightField,
    sampler: &BallSampler,
    spec: &QuadratureSpec,
) -> Result<OscillationReport> {
    let balls = sampler.balls();
    if balls.is_empty() {
        return Err(Error::InvalidInput("empty ball sampler".into()));
    }
    let clip = sampler.region.clip();
    let values = map_balls(&balls, |b| bmo_matrix_on_ball(field, b, spec, clip))?;
    Ok(OscillationReport::from_values("log_bmo_matrix", values, sampler.seed, clip.is_some()))
}

/// Per-ball matrix log-oscillation ⨍_B |log M − ⟨log M⟩_B|.
pub fn bmo_matrix_on_ball(
    field: &MatrixWeightField,
    ball: &Ball,
    spec: &QuadratureSpec,
    clip: Option<&dyn Region2>,
) -> Result<f64> {
    let quad = BallQuadrature::build(ball, spec, clip, field.singular_anchors())?;
    let logs: Vec<SymMatrix> = quad
        .nodes
        .iter()
        .map(|&p| Ok(matrix_log(&field.evaluate(p)?)))
        .collect::<Result<_>>()?;
    let mut mean = SymMatrix::zeros(field.dim);
    for (l, w) in logs.iter().zip(&quad.weights) {
        mean = mean.add(&l.scale(*w));
    }
    mean = mean.scale(1.0 / quad.total_weight);
    let mut osc = 0.0;
    for (l, w) in logs.iter().zip(&quad.weights) {
        osc += w * l.sub(&mean).spectral_norm();
    }
    Ok(osc / quad.total_weight)
}

/// Scalar version: ⨍_B |log w − ⟨log w⟩_B| per ball.
pub fn bmo_seminorm_scalar<W>(
    weight: W,
    singular_anchors: &[Point],
    sampler: &BallSampler,
    spec: &QuadratureSpec,
) -> Result<OscillationReport>
where
    W: Fn(Point) -> Result<f64> + Sync,
{
    let balls = sampler.balls();
    if balls.is_empty() {
        return Err(Error::InvalidInput("empty ball sampler".into()));
    }
    let clip = sampler.region.clip();
    let values =
        map_balls(&balls, |b| bmo_scalar_on_ball(&weight, singular_anchors, b, spec, clip))?;
    Ok(OscillationReport::from_values("log_bmo_scalar", values, sampler.seed, clip.is_some()))
}

pub fn bmo_scalar_on_ball<W>(
    weight: &W,
    singular_anchors: &[Point],
    ball: &Ball,
    spec: &QuadratureSpec,
    clip: Option<&dyn Region2>,
) -> Result<f64>
where
    W: Fn(Point) -> Result<f64>,
{
    let quad = BallQuadrature::build(ball, spec, clip, singular_anchors)?;
    let logs: Vec<f64> = quad
        .nodes
        .iter()
        .map(|&p| {
            let v = weight(p)?;
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::NotPositiveDefinite(format!("weight {v} in log-BMO")));
            }
            Ok(v.ln())
        })
        .collect::<Result<_>>()?;
    let mean: f64 =
        logs.iter().zip(&quad.weights).map(|(l, w)| l * w).sum::<f64>() / quad.total_weight;
    let osc: f64 =
        logs.iter().zip(&quad.weights).map(|(l, w)| (l - mean).abs() * w).sum::<f64>()
            / quad.total_weight;
    Ok(osc)
}

// ---------------------------------------------------------------------------
// Muckenhoupt bracket

/// Per-ball (⨍ w^p)^{1/p} (⨍ w^{-p'})^{1/p'}, the A_p bracket of w^p, and
/// its sampled sup. `p` must be at least 1 + 1e-6.
pub fn muckenhoupt_constant<W>(
    weight: W,
    singular_anchors: &[Point],
    p: f64,
    sampler: &BallSampler,
    spec: &QuadratureSpec,
) -> Result<OscillationReport>
where
    W: Fn(Point) -> Result<f64> + Sync,
{
    if !(p >= 1.0 + 1e-6) || !p.is_finite() {
        return Err(Error::Config(format!("Muckenhoupt exponent p={p} must be >= 1 + 1e-6")));
    }
    let balls = sampler.balls();
    if balls.is_empty() {
        return Err(Error::InvalidInput("empty ball sampler".into()));
    }
    let clip = sampler.region.clip();
    let values =
        map_balls(&balls, |b| muckenhoupt_on_ball(&weight, singular_anchors, p, b, spec, clip))?;
    Ok(OscillationReport::from_values("muckenhoupt_bracket", values, sampler.seed, clip.is_some()))
}

pub fn muckenhoupt_on_ball<W>(
    weight: &W,
    singular_anchors: &[Point],
    p: f64,
    ball: &Ball,
    spec: &QuadratureSpec,
    clip: Option<&dyn Region2>,
) -> Result<f64>
where
    W: Fn(Point) -> Result<f64>,
{
    let pc = p / (p - 1.0);
    let quad = BallQuadrature::build(ball, spec, clip, singular_anchors)?;
    let mut mp = 0.0;
    let mut mq = 0.0;
    for (&x, w) in quad.nodes.iter().zip(&quad.weights) {
        let v = weight(x)?;
        mp += w * v.powf(p);
        mq += w * v.powf(-pc);
    }
    mp /= quad.total_weight;
    mq /= quad.total_weight;
    let bracket = mp.powf(1.0 / p) * mq.powf(1.0 / pc);
    if !bracket.is_finite() {
        return Err(Error::Overflow(format!(
            "Muckenhoupt bracket overflowed on ball at ({}, {}), r={}",
            ball.center[0], ball.center[1], ball.radius
        )));
    }
    Ok(bracket)
}

// ---------------------------------------------------------------------------
// comparison quantities |A|_{BMO^2_mu} and |A|_{BMO_mu}

/// Per-ball pair for a diffusion field A with μ = |A|:
/// `bmo2` = (1/μ(B) ∫ |A − ⟨A⟩|² μ⁻¹)^{1/2} and `bmo1` = (1/μ(B)) ∫ |A − ⟨A⟩|.
pub fn cmp_quantities(
    a_field: &MatrixWeightField,
    sampler: &BallSampler,
    spec: &QuadratureSpec,
) -> Result<(OscillationReport, OscillationReport)> {
    let balls = sampler.balls();
    if balls.is_empty() {
        return Err(Error::InvalidInput("empty ball sampler".into()));
    }
    let clip = sampler.region.clip();
    let pairs: Vec<(BallValue, BallValue)> = balls
        .par_iter()
        .map(|b| {
            let (v2, v1) = cmp_on_ball(a_field, b, spec, clip)?;
            Ok((
                BallValue { center: b.center, radius: b.radius, value: v2 },
                BallValue { center: b.center, radius: b.radius, value: v1 },
            ))
        })
        .collect::<Result<_>>()?;
    let (v2, v1): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
    Ok((
        OscillationReport::from_values("bmo2_mu", v2, sampler.seed, clip.is_some()),
        OscillationReport::from_values("bmo1_mu", v1, sampler.seed, clip.is_some()),
    ))
}

/// Returns (bmo2, bmo1) on one ball.
pub fn cmp_on_ball(
    a_field: &MatrixWeightField,
    ball: &Ball,
    spec: &QuadratureSpec,
    clip: Option<&dyn Region2>,
) -> Result<(f64, f64)> {
    let quad = BallQuadrature::build(ball, spec, clip, a_field.singular_anchors())?;
    let mats: Vec<SymMatrix> = quad
        .nodes
        .iter()
        .map(|&p| Ok(a_field.evaluate(p)?.as_sym().clone()))
        .collect::<Result<_>>()?;
    let mut mean = SymMatrix::zeros(a_field.dim);
    for (m, w) in mats.iter().zip(&quad.weights) {
        mean = mean.add(&m.scale(*w));
    }
    mean = mean.scale(1.0 / quad.total_weight);
    let mut mean_mu = 0.0;
    let mut v2 = 0.0;
    let mut v1 = 0.0;
    for (m, w) in mats.iter().zip(&quad.weights) {
        let mu = m.spectral_norm();
        let dev = m.sub(&mean).spectral_norm();
        mean_mu += w * mu;
        v2 += w * dev * dev / mu;
        v1 += w * dev;
    }
    mean_mu /= quad.total_weight;
    v2 /= quad.total_weight;
    v1 /= quad.total_weight;
    Ok(((v2 / mean_mu).sqrt(), v1 / mean_mu))
}

// ---------------------------------------------------------------------------
// per-ball comparison lemmas

/// Both sides of the per-ball inequality
/// ⨍|log A − ⟨log A⟩| ≤ 4 ⟨|A|⟩ ⟨|A⁻¹|⟩ · bmo2(B), with margin.
#[derive(Debug, Clone, Serialize)]
pub struct LogWeakestVerdict {
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub ok: bool,
}

pub fn check_log_weakest(
    a_field: &MatrixWeightField,
    ball: &Ball,
    spec: &QuadratureSpec,
    clip: Option<&dyn Region2>,
) -> Result<LogWeakestVerdict> {
    let quad = BallQuadrature::build(ball, spec, clip, a_field.singular_anchors())?;
    let mats: Vec<SymMatrix> = quad
        .nodes
        .iter()
        .map(|&p| Ok(a_field.evaluate(p)?.as_sym().clone()))
        .collect::<Result<_>>()?;
    let logs: Vec<SymMatrix> = quad
        .nodes
        .iter()
        .map(|&p| Ok(matrix_log(&a_field.evaluate(p)?)))
        .collect::<Result<_>>()?;

    let wsum = quad.total_weight;
    let mut mean_a = SymMatrix::zeros(a_field.dim);
    let mut mean_log = SymMatrix::zeros(a_field.dim);
    let mut mean_mu = 0.0;
    let mut mean_inv = 0.0;
    for ((m, l), w) in mats.iter().zip(&logs).zip(&quad.weights) {
        mean_a = mean_a.add(&m.scale(*w));
        mean_log = mean_log.add(&l.scale(*w));
        mean_mu += w * m.spectral_norm();
        mean_inv += w * m.map_eigenvalues(|t| 1.0 / t).spectral_norm();
    }
    mean_a = mean_a.scale(1.0 / wsum);
    mean_log = mean_log.scale(1.0 / wsum);
    mean_mu /= wsum;
    mean_inv /= wsum;

    let mut lhs = 0.0;
    let mut v2 = 0.0;
    for ((m, l), w) in mats.iter().zip(&logs).zip(&quad.weights) {
        lhs += w * l.sub(&mean_log).spectral_norm();
        let dev = m.sub(&mean_a).spectral_norm();
        v2 += w * dev * dev / m.spectral_norm();
    }
    lhs /= wsum;
    v2 /= wsum;
    let bmo2 = (v2 / mean_mu).sqrt();
    let rhs = 4.0 * mean_mu * mean_inv * bmo2;
    let ok = lhs <= rhs + 1e-8 * (1.0 + rhs);
    Ok(LogWeakestVerdict { lhs, rhs, margin: rhs - lhs, ok })
}

/// Ratio bmo2(B) / ⨍|log A − ⟨log A⟩|(B). The lemma's constant is
/// existential, so callers assert only finiteness and family stability;
/// constant fields report `ratio = None`.
#[derive(Debug, Clone, Serialize)]
pub struct LinearControlRecord {
    pub log_bmo: f64,
    pub bmo2: f64,
    pub ratio: Option<f64>,
    pub within_threshold: bool,
}

pub fn check_linear_control(
    a_field: &MatrixWeightField,
    ball: &Ball,
    spec: &QuadratureSpec,
    clip: Option<&dyn Region2>,
    delta_threshold: f64,
) -> Result<LinearControlRecord> {
    let log_bmo = bmo_matrix_on_ball(a_field, ball, spec, clip)?;
    let (bmo2, _) = cmp_on_ball(a_field, ball, spec, clip)?;
    let ratio = if log_bmo <= 1e-14 { None } else { Some(bmo2 / log_bmo) };
    Ok(LinearControlRecord { log_bmo, bmo2, ratio, within_threshold: log_bmo <= delta_threshold })
}

// ---------------------------------------------------------------------------
// vanishing check

/// True iff the sampled log-BMO sup of `field` over balls of radius at most
/// `r_max` is ≤ δ. Necessary-condition check: the true sup over all balls
/// may exceed the sampled sup.
pub fn vanishing_check(
    field: &MatrixWeightField,
    delta: f64,
    r_max: f64,
    sampler: &BallSampler,
    spec: &QuadratureSpec,
) -> Result<(bool, OscillationReport)> {
    if (sampler.max_radius - r_max).abs() > 1e-12 * r_max.max(1.0) {
        return Err(Error::Config(format!(
            "sampler max radius {} must equal the vanishing scale {r_max}",
            sampler.max_radius
        )));
    }
    let report = bmo_seminorm_matrix(field, sampler, spec)?;
    // 1e-14 slack absorbs mean-subtraction rounding for exactly-constant fields
    Ok((report.sup_estimate <= delta + 1e-14 * (1.0 + delta.abs()), report))
}

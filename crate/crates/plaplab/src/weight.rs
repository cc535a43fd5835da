//! Matrix-valued weight fields x ↦ M(x): built-in families, scalar weight
//! extraction, condition-number checks, and logarithmic means over balls.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::ball::{BallQuadrature, Point};
use crate::error::{Error, Result};
use crate::spd::{matrix_exp, matrix_log, SpdMatrix, SymMatrix};

type CustomFn = dyn Fn(Point) -> Result<SpdMatrix> + Send + Sync;

/// Built-in weight families plus user-supplied variants.
#[derive(Clone)]
pub enum WeightFamily {
    /// M(x) = M0.
    Constant(SpdMatrix),
    /// M(x) = |x - anchor|^exponent * Id; singular (or degenerate) at the anchor.
    Power { exponent: f64, anchor: Point },
    /// M(x) = R(angle) diag(s, ratio*s) R(angle)^T with s = |x - anchor|^exponent.
    RotatedAnisotropic { exponent: f64, ratio: f64, angle: f64, anchor: Point },
    /// Bilinear interpolation of 2x2 entries sampled on a rectangular lattice.
    Grid(Arc<GridWeight>),
    /// Arbitrary deterministic evaluator.
    Custom(Arc<CustomFn>),
}

impl std::fmt::Debug for WeightFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            WeightFamily::Constant(_) => write!(f, "Constant"),
            WeightFamily::Power { exponent, .. } => write!(f, "Power({exponent})"),
            WeightFamily::RotatedAnisotropic { exponent, ratio, .. } => {
                write!(f, "RotatedAnisotropic({exponent}, ratio {ratio})")
            }
            WeightFamily::Grid(_) => write!(f, "Grid"),
            WeightFamily::Custom(_) => write!(f, "Custom"),
        }
    }
}

/// A matrix weight field with its declared uniform condition bound Λ and
/// the anchors where evaluation is singular. Evaluation is deterministic.
#[derive(Debug, Clone)]
pub struct MatrixWeightField {
    pub dim: usize,
    family: WeightFamily,
    pub lambda_bound: f64,
    singular_anchors: Vec<Point>,
}

impl MatrixWeightField {
    pub fn constant(m: SpdMatrix) -> Self {
        let lambda = m.condition();
        MatrixWeightField {
            dim: m.dim(),
            family: WeightFamily::Constant(m),
            lambda_bound: lambda,
            singular_anchors: Vec::new(),
        }
    }

    pub fn identity() -> Self {
        Self::constant(SpdMatrix::identity(2))
    }

    /// |x-anchor|^eps * Id. A scalar multiple of the identity, so Λ = 1.
    pub fn power(exponent: f64, anchor: Point) -> Self {
        MatrixWeightField {
            dim: 2,
            family: WeightFamily::Power { exponent, anchor },
            lambda_bound: 1.0,
            singular_anchors: if exponent == 0.0 { Vec::new() } else { vec![anchor] },
        }
    }

    pub fn rotated_anisotropic(exponent: f64, ratio: f64, angle: f64, anchor: Point) -> Result<Self> {
        if !(ratio > 0.0) {
            return Err(Error::Config(format!("anisotropy ratio {ratio} must be positive")));
        }
        Ok(MatrixWeightField {
            dim: 2,
            family: WeightFamily::RotatedAnisotropic { exponent, ratio, angle, anchor },
            lambda_bound: ratio.max(1.0 / ratio),
            singular_anchors: if exponent == 0.0 { Vec::new() } else { vec![anchor] },
        })
    }

    pub fn custom(
        lambda_bound: f64,
        singular_anchors: Vec<Point>,
        f: impl Fn(Point) -> Result<SpdMatrix> + Send + Sync + 'static,
    ) -> Self {
        MatrixWeightField {
            dim: 2,
            family: WeightFamily::Custom(Arc::new(f)),
            lambda_bound,
            singular_anchors,
        }
    }

    pub fn from_grid(grid: GridWeight, lambda_bound: Option<f64>) -> Self {
        let lambda = lambda_bound.unwrap_or_else(|| grid.max_sampled_condition());
        MatrixWeightField {
            dim: 2,
            family: WeightFamily::Grid(Arc::new(grid)),
            lambda_bound: lambda,
            singular_anchors: Vec::new(),
        }
    }

    pub fn singular_anchors(&self) -> &[Point] {
        &self.singular_anchors
    }

    /// M(x).
    pub fn evaluate(&self, x: Point) -> Result<SpdMatrix> {
        match &self.family {
            WeightFamily::Constant(m) => Ok(m.clone()),
            WeightFamily::Power { exponent, anchor } => {
                let s = dist(x, *anchor).powf(*exponent);
                if !(s > 0.0) || !s.is_finite() {
                    return Err(Error::NotPositiveDefinite(format!(
                        "power weight degenerate at ({}, {})",
                        x[0], x[1]
                    )));
                }
                SpdMatrix::identity(2).scale(s)
            }
            WeightFamily::RotatedAnisotropic { exponent, ratio, angle, anchor } => {
                let s = dist(x, *anchor).powf(*exponent);
                if !(s > 0.0) || !s.is_finite() {
                    return Err(Error::NotPositiveDefinite(format!(
                        "anisotropic weight degenerate at ({}, {})",
                        x[0], x[1]
                    )));
                }
                let (c, sn) = (angle.cos(), angle.sin());
                let (d1, d2) = (s, ratio * s);
                // R diag(d1,d2) R^T
                let m11 = c * c * d1 + sn * sn * d2;
                let m22 = sn * sn * d1 + c * c * d2;
                let m12 = c * sn * (d1 - d2);
                SpdMatrix::new(2, &[m11, m12, m12, m22])
            }
            WeightFamily::Grid(g) => g.evaluate(x),
            WeightFamily::Custom(f) => f(x),
        }
    }

    /// ω(x) = |M(x)|.
    pub fn scalar_weight(&self, x: Point) -> Result<f64> {
        Ok(self.evaluate(x)?.spectral_norm())
    }

    /// A(x) = M²(x).
    pub fn diffusion(&self, x: Point) -> Result<SpdMatrix> {
        Ok(self.evaluate(x)?.square())
    }

    /// |M(x)| · |M⁻¹(x)| together with a flag when it exceeds the declared Λ.
    pub fn condition_product(&self, x: Point) -> Result<ConditionCheck> {
        let value = self.evaluate(x)?.condition();
        Ok(ConditionCheck {
            value,
            exceeds_bound: value > self.lambda_bound * (1.0 + 1e-9),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionCheck {
    pub value: f64,
    pub exceeds_bound: bool,
}

#[inline]
fn dist(a: Point, b: Point) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// exp(⟨log M⟩) over the quadrature nodes of a ball.
pub fn log_mean_matrix(field: &MatrixWeightField, quad: &BallQuadrature) -> Result<SpdMatrix> {
    let mut acc: Option<SymMatrix> = None;
    for (p, w) in quad.nodes.iter().zip(&quad.weights) {
        let l = matrix_log(&field.evaluate(*p)?).scale(*w);
        acc = Some(match acc {
            None => l,
            Some(a) => a.add(&l),
        });
    }
    let mean = acc.unwrap().scale(1.0 / quad.total_weight);
    Ok(matrix_exp(&mean))
}

/// Arithmetic mean ⟨M⟩ over the quadrature nodes.
pub fn mean_matrix(field: &MatrixWeightField, quad: &BallQuadrature) -> Result<SymMatrix> {
    let mut acc: Option<SymMatrix> = None;
    for (p, w) in quad.nodes.iter().zip(&quad.weights) {
        let m = field.evaluate(*p)?.as_sym().scale(*w);
        acc = Some(match acc {
            None => m,
            Some(a) => a.add(&m),
        });
    }
    Ok(acc.unwrap().scale(1.0 / quad.total_weight))
}

/// exp(⟨log w⟩) for a scalar weight given as a function.
pub fn log_mean_scalar(
    quad: &BallQuadrature,
    mut w: impl FnMut(Point) -> Result<f64>,
) -> Result<f64> {
    let mean = quad.try_mean(|p| {
        let v = w(p)?;
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::NotPositiveDefinite(format!(
                "scalar weight {v} at ({}, {})",
                p[0], p[1]
            )));
        }
        Ok(v.ln())
    })?;
    Ok(mean.exp())
}

// ---------------------------------------------------------------------------
// serialization

/// JSON description of a weight field.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum WeightSpec {
    Constant { entries: Vec<Vec<f64>> },
    Power {
        exponent: f64,
        anchor: [f64; 2],
        #[serde(default)]
        lambda: Option<f64>,
    },
    RotatedAnisotropic {
        exponent: f64,
        ratio: f64,
        #[serde(default)]
        angle: f64,
        anchor: [f64; 2],
    },
    Grid {
        path: String,
        #[serde(default)]
        lambda: Option<f64>,
    },
}

impl WeightSpec {
    pub fn build(&self, base_dir: &Path) -> Result<MatrixWeightField> {
        match self {
            WeightSpec::Constant { entries } => {
                let n = entries.len();
                let flat: Vec<f64> = entries.iter().flatten().copied().collect();
                Ok(MatrixWeightField::constant(SpdMatrix::new(n, &flat)?))
            }
            WeightSpec::Power { exponent, anchor, lambda } => {
                let mut f = MatrixWeightField::power(*exponent, *anchor);
                if let Some(l) = lambda {
                    if *l < 1.0 {
                        return Err(Error::Config(format!("lambda {l} must be >= 1")));
                    }
                    f.lambda_bound = *l;
                }
                Ok(f)
            }
            WeightSpec::RotatedAnisotropic { exponent, ratio, angle, anchor } => {
                MatrixWeightField::rotated_anisotropic(*exponent, *ratio, *angle, *anchor)
            }
            WeightSpec::Grid { path, lambda } => {
                let full = base_dir.join(path);
                let grid = GridWeight::read_csv(&full)?;
                Ok(MatrixWeightField::from_grid(grid, *lambda))
            }
        }
    }
}

/// Matrix entries sampled on a rectangular lattice, bilinearly interpolated.
/// CSV rows are `x, y, m11, m12, m22`; the lattice must be complete.
#[derive(Debug)]
pub struct GridWeight {
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// (m11, m12, m22) per lattice point, row-major over (xs, ys).
    vals: Vec<[f64; 3]>,
}

impl GridWeight {
    pub fn read_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut rows: Vec<(f64, f64, [f64; 3])> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parts: Vec<&str> = line.split(',').map(str::trim).collect();
            if parts.len() != 5 {
                return Err(Error::Config(format!(
                    "{}:{}: expected 5 columns x,y,m11,m12,m22",
                    path.display(),
                    lineno + 1
                )));
            }
            let nums: Vec<f64> = parts
                .iter()
                .map(|s| {
                    s.parse::<f64>().map_err(|e| {
                        Error::Config(format!("{}:{}: {e}", path.display(), lineno + 1))
                    })
                })
                .collect::<Result<_>>()?;
            rows.push((nums[0], nums[1], [nums[2], nums[3], nums[4]]));
        }
        let mut xs: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let mut ys: Vec<f64> = rows.iter().map(|r| r.1).collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        ys.sort_by(f64::total_cmp);
        ys.dedup();
        if xs.len() < 2 || ys.len() < 2 || rows.len() != xs.len() * ys.len() {
            return Err(Error::Config(format!(
                "{}: grid must be a complete lattice ({} x {} points, {} rows)",
                path.display(),
                xs.len(),
                ys.len(),
                rows.len()
            )));
        }
        let mut vals = vec![[0.0; 3]; xs.len() * ys.len()];
        for (x, y, v) in rows {
            let i = xs.partition_point(|&t| t < x);
            let j = ys.partition_point(|&t| t < y);
            vals[i * ys.len() + j] = v;
        }
        Ok(GridWeight { xs, ys, vals })
    }

    fn evaluate(&self, p: Point) -> Result<SpdMatrix> {
        let clamp = |t: f64, lo: f64, hi: f64| t.max(lo).min(hi);
        let x = clamp(p[0], self.xs[0], *self.xs.last().unwrap());
        let y = clamp(p[1], self.ys[0], *self.ys.last().unwrap());
        let i = self.xs.partition_point(|&t| t <= x).clamp(1, self.xs.len() - 1) - 1;
        let j = self.ys.partition_point(|&t| t <= y).clamp(1, self.ys.len() - 1) - 1;
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let (y0, y1) = (self.ys[j], self.ys[j + 1]);
        let tx = if x1 > x0 { (x - x0) / (x1 - x0) } else { 0.0 };
        let ty = if y1 > y0 { (y - y0) / (y1 - y0) } else { 0.0 };
        let at = |ii: usize, jj: usize| self.vals[ii * self.ys.len() + jj];
        let mut m = [0.0f64; 3];
        for k in 0..3 {
            let v00 = at(i, j)[k];
            let v10 = at(i + 1, j)[k];
            let v01 = at(i, j + 1)[k];
            let v11 = at(i + 1, j + 1)[k];
            m[k] = v00 * (1.0 - tx) * (1.0 - ty)
                + v10 * tx * (1.0 - ty)
                + v01 * (1.0 - tx) * ty
                + v11 * tx * ty;
        }
        SpdMatrix::new(2, &[m[0], m[1], m[1], m[2]])
    }

    fn max_sampled_condition(&self) -> f64 {
        let mut lambda = 1.0f64;
        for v in &self.vals {
            if let Ok(m) = SpdMatrix::new(2, &[v[0], v[1], v[1], v[2]]) {
                lambda = lambda.max(m.condition());
            }
        }
        lambda
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::{Ball, QuadratureSpec};

    #[test]
    fn condition_product_examples() {
        let id = MatrixWeightField::identity();
        let c = id.condition_product([0.3, -0.7]).unwrap();
        assert!((c.value - 1.0).abs() < 1e-12 && !c.exceeds_bound);

        let d = MatrixWeightField::constant(SpdMatrix::from_diag(&[4.0, 1.0]).unwrap());
        let c = d.condition_product([0.0, 0.0]).unwrap();
        assert!((c.value - 4.0).abs() < 1e-12 && !c.exceeds_bound);

        let p = MatrixWeightField::power(0.3, [0.0, 0.0]);
        let c = p.condition_product([0.5, 0.5]).unwrap();
        assert!((c.value - 1.0).abs() < 1e-10 && !c.exceeds_bound);
    }

    #[test]
    fn scalar_weight_examples() {
        let id = MatrixWeightField::identity();
        assert!((id.scalar_weight([1.0, 2.0]).unwrap() - 1.0).abs() < 1e-14);

        let d = MatrixWeightField::constant(SpdMatrix::from_diag(&[4.0, 1.0]).unwrap());
        assert!((d.scalar_weight([0.0, 0.0]).unwrap() - 4.0).abs() < 1e-12);

        let p = MatrixWeightField::power(0.5, [0.0, 0.0]);
        // |x| = 4 -> omega = 2
        assert!((p.scalar_weight([4.0, 0.0]).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn scalar_weight_squared_is_norm_of_diffusion() {
        let f = MatrixWeightField::rotated_anisotropic(0.2, 2.0, 0.7, [0.0, 0.0]).unwrap();
        for p in [[0.4, 0.1], [1.3, -0.4], [-0.2, 0.9]] {
            let w = f.scalar_weight(p).unwrap();
            let a = f.diffusion(p).unwrap().spectral_norm();
            assert!((w * w - a).abs() <= 1e-10 * a.max(1.0));
        }
    }

    #[test]
    fn power_field_fails_at_anchor() {
        let p = MatrixWeightField::power(0.3, [0.0, 0.0]);
        assert!(p.evaluate([0.0, 0.0]).is_err());
    }

    #[test]
    fn log_mean_of_constant_field_is_exact() {
        let m0 = SpdMatrix::new(2, &[2.0, 0.5, 0.5, 1.5]).unwrap();
        let f = MatrixWeightField::constant(m0.clone());
        let b = Ball::new([0.0, 0.0], 1.0).unwrap();
        let q = BallQuadrature::build(&b, &QuadratureSpec::default(), None, &[]).unwrap();
        let lm = log_mean_matrix(&f, &q).unwrap();
        let err = lm.as_sym().sub(m0.as_sym()).spectral_norm();
        assert!(err < 1e-12, "err {err}");
    }

    #[test]
    fn log_mean_reciprocal_compatibility() {
        // <1/w>^log * <w>^log = 1 on the same nodes
        let f = MatrixWeightField::power(0.7, [0.0, 0.0]);
        let b = Ball::new([0.4, 0.3], 0.25).unwrap();
        let q = BallQuadrature::build(&b, &QuadratureSpec::default(), None, f.singular_anchors())
            .unwrap();
        let direct = log_mean_scalar(&q, |p| f.scalar_weight(p)).unwrap();
        let recip = log_mean_scalar(&q, |p| Ok(1.0 / f.scalar_weight(p)?)).unwrap();
        assert!((direct * recip - 1.0).abs() < 1e-12);
    }

    #[test]
    fn log_mean_power_weight_matches_radial_oracle() {
        // same ball as the quadrature oracle test, exponentiated
        let c = [0.5, 0.1];
        let b = Ball::new(c, 0.2).unwrap();
        let f = MatrixWeightField::power(1.0, [0.0, 0.0]);
        let q = BallQuadrature::build(
            &b,
            &QuadratureSpec { cells: 256, subsample: 8 },
            None,
            f.singular_anchors(),
        )
        .unwrap();
        let got = log_mean_scalar(&q, |p| f.scalar_weight(p)).unwrap();
        // frozen from the dense radial-integration oracle (proto run)
        let oracle = 0.509_901_951_423_2483_f64;
        assert!((got - oracle).abs() < 1e-6, "{got} vs {oracle}");
    }

    #[test]
    fn grid_weight_roundtrip_bilinear() {
        let dir = std::env::temp_dir().join("plaplab_gridweight_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("w.csv");
        let mut text = String::new();
        for i in 0..3 {
            for j in 0..3 {
                let (x, y) = (i as f64, j as f64);
                text.push_str(&format!("{x},{y},{},0.0,{}\n", 1.0 + x, 2.0 + y));
            }
        }
        std::fs::write(&path, text).unwrap();
        let g = GridWeight::read_csv(&path).unwrap();
        let m = g.evaluate([0.5, 1.5]).unwrap();
        assert!((m.get(0, 0) - 1.5).abs() < 1e-12);
        assert!((m.get(1, 1) - 3.5).abs() < 1e-12);
    }
}

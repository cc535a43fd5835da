//! Polygonal Lipschitz domains with explicit boundary charts.
//!
//! A chart pins a boundary piece as the graph of a piecewise-linear map ψ
//! in a rotated frame: Ω ∩ B_r(anchor) = {x_n > ψ(x')}. Slopes of ψ are
//! exact, so the Lipschitz smallness parameter ‖∇ψ‖_∞ carries no
//! sup-estimation error. Charts are supplied by the built-in family
//! constructors; convex corner points (where no small-slope graph exists)
//! are tracked explicitly and exempted from coverage as isolated points.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ball::{Point, Region2};
use crate::error::{Error, Result};

/// Piecewise-linear scalar map on breakpoints `xs` (ascending); extended
/// beyond the ends with the outermost slopes.
#[derive(Debug, Clone)]
pub struct PiecewiseLinear {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl PiecewiseLinear {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return Err(Error::InvalidInput(
                "piecewise-linear map needs matching xs/ys, at least 2".into(),
            ));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("piecewise-linear breakpoints must ascend".into()));
        }
        Ok(PiecewiseLinear { xs, ys })
    }

    pub fn constant_zero(half_width: f64) -> Self {
        PiecewiseLinear { xs: vec![-half_width, half_width], ys: vec![0.0, 0.0] }
    }

    fn segment(&self, x: f64) -> usize {
        let k = self.xs.partition_point(|&t| t <= x);
        k.clamp(1, self.xs.len() - 1) - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        let s = self.segment(x);
        let (x0, x1) = (self.xs[s], self.xs[s + 1]);
        let (y0, y1) = (self.ys[s], self.ys[s + 1]);
        y0 + (x - x0) * (y1 - y0) / (x1 - x0)
    }

    /// One-sided (right) slope at `x`.
    pub fn slope_at(&self, x: f64) -> f64 {
        let s = self.segment(x);
        (self.ys[s + 1] - self.ys[s]) / (self.xs[s + 1] - self.xs[s])
    }

    /// Exact ‖ψ'‖_∞: max slope magnitude over segments.
    pub fn max_abs_slope(&self) -> f64 {
        (0..self.xs.len() - 1)
            .map(|s| ((self.ys[s + 1] - self.ys[s]) / (self.xs[s + 1] - self.xs[s])).abs())
            .fold(0.0, f64::max)
    }
}

/// Boundary chart: a frame (anchor + rotation) in which the nearby boundary
/// is the graph x_n = ψ(x') and the domain is the supergraph.
#[derive(Debug, Clone)]
pub struct BoundaryChart {
    pub anchor: Point,
    /// Rotation of the chart frame: chart x-axis is (cos a, sin a) in
    /// world coordinates.
    pub angle: f64,
    pub psi: PiecewiseLinear,
    pub radius: f64,
}

impl BoundaryChart {
    pub fn to_chart(&self, p: Point) -> Point {
        let (c, s) = (self.angle.cos(), self.angle.sin());
        let dx = p[0] - self.anchor[0];
        let dy = p[1] - self.anchor[1];
        [c * dx + s * dy, -s * dx + c * dy]
    }

    pub fn to_world(&self, q: Point) -> Point {
        let (c, s) = (self.angle.cos(), self.angle.sin());
        [self.anchor[0] + c * q[0] - s * q[1], self.anchor[1] + s * q[0] + c * q[1]]
    }

    pub fn max_abs_slope(&self) -> f64 {
        self.psi.max_abs_slope()
    }
}

/// Ψ(x', x_n) = (x', x_n − ψ(x')) in chart coordinates.
pub fn flatten_map(chart: &BoundaryChart, x: Point) -> Point {
    [x[0], x[1] - chart.psi.eval(x[0])]
}

/// Inverse of [`flatten_map`]: adds ψ back.
pub fn unflatten_map(chart: &BoundaryChart, y: Point) -> Point {
    [y[0], y[1] + chart.psi.eval(y[0])]
}

/// Jacobian of Ψ at `x`, row-major; lower-triangular with unit diagonal,
/// so its determinant is exactly 1.
pub fn flatten_jacobian(chart: &BoundaryChart, x: Point) -> [[f64; 2]; 2] {
    [[1.0, 0.0], [-chart.psi.slope_at(x[0]), 1.0]]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainKind {
    Rectangle,
    Corner { epsilon: f64 },
    RegularPolygon { sides: usize },
    Generic,
}

/// Simple planar polygon with counterclockwise vertices, boundary charts,
/// and declared (δ, R) Lipschitz metadata.
#[derive(Debug, Clone)]
pub struct PolygonalDomain {
    pub vertices: Vec<Point>,
    pub charts: Vec<BoundaryChart>,
    pub declared_delta: f64,
    pub declared_r: f64,
    pub kind: DomainKind,
    /// Convex corner points exempt from chart coverage (isolated points).
    pub exempt_points: Vec<Point>,
}

impl Region2 for PolygonalDomain {
    fn contains(&self, p: Point) -> bool {
        PolygonalDomain::contains(self, p)
    }
}

impl PolygonalDomain {
    pub fn new(
        vertices: Vec<Point>,
        charts: Vec<BoundaryChart>,
        declared_delta: f64,
        declared_r: f64,
        kind: DomainKind,
        exempt_points: Vec<Point>,
    ) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidInput("polygon needs at least 3 vertices".into()));
        }
        let d = PolygonalDomain { vertices, charts, declared_delta, declared_r, kind, exempt_points };
        if d.signed_area() <= 0.0 {
            return Err(Error::InvalidInput(
                "polygon must be counterclockwise and non-degenerate".into(),
            ));
        }
        if d.self_intersects() {
            return Err(Error::InvalidInput("polygon must be simple (no self-intersection)".into()));
        }
        Ok(d)
    }

    fn signed_area(&self) -> f64 {
        let v = &self.vertices;
        let n = v.len();
        let mut s = 0.0;
        for i in 0..n {
            let j = (i + 1) % n;
            s += v[i][0] * v[j][1] - v[j][0] * v[i][1];
        }
        0.5 * s
    }

    pub fn area(&self) -> f64 {
        self.signed_area()
    }

    fn self_intersects(&self) -> bool {
        // brute force over non-adjacent edge pairs; fine at desk scale
        let v = &self.vertices;
        let n = v.len();
        let seg = |i: usize| (v[i], v[(i + 1) % n]);
        for i in 0..n {
            for j in (i + 1)..n {
                if j == i || (j + 1) % n == i || (i + 1) % n == j {
                    continue;
                }
                let (a, b) = seg(i);
                let (c, d) = seg(j);
                if segments_intersect(a, b, c, d) {
                    return true;
                }
            }
        }
        false
    }

    pub fn contains(&self, p: Point) -> bool {
        // even-odd crossing count
        let v = &self.vertices;
        let n = v.len();
        let mut inside = false;
        for i in 0..n {
            let a = v[i];
            let b = v[(i + 1) % n];
            if (a[1] > p[1]) != (b[1] > p[1]) {
                let t = (p[1] - a[1]) / (b[1] - a[1]);
                let x = a[0] + t * (b[0] - a[0]);
                if p[0] < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    pub fn bbox(&self) -> (Point, Point) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for v in &self.vertices {
            for k in 0..2 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        (lo, hi)
    }

    pub fn boundary_length(&self) -> f64 {
        let v = &self.vertices;
        let n = v.len();
        (0..n).map(|i| dist(v[i], v[(i + 1) % n])).sum()
    }

    /// Points spaced ~`step` along the boundary.
    pub fn boundary_samples(&self, step: f64) -> Vec<Point> {
        let v = &self.vertices;
        let n = v.len();
        let mut out = Vec::new();
        for i in 0..n {
            let a = v[i];
            let b = v[(i + 1) % n];
            let len = dist(a, b);
            let m = (len / step).ceil().max(1.0) as usize;
            for k in 0..m {
                let t = k as f64 / m as f64;
                out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
            }
        }
        out
    }

    /// Exact area of Ω ∩ B_r(c) by clipping each boundary edge against the
    /// circle; pieces outside the circle contribute circular sectors.
    pub fn circle_intersection_area(&self, c: Point, r: f64) -> f64 {
        let v = &self.vertices;
        let n = v.len();
        let mut area = 0.0;
        for i in 0..n {
            let a = [v[i][0] - c[0], v[i][1] - c[1]];
            let b = [v[(i + 1) % n][0] - c[0], v[(i + 1) % n][1] - c[1]];
            area += edge_circle_contribution(a, b, r);
        }
        area
    }

    // -- built-in families ---------------------------------------------------

    /// Polygonal approximation of Ω = {x ∈ B₁(0): x₂ > −ε|x₁|}: a wedge of
    /// opening π + 2 arctan ε with the exact corner at the origin and the
    /// unit arc replaced by `chords` chords. The chart at the origin is the
    /// map ψ(x₁) = −ε|x₁|.
    pub fn corner(epsilon: f64, chords: usize) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::Config(format!("corner epsilon {epsilon} must lie in (0, 1]")));
        }
        let m = chords.max(8);
        let beta = epsilon.atan();
        let span = PI + 2.0 * beta;
        let dtheta = span / m as f64;

        let mut vertices = vec![[0.0, 0.0]];
        for k in 0..=m {
            let th = -beta + k as f64 * dtheta;
            vertices.push([th.cos(), th.sin()]);
        }

        let mut charts = Vec::new();
        // corner chart: psi(x1) = -eps|x1| in the standard frame
        let r0 = (dtheta / 2.0).cos() * (1.0 - 1e-12);
        charts.push(BoundaryChart {
            anchor: [0.0, 0.0],
            angle: 0.0,
            psi: PiecewiseLinear::new(
                vec![-1.5, 0.0, 1.5],
                vec![-1.5 * epsilon, 0.0, -1.5 * epsilon],
            )?,
            radius: r0,
        });
        // one chart per chord, in the chord frame with the interior above;
        // neighbours enter the chart ball with slope tan(dtheta)
        let chord_len = 2.0 * (dtheta / 2.0).sin();
        let tilt = dtheta.tan();
        for k in 0..m {
            let p0 = vertices[1 + k];
            let p1 = vertices[2 + k];
            let mid = [(p0[0] + p1[0]) / 2.0, (p0[1] + p1[1]) / 2.0];
            let d = [(p1[0] - p0[0]) / chord_len, (p1[1] - p0[1]) / chord_len];
            let angle = d[1].atan2(d[0]);
            let h = chord_len / 2.0;
            let psi = PiecewiseLinear::new(
                vec![-3.0 * h, -h, h, 3.0 * h],
                vec![2.0 * h * tilt, 0.0, 0.0, 2.0 * h * tilt],
            )?;
            let end_chord = k == 0 || k == m - 1;
            let radius = if end_chord { 0.98 * h } else { 1.8 * h };
            charts.push(BoundaryChart { anchor: mid, angle, psi, radius });
        }

        let exempt = vec![vertices[1], vertices[1 + m]];
        PolygonalDomain::new(vertices, charts, epsilon, 1.0, DomainKind::Corner { epsilon }, exempt)
    }

    pub fn rectangle(lo: Point, hi: Point) -> Result<Self> {
        if !(hi[0] > lo[0] && hi[1] > lo[1]) {
            return Err(Error::InvalidInput("rectangle needs hi > lo".into()));
        }
        let vertices = vec![lo, [hi[0], lo[1]], hi, [lo[0], hi[1]]];
        let charts = edge_charts(&vertices);
        let min_edge = (hi[0] - lo[0]).min(hi[1] - lo[1]);
        PolygonalDomain::new(
            vertices.clone(),
            charts,
            0.0,
            min_edge / 2.0,
            DomainKind::Rectangle,
            vertices,
        )
    }

    /// Regular polygon inscribed in the unit circle (chord-approximated disk).
    pub fn regular_polygon(sides: usize) -> Result<Self> {
        if sides < 3 {
            return Err(Error::InvalidInput("regular polygon needs at least 3 sides".into()));
        }
        let vertices: Vec<Point> = (0..sides)
            .map(|k| {
                let th = 2.0 * PI * k as f64 / sides as f64;
                [th.cos(), th.sin()]
            })
            .collect();
        let charts = edge_charts(&vertices);
        let edge = dist(vertices[0], vertices[1]);
        PolygonalDomain::new(
            vertices.clone(),
            charts,
            0.0,
            edge / 2.0,
            DomainKind::RegularPolygon { sides },
            vertices,
        )
    }

    /// Generic simple polygon. Charts default to flat per-edge charts plus
    /// bisector-frame charts at re-entrant vertices; convex vertices are
    /// exempt points. Explicit charts override the default.
    pub fn from_vertices(vertices: Vec<Point>, charts: Option<Vec<BoundaryChart>>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::InvalidInput("polygon needs at least 3 vertices".into()));
        }
        let mut auto_charts = edge_charts(&vertices);
        let mut exempt = Vec::new();
        let mut delta = 0.0f64;
        for i in 0..n {
            let prev = vertices[(i + n - 1) % n];
            let v = vertices[i];
            let next = vertices[(i + 1) % n];
            let interior = interior_angle(prev, v, next);
            if interior < PI - 1e-12 {
                exempt.push(v);
            } else if interior > PI + 1e-12 {
                // re-entrant: graph in the bisector frame with slope tan((θ−π)/2)
                let slope = ((interior - PI) / 2.0).tan();
                delta = delta.max(slope);
                let din = unit(sub(prev, v));
                let dout = unit(sub(next, v));
                let bis = unit([din[0] + dout[0], din[1] + dout[1]]);
                let angle = bis[1].atan2(bis[0]) - PI / 2.0;
                let reach = dist(prev, v).min(dist(v, next)) * 0.45;
                let w = reach / (1.0 + slope * slope).sqrt();
                let psi =
                    PiecewiseLinear::new(vec![-w, 0.0, w], vec![-w * slope, 0.0, -w * slope])?;
                auto_charts.push(BoundaryChart { anchor: v, angle, psi, radius: reach });
            }
        }
        let charts = charts.unwrap_or(auto_charts);
        let delta = charts.iter().map(|c| c.max_abs_slope()).fold(delta, f64::max);
        let min_radius = charts.iter().map(|c| c.radius).fold(f64::INFINITY, f64::min);
        PolygonalDomain::new(vertices, charts, delta, min_radius, DomainKind::Generic, exempt)
    }

    // -- Lipschitz parameters -------------------------------------------------

    /// Max ‖ψ'‖_∞ over the declared charts, after verifying that the charts
    /// cover the boundary (convex corner points exempt as isolated points)
    /// and that each chart's graph property holds on sampled points.
    pub fn lipschitz_params(&self, scale: f64) -> Result<f64> {
        if self.charts.is_empty() {
            return Err(Error::Coverage("domain has no charts".into()));
        }
        let step = (self.boundary_length() / 2000.0).min(scale / 50.0);
        let corner_tol = 2.5 * step;
        for s in self.boundary_samples(step) {
            let covered =
                self.charts.iter().any(|c| dist(s, c.anchor) < c.radius * (1.0 - 1e-12));
            if covered {
                continue;
            }
            if self.exempt_points.iter().any(|&e| dist(s, e) <= corner_tol) {
                continue;
            }
            return Err(Error::Coverage(format!(
                "boundary segment near ({:.6}, {:.6}) not covered by any chart",
                s[0], s[1]
            )));
        }
        for chart in &self.charts {
            self.verify_chart(chart)?;
        }
        Ok(self.charts.iter().map(|c| c.max_abs_slope()).fold(0.0, f64::max))
    }

    /// Sampled check of Ω ∩ B_r(anchor) = {x_n > ψ(x')} in chart coordinates.
    fn verify_chart(&self, chart: &BoundaryChart) -> Result<()> {
        let n = 24;
        let band = 1e-7 * chart.radius;
        for i in 0..n {
            for j in 0..n {
                let q = [
                    chart.radius * (2.0 * (i as f64 + 0.5) / n as f64 - 1.0),
                    chart.radius * (2.0 * (j as f64 + 0.5) / n as f64 - 1.0),
                ];
                if q[0] * q[0] + q[1] * q[1] >= chart.radius * chart.radius {
                    continue;
                }
                let psi = chart.psi.eval(q[0]);
                if (q[1] - psi).abs() <= band {
                    continue;
                }
                let world = chart.to_world(q);
                if self.contains(world) != (q[1] > psi) {
                    return Err(Error::Coverage(format!(
                        "chart at ({:.4}, {:.4}) fails the graph property at ({:.4}, {:.4})",
                        chart.anchor[0], chart.anchor[1], world[0], world[1]
                    )));
                }
            }
        }
        Ok(())
    }

    // -- measure density ------------------------------------------------------

    /// Monte-Carlo estimates of the interior and boundary measure-density
    /// ratios for radii up to `r_max`: `sup_interior` estimates
    /// sup |B_r(y)| / |Ω ∩ B_r(y)| over y ∈ Ω and `inf_boundary` estimates
    /// inf |B_r(y) ∩ Ωᶜ| / |B_r(y)| over y ∈ ∂Ω.
    pub fn measure_density(
        &self,
        r_max: f64,
        n_centers: usize,
        n_mc: usize,
        seed: u64,
    ) -> MeasureDensityReport {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (lo, hi) = self.bbox();
        let radii: Vec<f64> = (0..6).map(|k| r_max / (1 << k) as f64).collect();

        let mut interior_centers = Vec::with_capacity(n_centers);
        let mut guard = 0usize;
        while interior_centers.len() < n_centers && guard < 100_000 * n_centers.max(1) {
            let p = [rng.gen_range(lo[0]..hi[0]), rng.gen_range(lo[1]..hi[1])];
            if self.contains(p) {
                interior_centers.push(p);
            }
            guard += 1;
        }
        let boundary_centers =
            self.boundary_samples(self.boundary_length() / n_centers.max(1) as f64);

        let mut sup_interior = 0.0f64;
        let mut inf_boundary = f64::INFINITY;
        let mut rows = Vec::new();
        for &r in &radii {
            for &c in &interior_centers {
                let frac = self.mc_ball_fraction(c, r, n_mc, &mut rng);
                if frac > 0.0 {
                    let ratio = 1.0 / frac;
                    sup_interior = sup_interior.max(ratio);
                    rows.push(MeasureDensityRow { center: c, radius: r, ratio, boundary: false });
                }
            }
            for &c in &boundary_centers {
                let frac = self.mc_ball_fraction(c, r, n_mc, &mut rng);
                let ratio = 1.0 - frac;
                inf_boundary = inf_boundary.min(ratio);
                rows.push(MeasureDensityRow { center: c, radius: r, ratio, boundary: true });
            }
        }
        let sigma = 1.0 / (n_mc as f64).sqrt();
        MeasureDensityReport { sup_interior, inf_boundary, mc_sigma: sigma, rows }
    }

    /// Monte-Carlo fraction |Ω ∩ B_r(c)| / |B_r(c)|.
    pub fn mc_ball_fraction(&self, c: Point, r: f64, n_mc: usize, rng: &mut ChaCha8Rng) -> f64 {
        let mut count = 0usize;
        let mut total = 0usize;
        while total < n_mc {
            let x = rng.gen_range(-1.0..1.0f64);
            let y = rng.gen_range(-1.0..1.0f64);
            if x * x + y * y >= 1.0 {
                continue;
            }
            total += 1;
            if self.contains([c[0] + r * x, c[1] + r * y]) {
                count += 1;
            }
        }
        count as f64 / n_mc as f64
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MeasureDensityRow {
    pub center: Point,
    pub radius: f64,
    pub ratio: f64,
    pub boundary: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct MeasureDensityReport {
    pub sup_interior: f64,
    pub inf_boundary: f64,
    pub mc_sigma: f64,
    #[serde(skip)]
    pub rows: Vec<MeasureDensityRow>,
}

/// JSON description of a domain.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DomainSpec {
    Corner {
        epsilon: f64,
        #[serde(default = "default_chords")]
        chords: usize,
    },
    Polygon { vertices: Vec<[f64; 2]> },
    Rectangle { lo: [f64; 2], hi: [f64; 2] },
    Disk {
        #[serde(default = "default_sides")]
        sides: usize,
    },
}

fn default_chords() -> usize {
    256
}

fn default_sides() -> usize {
    64
}

impl DomainSpec {
    pub fn build(&self) -> Result<Arc<PolygonalDomain>> {
        let d = match self {
            DomainSpec::Corner { epsilon, chords } => PolygonalDomain::corner(*epsilon, *chords)?,
            DomainSpec::Polygon { vertices } => {
                PolygonalDomain::from_vertices(vertices.clone(), None)?
            }
            DomainSpec::Rectangle { lo, hi } => PolygonalDomain::rectangle(*lo, *hi)?,
            DomainSpec::Disk { sides } => PolygonalDomain::regular_polygon(*sides)?,
        };
        Ok(Arc::new(d))
    }
}

// ---------------------------------------------------------------------------
// helpers

fn dist(a: Point, b: Point) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

fn unit(v: Point) -> Point {
    let n = (v[0] * v[0] + v[1] * v[1]).sqrt();
    [v[0] / n, v[1] / n]
}

fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// Interior angle at vertex v of a counterclockwise polygon.
fn interior_angle(prev: Point, v: Point, next: Point) -> f64 {
    let din = unit(sub(v, prev));
    let dout = unit(sub(next, v));
    // exterior turn in (-pi, pi); interior angle = pi - turn
    let turn = cross(din, dout).atan2(din[0] * dout[0] + din[1] * dout[1]);
    PI - turn
}

fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let o1 = cross(sub(b, a), sub(c, a));
    let o2 = cross(sub(b, a), sub(d, a));
    let o3 = cross(sub(d, c), sub(a, c));
    let o4 = cross(sub(d, c), sub(b, c));
    (o1 * o2 < 0.0) && (o3 * o4 < 0.0)
}

/// Flat charts over each edge; interior is to the left of CCW edges.
fn edge_charts(vertices: &[Point]) -> Vec<BoundaryChart> {
    let n = vertices.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        let len = dist(a, b);
        let mid = [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0];
        let d = unit(sub(b, a));
        out.push(BoundaryChart {
            anchor: mid,
            angle: d[1].atan2(d[0]),
            psi: PiecewiseLinear::constant_zero(len),
            radius: 0.499 * len,
        });
    }
    out
}

/// Contribution of one (origin-centered) edge to |polygon ∩ B_r(0)|.
/// Pieces of the edge inside the circle contribute the triangle term
/// 0.5·cross; pieces outside contribute the circular sector spanned by
/// their endpoints.
fn edge_circle_contribution(a: Point, b: Point, r: f64) -> f64 {
    let piece = |p: Point, q: Point| -> f64 {
        let mid = [(p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0];
        if mid[0] * mid[0] + mid[1] * mid[1] <= r * r {
            0.5 * cross(p, q)
        } else {
            let th = cross(p, q).atan2(p[0] * q[0] + p[1] * q[1]);
            0.5 * r * r * th
        }
    };
    let d = sub(b, a);
    let qa = d[0] * d[0] + d[1] * d[1];
    let qb = 2.0 * (a[0] * d[0] + a[1] * d[1]);
    let qc = a[0] * a[0] + a[1] * a[1] - r * r;
    let disc = qb * qb - 4.0 * qa * qc;
    let mut ts = vec![0.0f64];
    if disc > 0.0 && qa > 0.0 {
        let sq = disc.sqrt();
        for t in [(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)] {
            if t > 1e-14 && t < 1.0 - 1e-14 {
                ts.push(t);
            }
        }
    }
    ts.push(1.0);
    ts.sort_by(f64::total_cmp);
    let at = |t: f64| [a[0] + t * d[0], a[1] + t * d[1]];
    let mut s = 0.0;
    for w in ts.windows(2) {
        s += piece(at(w[0]), at(w[1]));
    }
    s
}

//! Counting, locating and certifying roots of characteristic factors.
//!
//! Counts come from the argument principle: `(1/2πi)∮ Δ′/Δ dλ` over the
//! boundary of a rectangle. Each edge starts with 256 panels; panels are
//! halved until the trapezoid value of `∫Δ′/Δ` on each one agrees with the
//! phase change of `Δ` across it.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quasipoly::ScalarFactor;
use crate::realization::{FrequencyTarget, RealizationResult, WeightTable};

const START_PANELS: usize = 256;
const MAX_PANELS: usize = 1 << 20;
const SNAP: f64 = 1e-3;
const BOUNDARY_REL: f64 = 1e-8;
const DILATION: f64 = 1e-6;

/// Axis-aligned rectangle in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRegion")]
pub struct Region {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

#[derive(Deserialize)]
struct RawRegion {
    re_min: f64,
    re_max: f64,
    im_min: f64,
    im_max: f64,
}

impl TryFrom<RawRegion> for Region {
    type Error = Error;
    fn try_from(r: RawRegion) -> Result<Self> {
        Region::new(r.re_min, r.re_max, r.im_min, r.im_max)
    }
}

impl Region {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        let finite = [re_min, re_max, im_min, im_max].iter().all(|x| x.is_finite());
        if !finite || !(re_min < re_max) || !(im_min < im_max) {
            return Err(Error::InvalidInput(format!(
                "region [{re_min}, {re_max}] × [{im_min}, {im_max}] is empty or not finite"
            )));
        }
        Ok(Self { re_min, re_max, im_min, im_max })
    }

    /// Square of half-width `delta` centred at `center`.
    pub fn square(center: Complex64, delta: f64) -> Result<Self> {
        Self::new(center.re - delta, center.re + delta, center.im - delta, center.im + delta)
    }

    pub fn contains(&self, z: Complex64) -> bool {
        (self.re_min..=self.re_max).contains(&z.re) && (self.im_min..=self.im_max).contains(&z.im)
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))
    }

    pub fn dilate(&self, eps: f64) -> Self {
        Self {
            re_min: self.re_min - eps,
            re_max: self.re_max + eps,
            im_min: self.im_min - eps,
            im_max: self.im_max + eps,
        }
    }

    /// Image under complex conjugation.
    pub fn conjugate(&self) -> Self {
        Self { im_min: -self.im_max, im_max: -self.im_min, ..*self }
    }

    /// Four cells cut at fraction `t` of each side.
    pub fn quadrants(&self, t: f64) -> [Self; 4] {
        let re = self.re_min + t * (self.re_max - self.re_min);
        let im = self.im_min + t * (self.im_max - self.im_min);
        [
            Self { re_max: re, im_max: im, ..*self },
            Self { re_min: re, im_max: im, ..*self },
            Self { re_max: re, im_min: im, ..*self },
            Self { re_min: re, im_min: im, ..*self },
        ]
    }

    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.re_min, self.im_min),
            Complex64::new(self.re_max, self.im_min),
            Complex64::new(self.re_max, self.im_max),
            Complex64::new(self.re_min, self.im_max),
        ]
    }
}

/// Size of `|Δ|` on a region, used to make thresholds relative.
pub fn contour_scale(factor: &ScalarFactor, region: &Region) -> f64 {
    let reach = region.corners().iter().map(|z| z.norm()).fold(0.0, f64::max);
    let left = (-region.re_min).max(0.0);
    let terms: f64 = factor
        .terms()
        .iter()
        .map(|t| (t.a * t.b).abs() * (left * t.tau).exp())
        .sum();
    1.0 + reach + terms
}

/// Winding number with the diagnostics of the final contour pass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourCount {
    pub count: usize,
    /// Smallest `|Δ|` seen on the contour.
    pub min_abs: f64,
    /// Largest number of accepted panels on one edge.
    pub panels: usize,
    /// Whether the region had to be dilated once.
    pub dilated: bool,
}

enum Attempt {
    Done(ContourCount),
    Boundary(f64),
}

#[derive(Clone, Copy)]
struct Node {
    z: Complex64,
    f: Complex64,
    ratio: Complex64,
}

// Each accepted panel contributes arg(Δ(b)/Δ(a)), which is exact once the
// phase change is below π/2; the trapezoid value of ∫Δ′/Δ over the panel
// must agree with it, otherwise the panel is halved.
fn integrate(factor: &ScalarFactor, region: &Region) -> Result<Attempt> {
    let floor = BOUNDARY_REL * contour_scale(factor, region);
    let corners = region.corners();
    let mut min_abs = f64::INFINITY;
    let mut node = |z: Complex64| {
        let (f, df) = factor.evaluate_with_derivative(z);
        min_abs = min_abs.min(f.norm());
        Node { z, f, ratio: df / f }
    };

    let mut winding = 0.0;
    let mut max_edge_panels = 0usize;
    for e in 0..4 {
        let (a, b) = (corners[e], corners[(e + 1) % 4]);
        let mut stack: Vec<(Node, Node, u32)> = Vec::new();
        let uniform: Vec<Node> = (0..=START_PANELS)
            .map(|m| node(a + (b - a) * (m as f64 / START_PANELS as f64)))
            .collect();
        // reversed so that panels are accepted in order along the edge
        stack.extend(uniform.windows(2).rev().map(|w| (w[0], w[1], 0)));
        let mut edge_panels = 0usize;
        while let Some((p, q, depth)) = stack.pop() {
            if !(p.f.norm() > floor && q.f.norm() > floor) {
                return Ok(Attempt::Boundary(p.f.norm().min(q.f.norm())));
            }
            let phase = (q.f / p.f).arg();
            let trapezoid = (q.z - p.z) * (p.ratio + q.ratio) * 0.5;
            if phase.abs() < 0.5 * std::f64::consts::PI && (trapezoid.im - phase).abs() < 0.1 {
                winding += phase;
                edge_panels += 1;
                continue;
            }
            if depth >= 60 || edge_panels + stack.len() >= MAX_PANELS {
                return Err(Error::NoConvergence { residual: (trapezoid.im - phase).abs() });
            }
            let mid = node(0.5 * (p.z + q.z));
            stack.push((mid, q, depth + 1));
            stack.push((p, mid, depth + 1));
        }
        max_edge_panels = max_edge_panels.max(edge_panels);
    }
    if !(min_abs > floor) {
        return Ok(Attempt::Boundary(min_abs));
    }
    let value = winding / TAU;
    let nearest = value.round();
    if (value - nearest).abs() >= SNAP || nearest < 0.0 {
        return Err(Error::NoConvergence { residual: (value - nearest).abs() });
    }
    Ok(Attempt::Done(ContourCount {
        count: nearest as usize,
        min_abs,
        panels: max_edge_panels,
        dilated: false,
    }))
}

/// Number of roots of `factor` inside `region`, with multiplicity, plus
/// contour diagnostics. A root on the contour triggers one dilation by
/// 1e−6 and then [`Error::BoundaryRoot`].
pub fn count_roots_detailed(factor: &ScalarFactor, region: &Region) -> Result<ContourCount> {
    match integrate(factor, region)? {
        Attempt::Done(c) => Ok(c),
        Attempt::Boundary(_) => match integrate(factor, &region.dilate(DILATION))? {
            Attempt::Done(c) => Ok(ContourCount { dilated: true, ..c }),
            Attempt::Boundary(min_abs) => Err(Error::BoundaryRoot { min_abs }),
        },
    }
}

/// Number of roots of `factor` inside `region`, counted with multiplicity.
pub fn count_roots(factor: &ScalarFactor, region: &Region) -> Result<usize> {
    count_roots_detailed(factor, region).map(|c| c.count)
}

/// Newton's method on `Δ` from `lambda0` until `|Δ| < tol`, at most 30
/// iterations. A step that increases `|Δ|` is halved up to 30 times.
/// Once below `tol`, full steps continue while they still reduce `|Δ|`.
pub fn polish_root(factor: &ScalarFactor, lambda0: Complex64, tol: f64) -> Result<Complex64> {
    let mut z = lambda0;
    let (mut f, mut df) = factor.evaluate_with_derivative(z);
    for _ in 0..30 {
        if f.norm() < tol {
            return Ok(finish(factor, z, f, df));
        }
        let step = f / df;
        if !step.is_finite() {
            return Err(Error::NoConvergence { residual: f.norm() });
        }
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..30 {
            let trial = z - step * t;
            let (ft, dft) = factor.evaluate_with_derivative(trial);
            if ft.norm() < f.norm() {
                accepted = Some((trial, ft, dft));
                break;
            }
            t *= 0.5;
        }
        match accepted {
            Some((zt, ft, dft)) => {
                z = zt;
                f = ft;
                df = dft;
            }
            None => return Err(Error::NoConvergence { residual: f.norm() }),
        }
    }
    if f.norm() < tol {
        Ok(finish(factor, z, f, df))
    } else {
        Err(Error::NoConvergence { residual: f.norm() })
    }
}

fn finish(factor: &ScalarFactor, mut z: Complex64, mut f: Complex64, mut df: Complex64) -> Complex64 {
    for _ in 0..4 {
        let trial = z - f / df;
        let (ft, dft) = factor.evaluate_with_derivative(trial);
        if !(ft.norm() < f.norm()) {
            break;
        }
        (z, f, df) = (trial, ft, dft);
    }
    z
}

// off-centre cut so that symmetric regions are not split along the real axis
const CUT: f64 = 0.487_6;

/// Every root inside `region`, each polished to `|Δ| < 1e−10·scale`.
/// Cells are quadrisected until each holds at most one root.
pub fn locate_roots(factor: &ScalarFactor, region: &Region, max_roots: usize) -> Result<Vec<Complex64>> {
    let total = count_roots(factor, region)?;
    if total > max_roots {
        return Err(Error::TooManyRoots { count: total, max: max_roots });
    }
    let tol = 1e-10 * contour_scale(factor, region);
    let mut roots = Vec::with_capacity(total);
    let mut stack = vec![(*region, total, 0u32)];
    while let Some((cell, count, depth)) = stack.pop() {
        if count == 0 {
            continue;
        }
        if count == 1 {
            let edge = (cell.re_max - cell.re_min).max(cell.im_max - cell.im_min);
            if let Ok(z) = polish_root(factor, cell.center(), tol) {
                if cell.dilate(1e-9 * edge.max(1e-300)).contains(z) {
                    roots.push(z);
                    continue;
                }
            }
        }
        if depth >= 60 {
            return Err(Error::NoConvergence { residual: f64::NAN });
        }
        let parts = cell.quadrants(CUT);
        let mut counted = 0;
        for part in parts {
            let c = count_roots(factor, &part)?;
            counted += c;
            stack.push((part, c, depth + 1));
        }
        if counted != count {
            return Err(Error::NoConvergence { residual: (counted as f64 - count as f64).abs() });
        }
    }
    roots.sort_by(|a, b| a.im.total_cmp(&b.im).then(a.re.total_cmp(&b.re)));
    Ok(roots)
}

/// Check of one prescribed frequency against its factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetCheck {
    /// 1-based factor index.
    pub factor: usize,
    pub omega: f64,
    pub residual: f64,
    /// Half-width of the isolation box around `iω`.
    pub delta: f64,
    pub count: Option<usize>,
    pub conjugate_count: Option<usize>,
    pub polished: Option<Complex64>,
    pub root_error: Option<f64>,
    pub min_abs_on_contour: Option<f64>,
    pub panels: Option<usize>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Root count in a user-chosen region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionCount {
    pub factor: usize,
    pub region: Region,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub pass: bool,
    pub targets: Vec<TargetCheck>,
    #[serde(default)]
    pub regions: Vec<RegionCount>,
    /// Smallest `|Δ|` over all isolation contours.
    pub min_abs_on_contour: f64,
    /// Largest panel count per edge over all isolation contours.
    pub max_panels: usize,
}

/// Half-width of the isolation box around a simple root `λ0`.
///
/// Besides `0.05` and half the smallest frequency gap, the box is kept
/// small enough that the linear part of `Δ` at `λ0` dominates the remainder
/// on its boundary, which by Rouché leaves exactly one root inside. With
/// `δ ≤ 1/τ_max`, `|Δ″| ≤ e·Σ|ab|τ²` on the box.
pub fn isolation_radius(factor: &ScalarFactor, lambda0: Complex64, gap: f64) -> f64 {
    let mut delta = 0.05f64.min(0.5 * gap);
    let tau_max = factor.max_delay();
    if tau_max > 0.0 {
        delta = delta.min(1.0 / tau_max);
    }
    let curvature: f64 = std::f64::consts::E
        * factor
            .terms()
            .iter()
            .map(|t| (t.a * t.b).abs() * t.tau * t.tau)
            .sum::<f64>();
    let slope = factor.evaluate_derivative(lambda0).norm();
    if curvature > 0.0 {
        delta = delta.min(0.9 * slope / curvature);
    }
    delta
}

fn min_gap(omegas: &[f64]) -> f64 {
    let mut sorted = omegas.to_vec();
    sorted.sort_by(f64::total_cmp);
    // the conjugate −iω_min is also a target
    let mut gap = 2.0 * sorted[0];
    for w in sorted.windows(2) {
        gap = gap.min(w[1] - w[0]);
    }
    gap
}

/// Certifies that each `±iω` of group `j` is a simple root of factor `j`:
/// residual below `tol`, Newton from `iω` stays within 1e−8, and exactly one
/// root in the isolation boxes around `iω` and `−iω`.
pub fn verify_realization(
    result: &RealizationResult,
    target: &FrequencyTarget,
    weights: &WeightTable,
    tol: f64,
) -> SpectrumReport {
    let gap = min_gap(&target.flat());
    let mut checks = Vec::new();
    let shape_ok = weights.check_against(target).is_ok() && result.taus.len() == target.len();
    for (j, group) in target.groups().iter().enumerate() {
        for &omega in group {
            if !shape_ok {
                checks.push(TargetCheck {
                    factor: j + 1,
                    omega,
                    residual: f64::INFINITY,
                    delta: 0.0,
                    count: None,
                    conjugate_count: None,
                    polished: None,
                    root_error: None,
                    min_abs_on_contour: None,
                    panels: None,
                    pass: false,
                    error: Some("result, target and weights disagree in shape".into()),
                });
                continue;
            }
            checks.push(check_target(&result.factor(weights, j), j, omega, gap, tol));
        }
    }
    let min_abs = checks
        .iter()
        .filter_map(|c| c.min_abs_on_contour)
        .fold(f64::INFINITY, f64::min);
    let max_panels = checks.iter().filter_map(|c| c.panels).max().unwrap_or(0);
    SpectrumReport {
        pass: !checks.is_empty() && checks.iter().all(|c| c.pass),
        targets: checks,
        regions: Vec::new(),
        min_abs_on_contour: min_abs,
        max_panels,
    }
}

fn check_target(factor: &ScalarFactor, j: usize, omega: f64, gap: f64, tol: f64) -> TargetCheck {
    let lambda0 = Complex64::new(0.0, omega);
    let residual = factor.evaluate(lambda0).norm();
    let delta = isolation_radius(factor, lambda0, gap);
    let mut check = TargetCheck {
        factor: j + 1,
        omega,
        residual,
        delta,
        count: None,
        conjugate_count: None,
        polished: None,
        root_error: None,
        min_abs_on_contour: None,
        panels: None,
        pass: false,
        error: None,
    };
    let region = match Region::square(lambda0, delta) {
        Ok(r) => r,
        Err(e) => {
            check.error = Some(e.to_string());
            return check;
        }
    };
    let polish_tol = 1e-12 * contour_scale(factor, &region);
    match polish_root(factor, lambda0, polish_tol) {
        Ok(z) => {
            check.polished = Some(z);
            check.root_error = Some((z - lambda0).norm());
        }
        Err(e) => check.error = Some(e.to_string()),
    }
    match count_roots_detailed(factor, &region) {
        Ok(c) => {
            check.count = Some(c.count);
            check.min_abs_on_contour = Some(c.min_abs);
            check.panels = Some(c.panels);
        }
        Err(e) => check.error = Some(e.to_string()),
    }
    match count_roots(factor, &region.conjugate()) {
        Ok(c) => check.conjugate_count = Some(c),
        Err(e) => check.error = Some(e.to_string()),
    }
    check.pass = residual < tol
        && check.count == Some(1)
        && check.conjugate_count == Some(1)
        && check.root_error.is_some_and(|e| e < 1e-8);
    check
}

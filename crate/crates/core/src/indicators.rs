//! Quality indicators: exact hypervolume for up to three objectives, IGD,
//! and the hypervolume ratios computed against a fixed objective box.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rand::Rng;

use crate::error::{Error, Result};
use crate::pareto::Objectives;
use crate::problems::{self, BenchmarkId, ObjectiveBox};

/// Exact hypervolume dominated by `points` and bounded by `reference`.
///
/// Points that do not strictly dominate the reference in every objective
/// contribute nothing.
pub fn hypervolume<T: Objectives>(points: &[T], reference: &[f64]) -> Result<f64> {
    let m = reference.len();
    let mut inside: Vec<&[f64]> = Vec::with_capacity(points.len());
    for p in points {
        let f = p.objectives();
        if f.len() != m {
            return Err(Error::contract(format!(
                "point has {} objectives, reference has {m}",
                f.len()
            )));
        }
        if f.iter().zip(reference).all(|(a, r)| a < r) {
            inside.push(f);
        }
    }
    match m {
        1 => Ok(inside.iter().map(|p| reference[0] - p[0]).fold(0.0, f64::max)),
        2 => Ok(hv2(&mut inside, reference[0], reference[1])),
        3 => Ok(hv3(&mut inside, reference)),
        _ => Err(Error::Unsupported(format!(
            "exact hypervolume for {m} objectives (use hv_monte_carlo)"
        ))),
    }
}

fn hv2(points: &mut [&[f64]], rx: f64, ry: f64) -> f64 {
    points.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut prev_y = ry;
    let mut vol = 0.0;
    for p in points.iter() {
        if p[1] < prev_y {
            vol += (rx - p[0]) * (prev_y - p[1]);
            prev_y = p[1];
        }
    }
    vol
}

/// Non-dominated `(x, y)` staircase sorted by ascending `x` (so descending `y`).
struct Staircase {
    steps: Vec<(f64, f64)>,
    rx: f64,
    ry: f64,
    area: f64,
}

impl Staircase {
    fn insert(&mut self, x: f64, y: f64) {
        let pos = self.steps.partition_point(|s| s.0 <= x);
        if pos > 0 && self.steps[pos - 1].1 <= y {
            return;
        }
        let end = pos + self.steps[pos..].iter().take_while(|s| s.1 >= y).count();
        self.steps.splice(pos..end, std::iter::once((x, y)));
        let mut prev_y = self.ry;
        self.area = 0.0;
        for &(sx, sy) in &self.steps {
            self.area += (self.rx - sx) * (prev_y - sy);
            prev_y = sy;
        }
    }
}

fn hv3(points: &mut [&[f64]], r: &[f64]) -> f64 {
    points.sort_by(|a, b| a[2].total_cmp(&b[2]));
    let mut stair = Staircase {
        steps: Vec::new(),
        rx: r[0],
        ry: r[1],
        area: 0.0,
    };
    let mut vol = 0.0;
    for (i, p) in points.iter().enumerate() {
        stair.insert(p[0], p[1]);
        let next_z = points.get(i + 1).map_or(r[2], |q| q[2]);
        vol += stair.area * (next_z - p[2]);
    }
    vol
}

/// Mean distance from each reference point to its nearest member of `set`.
/// An empty set yields `+inf`.
pub fn igd<T: Objectives>(set: &[T], reference_front: &[Vec<f64>]) -> f64 {
    if set.is_empty() {
        return f64::INFINITY;
    }
    if reference_front.is_empty() {
        return 0.0;
    }
    let total: f64 = reference_front
        .iter()
        .map(|r| {
            set.iter()
                .map(|s| {
                    s.objectives()
                        .iter()
                        .zip(r)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                })
                .fold(f64::INFINITY, f64::min)
                .sqrt()
        })
        .sum();
    total / reference_front.len() as f64
}

/// Fixed hypervolume setting of one problem.
#[derive(Debug, Clone, PartialEq)]
pub struct HvContext {
    pub reference_point: Vec<f64>,
    pub objective_box: ObjectiveBox,
    /// Hypervolume of the sampled reference front.
    pub hv_star: f64,
    /// Volume of the whole objective box.
    pub hv_all: f64,
}

impl HvContext {
    pub fn new(objective_box: ObjectiveBox, reference_front: &[Vec<f64>]) -> Result<Self> {
        let reference_point = objective_box.upper.clone();
        let hv_all = objective_box.volume();
        let clipped: Vec<Vec<f64>> = reference_front.iter().map(|p| clip(p, &objective_box)).collect();
        let hv_star = hypervolume(&clipped, &reference_point)?;
        if !(hv_star > 0.0) {
            return Err(Error::config("reference front has zero hypervolume"));
        }
        Ok(Self {
            reference_point,
            objective_box,
            hv_star,
            hv_all,
        })
    }

    /// Cached context of a benchmark problem, computed once per process.
    pub fn for_problem(id: BenchmarkId) -> Result<Arc<HvContext>> {
        static CACHE: OnceLock<Mutex<HashMap<BenchmarkId, Arc<HvContext>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(c) = cache.lock().unwrap_or_else(|e| e.into_inner()).get(&id) {
            return Ok(c.clone());
        }
        let spec = problems::spec(id)?;
        let ctx = Arc::new(Self::new(spec.objective_box.clone(), &spec.reference_front)?);
        let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
        Ok(guard.entry(id).or_insert(ctx).clone())
    }

    /// Hypervolume of `set` inside the objective box.
    pub fn hv<T: Objectives>(&self, set: &[T]) -> Result<f64> {
        let clipped: Vec<Vec<f64>> = set.iter().map(|p| clip(p.objectives(), &self.objective_box)).collect();
        hypervolume(&clipped, &self.reference_point)
    }
}

/// Raises coordinates below the ideal corner onto it; coordinates beyond
/// the upper corner stay put and therefore contribute nothing.
fn clip(p: &[f64], b: &ObjectiveBox) -> Vec<f64> {
    p.iter().zip(&b.ideal).map(|(v, l)| v.max(*l)).collect()
}

/// Hypervolume ratio `hv / hv*`.
pub fn hvr<T: Objectives>(set: &[T], ctx: &HvContext) -> Result<f64> {
    if ctx.hv_star == 0.0 {
        return Err(Error::config("hv* is zero"));
    }
    Ok(ctx.hv(set)? / ctx.hv_star)
}

/// Inverted hypervolume ratio `(hv_all - hv*) / (hv_all - hv)`; larger is better.
///
/// Not clamped: a set between the sampled front points can exceed `hv*`
/// and so score slightly above 1.
pub fn ihvr<T: Objectives>(set: &[T], ctx: &HvContext) -> Result<f64> {
    let hv = ctx.hv(set)?;
    Ok(ihvr_from_hv(hv, ctx))
}

pub fn ihvr_from_hv(hv: f64, ctx: &HvContext) -> f64 {
    let gap = ctx.hv_all - hv;
    if gap <= 0.0 {
        log::warn!("set covers the whole objective box; IHVR reported as 1");
        return 1.0;
    }
    (ctx.hv_all - ctx.hv_star) / gap
}

/// Monte-Carlo hypervolume estimate with its standard error.
///
/// Samples uniformly from the box spanned by the componentwise minimum of
/// the set and `reference`.
pub fn hv_monte_carlo<T: Objectives>(points: &[T], reference: &[f64], samples: usize, seed: u64) -> Result<(f64, f64)> {
    if samples < 10_000 {
        return Err(Error::contract(format!("need at least 10^4 samples, got {samples}")));
    }
    let inside: Vec<&[f64]> = points
        .iter()
        .map(|p| p.objectives())
        .filter(|f| f.iter().zip(reference).all(|(a, r)| a < r))
        .collect();
    if inside.is_empty() {
        return Ok((0.0, 0.0));
    }
    let m = reference.len();
    let lo: Vec<f64> = (0..m)
        .map(|k| inside.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min))
        .collect();
    let volume: f64 = lo.iter().zip(reference).map(|(l, r)| r - l).product();
    let mut rng = crate::rng::seeded(seed);
    let mut q = vec![0.0; m];
    let mut hits = 0usize;
    for _ in 0..samples {
        for k in 0..m {
            q[k] = rng.gen_range(lo[k]..reference[k]);
        }
        if inside.iter().any(|p| p.iter().zip(&q).all(|(a, b)| a <= b)) {
            hits += 1;
        }
    }
    let frac = hits as f64 / samples as f64;
    let se = volume * (frac * (1.0 - frac) / samples as f64).sqrt();
    Ok((volume * frac, se))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hv_examples() {
        assert_eq!(hypervolume(&[vec![0.5, 0.5]], &[1.0, 1.0]).unwrap(), 0.25);
        let two = [vec![0.25, 0.75], vec![0.75, 0.25]];
        // Two 0.1875 rectangles sharing a 0.0625 corner.
        assert!((hypervolume(&two, &[1.0, 1.0]).unwrap() - 0.3125).abs() < 1e-15);
        let empty: [Vec<f64>; 0] = [];
        assert_eq!(hypervolume(&empty, &[1.0, 1.0]).unwrap(), 0.0);
        assert!(hypervolume(&[vec![0.1; 4]], &[1.0; 4]).is_err());
        assert!(hypervolume(&[vec![0.1; 3]], &[1.0; 2]).is_err());
    }

    #[test]
    fn hv3_boxes() {
        assert!((hypervolume(&[vec![0.5, 0.5, 0.5]], &[1.0; 3]).unwrap() - 0.125).abs() < 1e-15);
        // Two unit-ish boxes overlapping in a 0.5^3 corner.
        let pts = [vec![0.0, 0.5, 0.5], vec![0.5, 0.0, 0.5]];
        let expect = 2.0 * 0.25 - 0.125;
        assert!((hypervolume(&pts, &[1.0; 3]).unwrap() - expect).abs() < 1e-15);
    }

    #[test]
    fn points_beyond_reference_ignored() {
        let pts = [vec![0.5, 0.5], vec![1.2, 0.0], vec![0.0, 1.0]];
        assert_eq!(hypervolume(&pts, &[1.0, 1.0]).unwrap(), 0.25);
    }

    #[test]
    fn igd_examples() {
        let front = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        assert_eq!(igd(&front, &front), 0.0);
        let v = igd(&[vec![0.0, 1.0]], &front);
        assert!((v - std::f64::consts::SQRT_2 / 2.0).abs() < 1e-15);
        let empty: [Vec<f64>; 0] = [];
        assert_eq!(igd(&empty, &front), f64::INFINITY);
    }

    fn unit_ctx() -> HvContext {
        let b = ObjectiveBox::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        HvContext::new(b, &[vec![0.25, 0.75], vec![0.75, 0.25]]).unwrap()
    }

    #[test]
    fn ratios() {
        let ctx = unit_ctx();
        assert_eq!(ctx.hv_all, 1.0);
        assert!((ctx.hv_star - 0.3125).abs() < 1e-15);
        let front = [vec![0.25, 0.75], vec![0.75, 0.25]];
        assert_eq!(hvr(&front, &ctx).unwrap(), 1.0);
        assert_eq!(ihvr(&front, &ctx).unwrap(), 1.0);
        let empty: [Vec<f64>; 0] = [];
        assert_eq!(hvr(&empty, &ctx).unwrap(), 0.0);
        assert!((ihvr(&empty, &ctx).unwrap() - 0.6875).abs() < 1e-15);
        assert_eq!(ihvr(&[vec![0.0, 0.0]], &ctx).unwrap(), 1.0);
    }

    #[test]
    fn monte_carlo_single_box() {
        let (est, se) = hv_monte_carlo(&[vec![0.5, 0.5]], &[1.0, 1.0], 1_000_000, 3).unwrap();
        // The sampling box is the point's own box, so every sample hits.
        assert_eq!((est, se), (0.25, 0.0));
        let two = [vec![0.25, 0.75], vec![0.75, 0.25]];
        let (est, se) = hv_monte_carlo(&two, &[1.0, 1.0], 1_000_000, 3).unwrap();
        assert!((est - 0.3125).abs() <= 3.0 * se, "{est} {se}");
        assert!(hv_monte_carlo(&two, &[1.0, 1.0], 100, 3).is_err());
        let empty: [Vec<f64>; 0] = [];
        assert_eq!(hv_monte_carlo(&empty, &[1.0, 1.0], 10_000, 3).unwrap().0, 0.0);
    }
}

//! Sampled true Pareto fronts, objective boxes and their text formats.
//!
//! Front file format: a header line `# <name> m=<m>` followed by one
//! space-separated objective vector per line (`.` decimal, LF endings).
//! Objective-box upper bounds live in one JSON file per suite under
//! `data/boxes/`; the ideal side comes from the reference front.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{uf, wfg, Benchmark, BenchmarkId, Problem, Suite};
use crate::error::{Error, Result};
use crate::pareto::nondominated_indices;

/// A sampled true Pareto front.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceFront {
    pub name: String,
    pub m: usize,
    pub points: Vec<Vec<f64>>,
}

impl ReferenceFront {
    pub fn to_text(&self) -> String {
        let mut out = format!("# {} m={}\n", self.name, self.m);
        for p in &self.points {
            let line: Vec<String> = p.iter().map(|v| format!("{v:?}")).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| Error::parse(1, "empty front file"))?;
        let rest = header
            .strip_prefix("# ")
            .ok_or_else(|| Error::parse(1, "header must start with '# '"))?;
        let (name, m_part) = rest
            .rsplit_once(' ')
            .ok_or_else(|| Error::parse(1, "header must be '# <name> m=<m>'"))?;
        let m: usize = m_part
            .strip_prefix("m=")
            .and_then(|v| v.parse().ok())
            .filter(|&m| m > 0)
            .ok_or_else(|| Error::parse(1, format!("bad objective count '{m_part}'")))?;
        let mut points = Vec::new();
        for (i, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let p: Vec<f64> = line
                .split(' ')
                .map(|t| t.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::parse(i + 1, e.to_string()))?;
            if p.len() != m {
                return Err(Error::parse(i + 1, format!("expected {m} values, got {}", p.len())));
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::parse(i + 1, "non-finite value"));
            }
            points.push(p);
        }
        Ok(Self {
            name: name.to_string(),
            m,
            points,
        })
    }
}

/// Per-objective `[ideal, upper]` ranges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveBox {
    pub ideal: Vec<f64>,
    pub upper: Vec<f64>,
}

impl ObjectiveBox {
    pub fn new(ideal: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if ideal.len() != upper.len() || ideal.is_empty() {
            return Err(Error::config("ideal and upper must have equal, non-zero length"));
        }
        if ideal.iter().zip(&upper).any(|(l, u)| !(l < u)) {
            return Err(Error::config(format!(
                "objective box needs ideal < upper: {ideal:?} vs {upper:?}"
            )));
        }
        Ok(Self { ideal, upper })
    }

    pub fn volume(&self) -> f64 {
        self.ideal.iter().zip(&self.upper).map(|(l, u)| u - l).product()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.iter()
            .zip(self.ideal.iter().zip(&self.upper))
            .all(|(v, (l, u))| *l <= *v && *v <= *u)
    }
}

#[derive(Debug, Deserialize, Serialize)]
struct BoxFile {
    version: u32,
    suite: String,
    upper: BTreeMap<String, Vec<f64>>,
}

const BOX_FILE_VERSION: u32 = 1;

fn box_file(suite: Suite) -> &'static str {
    match suite {
        Suite::Zdt => include_str!("../../data/boxes/zdt.json"),
        Suite::Dtlz => include_str!("../../data/boxes/dtlz.json"),
        Suite::Wfg => include_str!("../../data/boxes/wfg.json"),
        Suite::Uf => include_str!("../../data/boxes/uf.json"),
    }
}

/// Upper bounds stored in the shipped metadata for `id`.
pub fn stored_upper(id: BenchmarkId) -> Result<Vec<f64>> {
    let file: BoxFile = serde_json::from_str(box_file(id.suite))
        .map_err(|e| Error::config(format!("objective-box metadata for {}: {e}", id.suite.label())))?;
    if file.version != BOX_FILE_VERSION {
        return Err(Error::config(format!(
            "objective-box metadata version {} (expected {BOX_FILE_VERSION})",
            file.version
        )));
    }
    file.upper
        .get(&id.to_string())
        .cloned()
        .ok_or_else(|| Error::config(format!("no objective-box metadata for {id}")))
}

/// Objective box of `id`: ideal from the reference front, upper from metadata.
pub fn objective_box(id: BenchmarkId, front: &[Vec<f64>]) -> Result<ObjectiveBox> {
    let upper = stored_upper(id)?;
    let m = upper.len();
    if front.is_empty() {
        return Err(Error::config(format!("{id}: empty reference front")));
    }
    let ideal: Vec<f64> = (0..m)
        .map(|k| front.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min))
        .collect();
    ObjectiveBox::new(ideal, upper)
}

/// Serializes a suite's metadata file from `(problem, upper)` rows.
pub fn box_file_text(suite: Suite, rows: &[(BenchmarkId, Vec<f64>)]) -> String {
    let file = BoxFile {
        version: BOX_FILE_VERSION,
        suite: suite.label().to_string(),
        upper: rows.iter().map(|(id, b)| (id.to_string(), b.clone())).collect(),
    };
    serde_json::to_string_pretty(&file).unwrap_or_default()
}

fn dedup_nondominated(mut pts: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    pts.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    pts.dedup();
    let keep = nondominated_indices(&pts);
    keep.into_iter().map(|i| pts[i].clone()).collect()
}

fn grid(s: usize) -> impl Iterator<Item = f64> + Clone {
    let d = (s.max(2) - 1) as f64;
    (0..s.max(2)).map(move |i| i as f64 / d)
}

fn zdt6_min_f1() -> f64 {
    // f1 = 1 - exp(-4x) sin^6(6 pi x) is minimal near the first peak of sin.
    let f = |x: f64| 1.0 - (-4.0 * x).exp() * (6.0 * PI * x).sin().powi(6);
    let (mut a, mut b) = (0.0, 1.0 / 6.0);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let c = b - phi * (b - a);
        let d = a + phi * (b - a);
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    f(0.5 * (a + b))
}

/// Front point for a scalar front parameter `t` in `[0, 1]` (two objectives).
fn curve_point(id: BenchmarkId, t: f64) -> Vec<f64> {
    match (id.suite, id.index) {
        (Suite::Zdt, 1) | (Suite::Zdt, 4) => vec![t, 1.0 - t.sqrt()],
        (Suite::Zdt, 2) => vec![t, 1.0 - t * t],
        (Suite::Zdt, 3) => vec![t, 1.0 - t.sqrt() - t * (10.0 * PI * t).sin()],
        (Suite::Zdt, 6) => {
            let lo = zdt6_min_f1();
            let f1 = lo + (1.0 - lo) * t;
            vec![f1, 1.0 - f1 * f1]
        }
        (Suite::Dtlz, 1) => vec![0.5 * t, 0.5 * (1.0 - t)],
        (Suite::Dtlz, 7) => vec![t, 2.0 * (2.0 - t / 2.0 * (1.0 + (3.0 * PI * t).sin()))],
        (Suite::Dtlz, _) => {
            let a = t * FRAC_PI_2;
            vec![a.cos(), a.sin()]
        }
        (Suite::Uf, 7) => vec![t, 1.0 - t],
        (Suite::Uf, i) => uf::front_point(i, t, 0.0),
        _ => unreachable!(),
    }
}

/// Samples the true front of `id` with at least `count` points where the
/// front is continuous. Discrete fronts (ZDT5, UF5) return all their points.
pub fn sample_reference_front(id: BenchmarkId, count: usize) -> Result<ReferenceFront> {
    if count < 100 {
        return Err(Error::contract(format!("front sample count {count} < 100")));
    }
    let m = id.dimensions().1;
    let points = match (id.suite, id.index) {
        (Suite::Zdt, 5) => (0..=30)
            .map(|u| {
                let f1 = 1.0 + u as f64;
                vec![f1, 10.0 / f1]
            })
            .collect(),
        (Suite::Uf, 5) => (0..=20)
            .map(|i| {
                let f1 = i as f64 / 20.0;
                vec![f1, 1.0 - f1]
            })
            .collect(),
        (Suite::Wfg, 3) => dedup_nondominated(
            grid(count)
                .map(|u| wfg::objectives_from_position(3, &wfg::optimal_position(3, &[u, 0.5]), 0.0))
                .collect(),
        ),
        _ if m == 2 => grow(count, count, |s| grid(s).map(|t| curve_point(id, t)).collect()),
        _ => {
            let surface = |u1: f64, u2: f64| match id.suite {
                Suite::Wfg => wfg::objectives_from_position(id.index, &wfg::optimal_position(id.index, &[u1, u2]), 0.0),
                _ => uf::front_point(id.index, u1, u2),
            };
            let side = (count as f64).sqrt().ceil() as usize;
            grow(side, count, |s| {
                let g = grid(s);
                g.clone().flat_map(|a| g.clone().map(move |b| surface(a, b))).collect()
            })
        }
    };
    Ok(ReferenceFront {
        name: id.to_string(),
        m,
        points,
    })
}

/// Re-samples with a denser grid until the filtered front has `need` points.
fn grow(start: usize, need: usize, sample: impl Fn(usize) -> Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let mut s = start;
    loop {
        let pts = dedup_nondominated(sample(s));
        if pts.len() >= need || s > 64 * start {
            return pts;
        }
        s = s * 3 / 2 + 1;
    }
}

/// Estimates the maximum of each objective over the decision space.
///
/// Random sampling is followed by coordinate-wise grid ascent from the best
/// samples, then a shrinking pattern search. Used offline to derive the shipped objective-box metadata.
pub fn derive_upper_bounds(id: BenchmarkId, samples: usize, seed: u64) -> Vec<f64> {
    let bench = Benchmark::new(id);
    let bounds = bench.bounds().to_vec();
    let m = bench.num_objectives();
    let mut rng = crate::rng::seeded(seed);
    let mut best: Vec<(f64, Vec<f64>)> = vec![(f64::NEG_INFINITY, Vec::new()); m];
    let consider = |x: Vec<f64>, best: &mut Vec<(f64, Vec<f64>)>| {
        let f = bench.evaluate(&x);
        for k in 0..m {
            if f[k] > best[k].0 {
                best[k] = (f[k], x.clone());
            }
        }
    };
    for _ in 0..samples {
        let x: Vec<f64> = bounds.iter().map(|&(l, u)| rng.gen_range(l..=u)).collect();
        consider(x, &mut best);
    }
    for corner in [0.0, 1.0] {
        let x: Vec<f64> = bounds.iter().map(|&(l, u)| l + corner * (u - l)).collect();
        consider(x, &mut best);
    }
    let steps = 201;
    for k in 0..m {
        let mut x = best[k].1.clone();
        let mut val = best[k].0;
        for _sweep in 0..6 {
            for d in 0..x.len() {
                let (l, u) = bounds[d];
                for s in 0..steps {
                    let old = x[d];
                    x[d] = l + (u - l) * s as f64 / (steps - 1) as f64;
                    let f = bench.evaluate(&x)[k];
                    if f > val {
                        val = f;
                    } else {
                        x[d] = old;
                    }
                }
            }
        }
        let mut step: Vec<f64> = bounds.iter().map(|&(l, u)| (u - l) / (steps - 1) as f64).collect();
        for _ in 0..60 {
            for d in 0..x.len() {
                let (l, u) = bounds[d];
                for dir in [-1.0, 1.0] {
                    let old = x[d];
                    x[d] = (old + dir * step[d]).clamp(l, u);
                    let f = bench.evaluate(&x)[k];
                    if f > val {
                        val = f;
                    } else {
                        x[d] = old;
                    }
                }
            }
            step.iter_mut().for_each(|s| *s *= 0.8);
        }
        best[k].0 = val;
    }
    best.into_iter().map(|(v, _)| v).collect()
}

/// Rounds a derived maximum up to one decimal after a relative safety margin.
pub fn round_up_bound(v: f64, margin: f64) -> f64 {
    let padded = v + margin * v.abs().max(1.0);
    (padded * 10.0).ceil() / 10.0
}

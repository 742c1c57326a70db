//! Benchmark multi-objective problems.
//!
//! The [`Problem`] trait is the pluggable interface used by every engine;
//! [`Benchmark`] implements it for ZDT1-6, DTLZ1-7, WFG1-9 and UF1-10 at
//! fixed dimensions. Reference fronts and objective boxes are produced by
//! [`front`] and cached per process through [`spec`].

mod dtlz;
pub mod front;
mod uf;
mod wfg;
mod zdt;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use front::{ObjectiveBox, ReferenceFront};
pub use zdt::{BinaryGenome, ZDT5_LAYOUT};

/// A box-constrained multi-objective minimization problem.
pub trait Problem: Send + Sync {
    fn name(&self) -> String;
    fn num_objectives(&self) -> usize;
    /// Length of the real decision vector seen by the variation operators.
    fn num_variables(&self) -> usize;
    /// Per-variable `(lower, upper)` bounds.
    fn bounds(&self) -> &[(f64, f64)];
    /// Evaluates an in-bounds decision vector.
    fn evaluate(&self, x: &[f64]) -> Vec<f64>;

    /// [`Problem::evaluate`] with the length and bound checks made explicit.
    fn try_evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.num_variables() {
            return Err(Error::contract(format!(
                "{} expects {} variables, got {}",
                self.name(),
                self.num_variables(),
                x.len()
            )));
        }
        for (i, (&v, &(lo, hi))) in x.iter().zip(self.bounds()).enumerate() {
            if !(lo..=hi).contains(&v) {
                return Err(Error::contract(format!(
                    "{}: x[{i}] = {v} outside [{lo}, {hi}]",
                    self.name()
                )));
            }
        }
        Ok(self.evaluate(x))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Suite {
    Zdt,
    Dtlz,
    Wfg,
    Uf,
}

impl Suite {
    pub fn label(self) -> &'static str {
        match self {
            Suite::Zdt => "ZDT",
            Suite::Dtlz => "DTLZ",
            Suite::Wfg => "WFG",
            Suite::Uf => "UF",
        }
    }

    fn max_index(self) -> u8 {
        match self {
            Suite::Zdt => 6,
            Suite::Dtlz => 7,
            Suite::Wfg => 9,
            Suite::Uf => 10,
        }
    }
}

/// One of the implemented benchmark problems, e.g. `ZDT1` or `WFG4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BenchmarkId {
    pub suite: Suite,
    pub index: u8,
}

impl BenchmarkId {
    pub fn new(suite: Suite, index: u8) -> Result<Self> {
        if index == 0 || index > suite.max_index() {
            return Err(Error::Unsupported(format!("{}{index}", suite.label())));
        }
        Ok(Self { suite, index })
    }

    /// Every implemented problem in suite order.
    pub fn all() -> Vec<BenchmarkId> {
        [Suite::Zdt, Suite::Dtlz, Suite::Wfg, Suite::Uf]
            .into_iter()
            .flat_map(|s| (1..=s.max_index()).map(move |i| BenchmarkId { suite: s, index: i }))
            .collect()
    }

    /// `(n, m)` as fixed for the benchmark.
    pub fn dimensions(self) -> (usize, usize) {
        match (self.suite, self.index) {
            (Suite::Zdt, 1..=3) => (30, 2),
            (Suite::Zdt, 4) | (Suite::Zdt, 6) => (10, 2),
            (Suite::Zdt, _) => (11, 2),
            (Suite::Dtlz, _) => (11, 2),
            (Suite::Wfg, _) => (12, 3),
            (Suite::Uf, 1..=7) => (30, 2),
            (Suite::Uf, _) => (30, 3),
        }
    }

    pub fn is_binary(self) -> bool {
        self.suite == Suite::Zdt && self.index == 5
    }
}

impl fmt::Display for BenchmarkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.suite.label(), self.index)
    }
}

impl FromStr for BenchmarkId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let upper = s.trim().to_ascii_uppercase();
        let split = upper
            .find(|c: char| c.is_ascii_digit())
            .ok_or_else(|| Error::Unsupported(s.to_string()))?;
        let (prefix, digits) = upper.split_at(split);
        let suite = match prefix {
            "ZDT" => Suite::Zdt,
            "DTLZ" => Suite::Dtlz,
            "WFG" => Suite::Wfg,
            "UF" => Suite::Uf,
            _ => return Err(Error::Unsupported(s.to_string())),
        };
        let index: u8 = digits.parse().map_err(|_| Error::Unsupported(s.to_string()))?;
        BenchmarkId::new(suite, index)
    }
}

impl Serialize for BenchmarkId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BenchmarkId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A benchmark problem instance.
#[derive(Debug, Clone)]
pub struct Benchmark {
    id: BenchmarkId,
    n: usize,
    m: usize,
    bounds: Vec<(f64, f64)>,
}

impl Benchmark {
    pub fn new(id: BenchmarkId) -> Self {
        let (n, m) = id.dimensions();
        let bounds = match id.suite {
            Suite::Zdt => zdt::bounds(id.index, n),
            Suite::Dtlz => vec![(0.0, 1.0); n],
            Suite::Wfg => (1..=n).map(|i| (0.0, 2.0 * i as f64)).collect(),
            Suite::Uf => uf::bounds(id.index, n),
        };
        Self { id, n, m, bounds }
    }

    /// Builds a benchmark, rejecting any dimensions other than the fixed ones.
    pub fn with_dimensions(id: BenchmarkId, n: usize, m: usize) -> Result<Self> {
        let (dn, dm) = id.dimensions();
        if (n, m) != (dn, dm) {
            return Err(Error::config(format!(
                "{id} is defined with n={dn}, m={dm}; got n={n}, m={m}"
            )));
        }
        Ok(Self::new(id))
    }

    pub fn id(&self) -> BenchmarkId {
        self.id
    }

    /// Decision dimension as listed for the suite (11 substrings for ZDT5).
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Evaluates ZDT5 on its binary genotype.
    pub fn evaluate_bits(&self, genome: &BinaryGenome) -> Result<Vec<f64>> {
        if !self.id.is_binary() {
            return Err(Error::contract(format!("{} is real-coded", self.id)));
        }
        genome.check_layout()?;
        Ok(zdt::zdt5_bits(genome))
    }
}

impl Problem for Benchmark {
    fn name(&self) -> String {
        self.id.to_string()
    }

    fn num_objectives(&self) -> usize {
        self.m
    }

    fn num_variables(&self) -> usize {
        self.bounds.len()
    }

    fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    fn evaluate(&self, x: &[f64]) -> Vec<f64> {
        match self.id.suite {
            Suite::Zdt => zdt::evaluate(self.id.index, x),
            Suite::Dtlz => dtlz::evaluate(self.id.index, x, self.m),
            Suite::Wfg => wfg::evaluate(self.id.index, x, self.m, 4),
            Suite::Uf => uf::evaluate(self.id.index, x),
        }
    }
}

/// Static description of a problem: dimensions, bounds, sampled true front
/// and the objective box used by the hypervolume ratios.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub name: String,
    pub m: usize,
    pub n: usize,
    pub bounds: Vec<(f64, f64)>,
    pub reference_front: Vec<Vec<f64>>,
    pub objective_box: ObjectiveBox,
}

/// Number of front samples requested for cached specs.
pub const DEFAULT_FRONT_SAMPLES: usize = 1000;

/// Cached [`ProblemSpec`] for a benchmark (front sampled once per process).
pub fn spec(id: BenchmarkId) -> Result<Arc<ProblemSpec>> {
    static CACHE: OnceLock<Mutex<HashMap<BenchmarkId, Arc<ProblemSpec>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(s) = cache.lock().unwrap_or_else(|e| e.into_inner()).get(&id) {
        return Ok(s.clone());
    }
    let built = Arc::new(build_spec(id)?);
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    Ok(guard.entry(id).or_insert(built).clone())
}

fn build_spec(id: BenchmarkId) -> Result<ProblemSpec> {
    let bench = Benchmark::new(id);
    let front = front::sample_reference_front(id, DEFAULT_FRONT_SAMPLES)?;
    let objective_box = front::objective_box(id, &front.points)?;
    Ok(ProblemSpec {
        name: id.to_string(),
        m: bench.num_objectives(),
        n: bench.dim(),
        bounds: bench.bounds().to_vec(),
        reference_front: front.points,
        objective_box,
    })
}

/// Evaluates `id` at `x` with full contract checks.
pub fn evaluate(id: BenchmarkId, x: &[f64]) -> Result<Vec<f64>> {
    Benchmark::new(id).try_evaluate(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_parse_and_print() {
        for id in BenchmarkId::all() {
            assert_eq!(id.to_string().parse::<BenchmarkId>().unwrap(), id);
        }
        assert_eq!(BenchmarkId::all().len(), 32);
        assert!("ZDT7".parse::<BenchmarkId>().is_err());
        assert!("MaOP1".parse::<BenchmarkId>().is_err());
        assert_eq!("wfg4".parse::<BenchmarkId>().unwrap().to_string(), "WFG4");
    }

    #[test]
    fn dimensions_are_fixed() {
        let zdt1: BenchmarkId = "ZDT1".parse().unwrap();
        assert!(Benchmark::with_dimensions(zdt1, 30, 2).is_ok());
        assert!(Benchmark::with_dimensions(zdt1, 10, 2).is_err());
        assert!(Benchmark::with_dimensions("WFG1".parse().unwrap(), 12, 2).is_err());
        let expect = [
            ("ZDT4", 10, 2),
            ("ZDT5", 11, 2),
            ("ZDT6", 10, 2),
            ("DTLZ7", 11, 2),
            ("WFG9", 12, 3),
            ("UF7", 30, 2),
            ("UF8", 30, 3),
        ];
        for (name, n, m) in expect {
            let b = Benchmark::new(name.parse().unwrap());
            assert_eq!((b.dim(), b.num_objectives()), (n, m), "{name}");
        }
    }

    #[test]
    fn try_evaluate_rejects_bad_input() {
        let b = Benchmark::new("ZDT1".parse().unwrap());
        assert!(b.try_evaluate(&[0.5; 29]).is_err());
        let mut x = vec![0.0; 30];
        x[3] = 1.5;
        assert!(matches!(b.try_evaluate(&x), Err(Error::Contract(_))));
    }

    #[test]
    fn evaluation_is_deterministic() {
        use rand::Rng;
        let mut rng = crate::rng::seeded(11);
        for id in BenchmarkId::all() {
            let b = Benchmark::new(id);
            let x: Vec<f64> = b.bounds().iter().map(|&(l, u)| rng.gen_range(l..=u)).collect();
            let a = b.evaluate(&x);
            let c = b.evaluate(&x);
            assert_eq!(
                a.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
                c.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
            );
            assert_eq!(a.len(), b.num_objectives());
            assert!(a.iter().all(|v| v.is_finite()), "{id}: {a:?}");
        }
    }
}

//! Variation operators.
//!
//! Every operator takes an explicit random stream, so replaying a seed
//! replays the offspring bit for bit. Pure helpers such as [`sbx_beta`] and
//! [`pm_delta`] expose the scalar formulas for testing.

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problems::BinaryGenome;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SbxParams {
    pub eta: f64,
    /// Crossover probability.
    #[serde(default = "one")]
    pub p_c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PmParams {
    pub eta: f64,
    /// Per-variable mutation probability, usually `1 / n`.
    pub p_m: f64,
}

fn one() -> f64 {
    1.0
}

impl SbxParams {
    pub fn new(eta: f64) -> Self {
        Self { eta, p_c: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta >= 1.0) || !(0.0..=1.0).contains(&self.p_c) {
            return Err(Error::config(format!("invalid SBX parameters {self:?}")));
        }
        Ok(())
    }
}

impl PmParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta >= 1.0) || !(self.p_m > 0.0 && self.p_m <= 1.0) {
            return Err(Error::config(format!("invalid PM parameters {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeVariant {
    RandP,
    BestP,
    CurrentToRandP,
    CurrentToBestP,
}

impl DeVariant {
    /// Whether the base vector is a random donor (as opposed to a front member).
    pub fn uses_random_base(self) -> bool {
        matches!(self, DeVariant::RandP | DeVariant::CurrentToRandP)
    }

    pub fn is_current_to(self) -> bool {
        matches!(self, DeVariant::CurrentToRandP | DeVariant::CurrentToBestP)
    }

    pub fn label(self) -> &'static str {
        match self {
            DeVariant::RandP => "rand",
            DeVariant::BestP => "best",
            DeVariant::CurrentToRandP => "current-to-rand",
            DeVariant::CurrentToBestP => "current-to-best",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeParams {
    pub variant: DeVariant,
    pub f: f64,
    /// Blend factor of the current-to-* variants.
    #[serde(default)]
    pub k: f64,
    /// Number of difference pairs.
    pub p: usize,
    pub cr: f64,
}

impl DeParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::config(format!("DE {what} out of range in {self:?}")));
        if !(self.f > 0.0 && self.f <= 2.0) {
            return bad("F");
        }
        if !(self.cr > 0.0 && self.cr <= 1.0) {
            return bad("CR");
        }
        if self.variant.is_current_to() {
            if !(self.k > 0.0 && self.k <= 1.0) {
                return bad("K");
            }
            if self.p != 1 {
                return bad("p (current-to variants take p = 1)");
            }
        } else if !(1..=2).contains(&self.p) {
            return bad("p");
        }
        Ok(())
    }

    /// Number of random donors drawn per trial vector.
    pub fn donor_count(&self) -> usize {
        2 * self.p + usize::from(self.variant.uses_random_base())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PsoMutation {
    Smpso { eta_pm: f64, constriction: bool },
    Omopso { b: f64 },
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsoParams {
    pub w: f64,
    pub c1: f64,
    pub c2: f64,
    /// Velocity cap as a ratio of each variable's range.
    pub v_max: f64,
    /// Velocity factor on boundary contact: the component is multiplied by `-v_change`.
    pub v_change: f64,
    pub mutation: PsoMutation,
    /// Archive grid divisions per objective.
    pub grid_divisions: usize,
}

pub const V_CHANGE_CHOICES: [f64; 5] = [1.0, 0.1, 0.01, 0.001, -1.0];

impl PsoParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::config(format!("PSO {what} out of range in {self:?}")));
        if !(0.0..=1.0).contains(&self.w) {
            return bad("w");
        }
        if !(0.5..=2.5).contains(&self.c1) || !(0.5..=2.5).contains(&self.c2) {
            return bad("C1/C2");
        }
        if !(0.5..=10.0).contains(&self.v_max) {
            return bad("Vmax");
        }
        if !V_CHANGE_CHOICES.contains(&self.v_change) {
            return bad("Vchange");
        }
        if !(5..=20).contains(&self.grid_divisions) {
            return bad("M");
        }
        match self.mutation {
            PsoMutation::Smpso { eta_pm, .. } if !(1.0..=100.0).contains(&eta_pm) => bad("PMn"),
            PsoMutation::Omopso { b } if !(1.0..=20.0).contains(&b) => bad("b"),
            _ => Ok(()),
        }
    }

    /// Constriction factor applied to the velocity, 1 when disabled.
    pub fn constriction(&self) -> f64 {
        match self.mutation {
            PsoMutation::Smpso { constriction: true, .. } => constriction_factor(self.c1, self.c2),
            _ => 1.0,
        }
    }
}

pub fn constriction_factor(c1: f64, c2: f64) -> f64 {
    let phi = (c1 + c2).max(4.0);
    2.0 / (2.0 - phi - (phi * phi - 4.0 * phi).sqrt()).abs()
}

fn check_len(a: &[f64], b: &[f64], bounds: &[(f64, f64)]) -> Result<()> {
    if a.len() != b.len() || a.len() != bounds.len() {
        return Err(Error::contract(format!(
            "length mismatch: {} / {} / {} bounds",
            a.len(),
            b.len(),
            bounds.len()
        )));
    }
    Ok(())
}

/// Spread factor for a uniform draw `r`.
pub fn sbx_beta(r: f64, eta: f64) -> f64 {
    if r <= 0.5 {
        (2.0 * r).powf(1.0 / (1.0 + eta))
    } else {
        (1.0 / (2.0 - 2.0 * r)).powf(1.0 / (1.0 + eta))
    }
}

pub fn sbx_pair(x1: f64, x2: f64, beta: f64) -> (f64, f64) {
    (
        0.5 * ((1.0 + beta) * x1 + (1.0 - beta) * x2),
        0.5 * ((1.0 - beta) * x1 + (1.0 + beta) * x2),
    )
}

/// Simulated binary crossover on every dimension, clamped to bounds.
///
/// The two offspring values of each dimension are exchanged with
/// probability one half, so each child mixes genes of both parents.
pub fn sbx_crossover<R: Rng + ?Sized>(
    x1: &[f64],
    x2: &[f64],
    params: &SbxParams,
    bounds: &[(f64, f64)],
    rng: &mut R,
) -> Result<(Vec<f64>, Vec<f64>)> {
    check_len(x1, x2, bounds)?;
    if rng.gen::<f64>() >= params.p_c {
        return Ok((x1.to_vec(), x2.to_vec()));
    }
    let mut c1 = Vec::with_capacity(x1.len());
    let mut c2 = Vec::with_capacity(x1.len());
    for ((&a, &b), &(l, u)) in x1.iter().zip(x2).zip(bounds) {
        let beta = sbx_beta(rng.gen(), params.eta);
        let (mut y1, mut y2) = sbx_pair(a, b, beta);
        if rng.gen::<bool>() {
            std::mem::swap(&mut y1, &mut y2);
        }
        c1.push(y1.clamp(l, u));
        c2.push(y2.clamp(l, u));
    }
    Ok((c1, c2))
}

/// Polynomial perturbation in units of the variable range.
pub fn pm_delta(x: f64, l: f64, u: f64, r: f64, eta: f64) -> f64 {
    let e = eta + 1.0;
    if r <= 0.5 {
        let d1 = (u - x) / (u - l);
        (2.0 * r + (1.0 - 2.0 * r) * d1.powf(e)).powf(1.0 / e) - 1.0
    } else {
        let d2 = (x - l) / (u - l);
        1.0 - (2.0 * (1.0 - r) + 2.0 * (r - 0.5) * d2.powf(e)).powf(1.0 / e)
    }
}

pub fn polynomial_mutation<R: Rng + ?Sized>(
    x: &[f64],
    params: &PmParams,
    bounds: &[(f64, f64)],
    rng: &mut R,
) -> Result<Vec<f64>> {
    check_len(x, x, bounds)?;
    Ok(x.iter()
        .zip(bounds)
        .map(|(&v, &(l, u))| {
            if rng.gen::<f64>() < params.p_m && u > l {
                let r: f64 = rng.gen();
                (v + pm_delta(v, l, u, r, params.eta) * (u - l)).clamp(l, u)
            } else {
                v
            }
        })
        .collect())
}

/// Draws `count` distinct entries of `pool`, skipping `exclude`.
pub fn pick_donors<R: Rng + ?Sized>(pool: &[usize], exclude: usize, count: usize, rng: &mut R) -> Result<Vec<usize>> {
    let mut candidates: Vec<usize> = pool.iter().copied().filter(|&i| i != exclude).collect();
    candidates.sort_unstable();
    candidates.dedup();
    if candidates.len() < count {
        return Err(Error::contract(format!(
            "DE needs {count} distinct donors besides the target, pool has {}",
            candidates.len()
        )));
    }
    Ok(index::sample(rng, candidates.len(), count)
        .into_iter()
        .map(|i| candidates[i])
        .collect())
}

/// DE trial vector.
///
/// `donors` holds `x^{r3}` first for the random-base variants, followed by
/// the `p` difference pairs. `best` is required by the best-based variants.
pub fn de_mutation<R: Rng + ?Sized>(
    target: &[f64],
    donors: &[&[f64]],
    best: Option<&[f64]>,
    params: &DeParams,
    bounds: &[(f64, f64)],
    rng: &mut R,
) -> Result<Vec<f64>> {
    if donors.len() != params.donor_count() {
        return Err(Error::contract(format!(
            "{} DE expects {} donors, got {}",
            params.variant.label(),
            params.donor_count(),
            donors.len()
        )));
    }
    let (base, pairs) = if params.variant.uses_random_base() {
        (donors[0], &donors[1..])
    } else {
        let best = best.ok_or_else(|| Error::contract("best-based DE requires a best vector"))?;
        (best, donors)
    };
    for d in donors.iter().chain(std::iter::once(&base)) {
        check_len(target, d, bounds)?;
    }
    let n = target.len();
    let j_r = rng.gen_range(0..n);
    let mut trial = Vec::with_capacity(n);
    for j in 0..n {
        let r: f64 = rng.gen();
        let v = if r <= params.cr || j == j_r {
            let diff: f64 = pairs.chunks(2).map(|p| p[0][j] - p[1][j]).sum();
            let head = match params.variant {
                DeVariant::RandP | DeVariant::BestP => base[j],
                _ => target[j] + params.k * (base[j] - target[j]),
            };
            head + params.f * diff
        } else {
            target[j]
        };
        let (l, u) = bounds[j];
        trial.push(v.clamp(l, u));
    }
    Ok(trial)
}

/// Velocity before the cap and boundary handling, for given scalar draws.
pub fn pso_velocity(
    x: &[f64],
    v: &[f64],
    pbest: &[f64],
    gbest: &[f64],
    params: &PsoParams,
    r1: f64,
    r2: f64,
) -> Vec<f64> {
    let chi = params.constriction();
    (0..x.len())
        .map(|j| chi * (params.w * v[j] + params.c1 * r1 * (pbest[j] - x[j]) + params.c2 * r2 * (gbest[j] - x[j])))
        .collect()
}

/// Moves one particle: returns `(velocity, position)`.
pub fn pso_update<R: Rng + ?Sized>(
    x: &[f64],
    v: &[f64],
    pbest: &[f64],
    gbest: &[f64],
    params: &PsoParams,
    bounds: &[(f64, f64)],
    rng: &mut R,
) -> Result<(Vec<f64>, Vec<f64>)> {
    check_len(x, v, bounds)?;
    check_len(pbest, gbest, bounds)?;
    let (r1, r2) = (rng.gen::<f64>(), rng.gen::<f64>());
    let mut vel = pso_velocity(x, v, pbest, gbest, params, r1, r2);
    let mut pos = Vec::with_capacity(x.len());
    for j in 0..x.len() {
        let (l, u) = bounds[j];
        let cap = params.v_max * (u - l);
        vel[j] = vel[j].clamp(-cap, cap);
        let mut p = x[j] + vel[j];
        if p < l || p > u {
            p = p.clamp(l, u);
            vel[j] *= -params.v_change;
        }
        pos.push(p);
    }
    Ok((vel, pos))
}

/// OMOPSO uniform mutation: each variable, with probability `p_m`, moves by
/// `(2r - 1) * b * (u - l) / 100`.
pub fn uniform_mutation<R: Rng + ?Sized>(x: &[f64], b: f64, p_m: f64, bounds: &[(f64, f64)], rng: &mut R) -> Vec<f64> {
    x.iter()
        .zip(bounds)
        .map(|(&v, &(l, u))| {
            if rng.gen::<f64>() < p_m {
                let r: f64 = rng.gen();
                (v + (2.0 * r - 1.0) * b * (u - l) / 100.0).clamp(l, u)
            } else {
                v
            }
        })
        .collect()
}

/// Michalewicz non-uniform mutation whose step shrinks as `gen` nears `max_gen`.
pub fn non_uniform_mutation<R: Rng + ?Sized>(
    x: &[f64],
    gen: usize,
    max_gen: usize,
    p_m: f64,
    bounds: &[(f64, f64)],
    rng: &mut R,
) -> Vec<f64> {
    const SHAPE: f64 = 5.0;
    let frac = if max_gen == 0 {
        1.0
    } else {
        (gen as f64 / max_gen as f64).min(1.0)
    };
    let step = |y: f64, r: f64| y * (1.0 - r.powf((1.0 - frac).powf(SHAPE)));
    x.iter()
        .zip(bounds)
        .map(|(&v, &(l, u))| {
            if rng.gen::<f64>() < p_m {
                let up = rng.gen::<bool>();
                let r: f64 = rng.gen();
                if up {
                    (v + step(u - v, r)).clamp(l, u)
                } else {
                    (v - step(v - l, r)).clamp(l, u)
                }
            } else {
                v
            }
        })
        .collect()
}

/// Applies the swarm's mutation scheme to particle `i`.
pub fn pso_mutate<R: Rng + ?Sized>(
    i: usize,
    x: &[f64],
    params: &PsoParams,
    gen: usize,
    max_gen: usize,
    bounds: &[(f64, f64)],
    rng: &mut R,
) -> Vec<f64> {
    let p_m = 1.0 / x.len().max(1) as f64;
    match params.mutation {
        PsoMutation::Smpso { eta_pm, .. } if i.is_multiple_of(6) => {
            let pm = PmParams { eta: eta_pm, p_m };
            polynomial_mutation(x, &pm, bounds, rng).unwrap_or_else(|_| x.to_vec())
        }
        PsoMutation::Omopso { b } => match i % 3 {
            0 => uniform_mutation(x, b, p_m, bounds, rng),
            1 => non_uniform_mutation(x, gen, max_gen, p_m, bounds, rng),
            _ => x.to_vec(),
        },
        _ => x.to_vec(),
    }
}

/// One-point crossover inside each substring: the first `cut` bits of each
/// substring are exchanged, so all-zero cuts return the parents.
pub fn substring_crossover(a: &BinaryGenome, b: &BinaryGenome, cuts: &[usize]) -> Result<(BinaryGenome, BinaryGenome)> {
    a.check_layout()?;
    if a.layout != b.layout || a.bits.len() != b.bits.len() {
        return Err(Error::contract("binary parents have different layouts"));
    }
    let ranges = a.substrings();
    if cuts.len() != ranges.len() {
        return Err(Error::contract(format!(
            "{} cuts for {} substrings",
            cuts.len(),
            ranges.len()
        )));
    }
    let (mut c1, mut c2) = (a.clone(), b.clone());
    for (r, &cut) in ranges.iter().zip(cuts) {
        if cut > r.len() {
            return Err(Error::contract(format!("cut {cut} beyond substring of {}", r.len())));
        }
        for i in r.start..r.start + cut {
            c1.bits[i] = b.bits[i];
            c2.bits[i] = a.bits[i];
        }
    }
    Ok((c1, c2))
}

pub fn bit_flip<R: Rng + ?Sized>(g: &mut BinaryGenome, p: f64, rng: &mut R) {
    for bit in &mut g.bits {
        if rng.gen::<f64>() < p {
            *bit = !*bit;
        }
    }
}

/// Substring crossover at random cuts followed by bit flips at rate `1 / bits`.
pub fn binary_variation<R: Rng + ?Sized>(
    a: &BinaryGenome,
    b: &BinaryGenome,
    rng: &mut R,
) -> Result<(BinaryGenome, BinaryGenome)> {
    let cuts: Vec<usize> = a.layout.iter().map(|&len| rng.gen_range(0..=len)).collect();
    let (mut c1, mut c2) = substring_crossover(a, b, &cuts)?;
    let p = 1.0 / a.bits.len().max(1) as f64;
    bit_flip(&mut c1, p, rng);
    bit_flip(&mut c2, p, rng);
    Ok((c1, c2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn sbx_identity_and_symmetry() {
        assert_eq!(sbx_beta(0.5, 7.0), 1.0);
        assert_eq!(sbx_pair(0.3, 0.9, 1.0), (0.3, 0.9));
        let (a, b) = sbx_pair(0.4, 0.4, 1.7);
        assert!((a - 0.4).abs() < 1e-15 && (b - 0.4).abs() < 1e-15);
    }

    #[test]
    fn sbx_hand_example() {
        let beta = sbx_beta(0.2, 1.0);
        assert!((beta - 0.4f64.sqrt()).abs() < 1e-15);
        let (c1, c2) = sbx_pair(0.0, 1.0, beta);
        assert!((c1 - 0.1838).abs() < 1e-4, "{c1}");
        assert!((c2 - 0.8162).abs() < 1e-4, "{c2}");
    }

    #[test]
    fn pm_at_lower_bound_with_low_r_is_still() {
        for r in [0.0, 0.1, 0.5] {
            assert!(pm_delta(0.0, 0.0, 1.0, r, 20.0).abs() < 1e-15);
        }
        let x = vec![0.2, 0.7];
        let pm = PmParams { eta: 20.0, p_m: 0.0 };
        let out = polynomial_mutation(&x, &pm, &[(0.0, 1.0); 2], &mut seeded(1)).unwrap();
        assert_eq!(out, x);
    }

    #[test]
    fn pm_midpoint_matches_scalar() {
        // r = 0.5, x = 0.5 on [0, 1], eta = 20: (1 + 0 * ...)^(1/21) - 1 = 0.
        assert!(pm_delta(0.5, 0.0, 1.0, 0.5, 20.0).abs() < 1e-15);
        let expect = (2.0 * 0.25 + 0.5 * 0.5f64.powi(21)).powf(1.0 / 21.0) - 1.0;
        assert!((pm_delta(0.5, 0.0, 1.0, 0.25, 20.0) - expect).abs() < 1e-15);
    }

    #[test]
    fn de_rand1_example() {
        let p = DeParams {
            variant: DeVariant::RandP,
            f: 0.5,
            k: 0.0,
            p: 1,
            cr: 1.0,
        };
        let donors: [&[f64]; 3] = [&[0.2], &[0.6], &[0.1]];
        let t = de_mutation(&[0.9], &donors, None, &p, &[(0.0, 1.0)], &mut seeded(0)).unwrap();
        assert!((t[0] - 0.45).abs() < 1e-15);
    }

    #[test]
    fn de_zero_f_copies_base() {
        let p = DeParams {
            variant: DeVariant::RandP,
            f: 0.0,
            k: 0.0,
            p: 1,
            cr: 1.0,
        };
        let donors: [&[f64]; 3] = [&[0.2, 0.3], &[0.6, 0.1], &[0.1, 0.9]];
        let t = de_mutation(&[0.9, 0.9], &donors, None, &p, &[(0.0, 1.0); 2], &mut seeded(0)).unwrap();
        assert_eq!(t, vec![0.2, 0.3]);
    }

    #[test]
    fn de_errors() {
        let p = DeParams {
            variant: DeVariant::BestP,
            f: 0.5,
            k: 0.0,
            p: 1,
            cr: 1.0,
        };
        let donors: [&[f64]; 2] = [&[0.6], &[0.1]];
        assert!(de_mutation(&[0.9], &donors, None, &p, &[(0.0, 1.0)], &mut seeded(0)).is_err());
        assert!(de_mutation(&[0.9], &donors[..1], Some(&[0.5]), &p, &[(0.0, 1.0)], &mut seeded(0)).is_err());
        assert!(pick_donors(&[0, 1, 2], 0, 3, &mut seeded(0)).is_err());
        let d = pick_donors(&[0, 1, 2, 3], 0, 3, &mut seeded(0)).unwrap();
        assert!(!d.contains(&0));
    }

    #[test]
    fn de_validation() {
        let mut p = DeParams {
            variant: DeVariant::CurrentToRandP,
            f: 0.5,
            k: 0.5,
            p: 2,
            cr: 1.0,
        };
        assert!(p.validate().is_err());
        p.p = 1;
        assert!(p.validate().is_ok());
        p.f = 0.0;
        assert!(p.validate().is_err());
    }

    fn pso(w: f64, c: f64) -> PsoParams {
        PsoParams {
            w,
            c1: c,
            c2: c,
            v_max: 10.0,
            v_change: 1.0,
            mutation: PsoMutation::None,
            grid_divisions: 10,
        }
    }

    #[test]
    fn pso_velocity_example() {
        let v = pso_velocity(&[0.0], &[0.2], &[0.1], &[0.3], &pso(0.5, 2.0), 0.5, 0.5);
        assert!((v[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn pso_frozen_swarm() {
        let (v, x) = pso_update(
            &[0.3],
            &[0.7],
            &[0.9],
            &[0.1],
            &pso(0.0, 0.0),
            &[(0.0, 1.0)],
            &mut seeded(4),
        )
        .unwrap();
        assert_eq!((v, x), (vec![0.0], vec![0.3]));
        let same = pso_velocity(&[0.4], &[0.2], &[0.4], &[0.4], &pso(0.6, 2.0), 0.3, 0.9);
        assert!((same[0] - 0.12).abs() < 1e-15);
    }

    #[test]
    fn pso_boundary_reverses_velocity() {
        let mut p = pso(1.0, 0.0);
        p.v_change = 0.1;
        let (v, x) = pso_update(&[0.9], &[0.5], &[0.9], &[0.9], &p, &[(0.0, 1.0)], &mut seeded(0)).unwrap();
        assert_eq!(x, vec![1.0]);
        assert!((v[0] + 0.05).abs() < 1e-15);
        p.v_change = -1.0;
        let (v, _) = pso_update(&[0.9], &[0.5], &[0.9], &[0.9], &p, &[(0.0, 1.0)], &mut seeded(0)).unwrap();
        assert_eq!(v, vec![0.5]);
    }

    #[test]
    fn constriction_standard_values() {
        // phi = 4 gives chi = 2 / |2 - 4 - 0| = 1.
        assert!((constriction_factor(1.0, 1.0) - 1.0).abs() < 1e-15);
        let phi: f64 = 4.1;
        let expect = 2.0 / (2.0 - phi - (phi * phi - 4.0 * phi).sqrt()).abs();
        assert!((constriction_factor(2.05, 2.05) - expect).abs() < 1e-15);
        assert!((expect - 0.7298).abs() < 1e-4);
    }

    #[test]
    fn binary_cut_pattern() {
        let layout = vec![4, 4];
        let a = BinaryGenome::new(vec![false; 8], layout.clone()).unwrap();
        let b = BinaryGenome::new(vec![true; 8], layout.clone()).unwrap();
        let (c1, c2) = substring_crossover(&a, &b, &[1, 3]).unwrap();
        let bits = |g: &BinaryGenome| g.bits.iter().map(|&x| if x { '1' } else { '0' }).collect::<String>();
        assert_eq!(bits(&c1), "10001110");
        assert_eq!(bits(&c2), "01110001");
        let (i1, i2) = substring_crossover(&a, &b, &[0, 0]).unwrap();
        assert_eq!((i1, i2), (a.clone(), b.clone()));
        let other = BinaryGenome::new(vec![true; 8], vec![8]).unwrap();
        assert!(substring_crossover(&a, &other, &[0]).is_err());
    }
}

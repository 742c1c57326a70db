use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Substring lengths of the ZDT5 genotype: one of 30 bits, ten of 5 bits.
pub const ZDT5_LAYOUT: [usize; 11] = [30, 5, 5, 5, 5, 5, 5, 5, 5, 5, 5];

const ZDT5_BITS: usize = 80;

/// A bitstring genotype split into consecutive substrings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryGenome {
    pub bits: Vec<bool>,
    pub layout: Vec<usize>,
}

impl BinaryGenome {
    pub fn new(bits: Vec<bool>, layout: Vec<usize>) -> Result<Self> {
        let g = Self { bits, layout };
        g.check_layout()?;
        Ok(g)
    }

    pub fn zeros(layout: &[usize]) -> Self {
        Self {
            bits: vec![false; layout.iter().sum()],
            layout: layout.to_vec(),
        }
    }

    pub fn check_layout(&self) -> Result<()> {
        let total: usize = self.layout.iter().sum();
        if total != self.bits.len() {
            return Err(Error::contract(format!(
                "layout covers {total} bits but genome has {}",
                self.bits.len()
            )));
        }
        Ok(())
    }

    /// Bit ranges of each substring.
    pub fn substrings(&self) -> Vec<std::ops::Range<usize>> {
        let mut start = 0;
        self.layout
            .iter()
            .map(|&len| {
                let r = start..start + len;
                start += len;
                r
            })
            .collect()
    }

    /// Thresholds a relaxed `[0, 1]` vector at 0.5.
    pub fn from_relaxed(x: &[f64], layout: &[usize]) -> Self {
        Self {
            bits: x.iter().map(|&v| v >= 0.5).collect(),
            layout: layout.to_vec(),
        }
    }

    pub fn to_relaxed(&self) -> Vec<f64> {
        self.bits.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect()
    }
}

pub(super) fn bounds(index: u8, n: usize) -> Vec<(f64, f64)> {
    match index {
        4 => {
            let mut b = vec![(-5.0, 5.0); n];
            b[0] = (0.0, 1.0);
            b
        }
        5 => vec![(0.0, 1.0); ZDT5_BITS],
        _ => vec![(0.0, 1.0); n],
    }
}

fn tail_mean(x: &[f64]) -> f64 {
    x[1..].iter().sum::<f64>() / (x.len() - 1) as f64
}

pub(super) fn evaluate(index: u8, x: &[f64]) -> Vec<f64> {
    let f1 = x[0];
    match index {
        1 => {
            let g = 1.0 + 9.0 * tail_mean(x);
            vec![f1, g * (1.0 - (f1 / g).sqrt())]
        }
        2 => {
            let g = 1.0 + 9.0 * tail_mean(x);
            vec![f1, g * (1.0 - (f1 / g).powi(2))]
        }
        3 => {
            let g = 1.0 + 9.0 * tail_mean(x);
            let r = f1 / g;
            vec![f1, g * (1.0 - r.sqrt() - r * (10.0 * PI * f1).sin())]
        }
        4 => {
            let g = 1.0
                + 10.0 * (x.len() - 1) as f64
                + x[1..].iter().map(|&v| v * v - 10.0 * (4.0 * PI * v).cos()).sum::<f64>();
            vec![f1, g * (1.0 - (f1 / g).sqrt())]
        }
        5 => zdt5_bits(&BinaryGenome::from_relaxed(x, &ZDT5_LAYOUT)),
        6 => {
            let f1 = 1.0 - (-4.0 * x[0]).exp() * (6.0 * PI * x[0]).sin().powi(6);
            let g = 1.0 + 9.0 * tail_mean(x).powf(0.25);
            vec![f1, g * (1.0 - (f1 / g).powi(2))]
        }
        _ => unreachable!("ZDT{index}"),
    }
}

pub(super) fn zdt5_bits(genome: &BinaryGenome) -> Vec<f64> {
    let ranges = genome.substrings();
    let ones = |r: &std::ops::Range<usize>| genome.bits[r.clone()].iter().filter(|&&b| b).count();
    let f1 = 1.0 + ones(&ranges[0]) as f64;
    let g: f64 = ranges[1..]
        .iter()
        .map(|r| {
            let u = ones(r);
            if u < 5 {
                2.0 + u as f64
            } else {
                1.0
            }
        })
        .sum();
    vec![f1, g / f1]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zdt1_corners() {
        assert_eq!(evaluate(1, &[0.0; 30]), vec![0.0, 1.0]);
        let mut x = vec![0.0; 30];
        x[0] = 1.0;
        assert_eq!(evaluate(1, &x), vec![1.0, 0.0]);
    }

    #[test]
    fn zdt5_optimum_and_worst() {
        let mut g = BinaryGenome::zeros(&ZDT5_LAYOUT);
        // all tail substrings saturated: g = 10
        for b in &mut g.bits[30..] {
            *b = true;
        }
        assert_eq!(zdt5_bits(&g), vec![1.0, 10.0]);
        for b in &mut g.bits[..30] {
            *b = true;
        }
        assert_eq!(zdt5_bits(&g), vec![31.0, 10.0 / 31.0]);
        let zero = BinaryGenome::zeros(&ZDT5_LAYOUT);
        assert_eq!(zdt5_bits(&zero), vec![1.0, 20.0]);
    }

    #[test]
    fn relaxed_threshold() {
        let g = BinaryGenome::from_relaxed(&[0.49, 0.5, 0.9], &[3]);
        assert_eq!(g.bits, vec![false, true, true]);
        assert!(BinaryGenome::new(vec![true; 4], vec![3]).is_err());
    }
}

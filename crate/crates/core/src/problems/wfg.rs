//! WFG toolkit problems with `k` position and `n - k` distance parameters.

use std::f64::consts::{FRAC_PI_2, PI};

fn clamp01(v: f64) -> f64 {
    v.clamp(0.0, 1.0)
}

fn b_poly(y: f64, alpha: f64) -> f64 {
    clamp01(y.powf(alpha))
}

fn b_flat(y: f64, a: f64, b: f64, c: f64) -> f64 {
    let t1 = (y - b).floor().min(0.0) * a * (b - y) / b;
    let t2 = (c - y).floor().min(0.0) * (1.0 - a) * (y - c) / (1.0 - c);
    clamp01(a + t1 - t2)
}

fn b_param(y: f64, u: f64, a: f64, b: f64, c: f64) -> f64 {
    let v = a - (1.0 - 2.0 * u) * ((0.5 - u).floor() + a).abs();
    clamp01(y.powf(b + (c - b) * v))
}

fn s_linear(y: f64, a: f64) -> f64 {
    clamp01((y - a).abs() / ((a - y).floor() + a).abs())
}

fn s_decept(y: f64, a: f64, b: f64, c: f64) -> f64 {
    let t1 = (y - a + b).floor() * (1.0 - c + (a - b) / b) / (a - b);
    let t2 = (a + b - y).floor() * (1.0 - c + (1.0 - a - b) / b) / (1.0 - a - b);
    clamp01(1.0 + ((y - a).abs() - b) * (t1 + t2 + 1.0 / b))
}

fn s_multi(y: f64, a: f64, b: f64, c: f64) -> f64 {
    let t = (y - c).abs() / (2.0 * ((c - y).floor() + c));
    clamp01((1.0 + ((4.0 * a + 2.0) * PI * (0.5 - t)).cos() + 4.0 * b * t * t) / (b + 2.0))
}

fn r_sum(y: &[f64], w: &[f64]) -> f64 {
    let num: f64 = y.iter().zip(w).map(|(a, b)| a * b).sum();
    clamp01(num / w.iter().sum::<f64>())
}

fn r_sum_uniform(y: &[f64]) -> f64 {
    clamp01(y.iter().sum::<f64>() / y.len() as f64)
}

fn r_nonsep(y: &[f64], a: usize) -> f64 {
    let n = y.len();
    let mut num = 0.0;
    for j in 0..n {
        num += y[j];
        for k in 0..a.saturating_sub(1) {
            num += (y[j] - y[(1 + j + k) % n]).abs();
        }
    }
    let half = a.div_ceil(2) as f64;
    let den = n as f64 / a as f64 * half * (1.0 + 2.0 * a as f64 - 2.0 * half);
    clamp01(num / den)
}

/// Position groups `[(i-1)k/(M-1), ik/(M-1))` for `i = 1..M-1`.
fn groups(k: usize, m: usize) -> Vec<std::ops::Range<usize>> {
    let g = k / (m - 1);
    (0..m - 1).map(|i| i * g..(i + 1) * g).collect()
}

fn reduce_sum_weighted(y: &[f64], k: usize, m: usize) -> Vec<f64> {
    let w: Vec<f64> = (1..=y.len()).map(|i| 2.0 * i as f64).collect();
    let mut t: Vec<f64> = groups(k, m).into_iter().map(|r| r_sum(&y[r.clone()], &w[r])).collect();
    t.push(r_sum(&y[k..], &w[k..]));
    t
}

fn reduce_sum(y: &[f64], k: usize, m: usize) -> Vec<f64> {
    let mut t: Vec<f64> = groups(k, m).into_iter().map(|r| r_sum_uniform(&y[r])).collect();
    t.push(r_sum_uniform(&y[k..]));
    t
}

fn reduce_nonsep(y: &[f64], k: usize, m: usize) -> Vec<f64> {
    let mut t: Vec<f64> = groups(k, m).into_iter().map(|r| r_nonsep(&y[r], k / (m - 1))).collect();
    t.push(r_nonsep(&y[k..], y.len() - k));
    t
}

#[derive(Clone, Copy)]
enum Shape {
    ConvexMixed,
    ConvexDisc,
    Linear,
    Concave,
}

/// Front shape `h_1..h_M` at position vector `x` (length `M - 1`).
fn shape(kind: Shape, x: &[f64]) -> Vec<f64> {
    let m = x.len() + 1;
    let mut h = Vec::with_capacity(m);
    for idx in 1..=m {
        let upto = m - idx;
        let v = match kind {
            Shape::ConvexMixed | Shape::ConvexDisc if idx == m => match kind {
                Shape::ConvexMixed => {
                    let a = 5.0;
                    1.0 - x[0] - (2.0 * a * PI * x[0] + FRAC_PI_2).cos() / (2.0 * a * PI)
                }
                _ => 1.0 - x[0] * (5.0 * x[0] * PI).cos().powi(2),
            },
            Shape::ConvexMixed | Shape::ConvexDisc => {
                let mut v: f64 = x[..upto].iter().map(|&xi| 1.0 - (xi * FRAC_PI_2).cos()).product();
                if idx > 1 {
                    v *= 1.0 - (x[upto] * FRAC_PI_2).sin();
                }
                v
            }
            Shape::Linear => {
                let mut v: f64 = x[..upto].iter().product();
                if idx > 1 {
                    v *= 1.0 - x[upto];
                }
                v
            }
            Shape::Concave => {
                let mut v: f64 = x[..upto].iter().map(|&xi| (xi * FRAC_PI_2).sin()).product();
                if idx > 1 {
                    v *= (x[upto] * FRAC_PI_2).cos();
                }
                v
            }
        };
        h.push(v);
    }
    h
}

fn shape_of(index: u8) -> Shape {
    match index {
        1 => Shape::ConvexMixed,
        2 => Shape::ConvexDisc,
        3 => Shape::Linear,
        _ => Shape::Concave,
    }
}

/// Objective vector from a front position `x` (length `M - 1`) and the
/// distance value `x_M`.
pub(super) fn objectives_from_position(index: u8, pos: &[f64], dist: f64) -> Vec<f64> {
    shape(shape_of(index), pos)
        .into_iter()
        .enumerate()
        .map(|(i, h)| dist + 2.0 * (i + 1) as f64 * h)
        .collect()
}

/// Position vector a Pareto-optimal solution maps to for front parameters `u`.
///
/// WFG3 is degenerate: every position but the first collapses to 0.5.
pub(super) fn optimal_position(index: u8, u: &[f64]) -> Vec<f64> {
    u.iter()
        .enumerate()
        .map(|(i, &v)| if index == 3 && i > 0 { 0.5 } else { v })
        .collect()
}

fn transform(index: u8, y: &[f64], k: usize, m: usize) -> Vec<f64> {
    let n = y.len();
    let dist = k..n;
    match index {
        1 => {
            let mut y = y.to_vec();
            for v in &mut y[dist.clone()] {
                *v = s_linear(*v, 0.35);
            }
            for v in &mut y[dist] {
                *v = b_flat(*v, 0.8, 0.75, 0.85);
            }
            for v in &mut y {
                *v = b_poly(*v, 0.02);
            }
            reduce_sum_weighted(&y, k, m)
        }
        2 | 3 => {
            let mut y = y.to_vec();
            for v in &mut y[dist] {
                *v = s_linear(*v, 0.35);
            }
            let l = n - k;
            let mut z: Vec<f64> = y[..k].to_vec();
            for i in 0..l / 2 {
                z.push(r_nonsep(&y[k + 2 * i..k + 2 * i + 2], 2));
            }
            reduce_sum(&z, k, m)
        }
        4 => {
            let y: Vec<f64> = y.iter().map(|&v| s_multi(v, 30.0, 10.0, 0.35)).collect();
            reduce_sum(&y, k, m)
        }
        5 => {
            let y: Vec<f64> = y.iter().map(|&v| s_decept(v, 0.35, 0.001, 0.05)).collect();
            reduce_sum(&y, k, m)
        }
        6 => {
            let mut y = y.to_vec();
            for v in &mut y[dist] {
                *v = s_linear(*v, 0.35);
            }
            reduce_nonsep(&y, k, m)
        }
        7 => {
            let mut t = y.to_vec();
            for i in 0..k {
                let u = r_sum_uniform(&y[i + 1..]);
                t[i] = b_param(y[i], u, 0.98 / 49.98, 0.02, 50.0);
            }
            for v in &mut t[dist] {
                *v = s_linear(*v, 0.35);
            }
            reduce_sum(&t, k, m)
        }
        8 => {
            let mut t = y.to_vec();
            for i in k..n {
                let u = r_sum_uniform(&y[..i]);
                t[i] = b_param(y[i], u, 0.98 / 49.98, 0.02, 50.0);
            }
            for v in &mut t[dist] {
                *v = s_linear(*v, 0.35);
            }
            reduce_sum(&t, k, m)
        }
        9 => {
            let mut t = y.to_vec();
            for i in 0..n - 1 {
                let u = r_sum_uniform(&y[i + 1..]);
                t[i] = b_param(y[i], u, 0.98 / 49.98, 0.02, 50.0);
            }
            for v in &mut t[..k] {
                *v = s_decept(*v, 0.35, 0.001, 0.05);
            }
            for v in &mut t[dist] {
                *v = s_multi(*v, 30.0, 95.0, 0.35);
            }
            reduce_nonsep(&t, k, m)
        }
        _ => unreachable!("WFG{index}"),
    }
}

pub(super) fn evaluate(index: u8, z: &[f64], m: usize, k: usize) -> Vec<f64> {
    let y: Vec<f64> = z.iter().enumerate().map(|(i, &v)| v / (2.0 * (i + 1) as f64)).collect();
    let t = transform(index, &y, k, m);
    let t_m = t[m - 1];
    let pos: Vec<f64> = (0..m - 1)
        .map(|i| {
            let a = if index == 3 && i > 0 { 0.0 } else { 1.0 };
            t_m.max(a) * (t[i] - 0.5) + 0.5
        })
        .collect();
    objectives_from_position(index, &pos, t_m)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Distance parameters at the optimum for the separable problems.
    fn optimal_z(pos: &[f64], n: usize, k: usize) -> Vec<f64> {
        (0..n)
            .map(|i| {
                let scale = 2.0 * (i + 1) as f64;
                if i < k {
                    pos[i] * scale
                } else {
                    0.35 * scale
                }
            })
            .collect()
    }

    #[test]
    fn transformation_identities() {
        assert!((s_linear(0.35, 0.35)).abs() < 1e-15);
        assert_eq!(b_flat(0.8, 0.8, 0.75, 0.85), 0.8);
        assert_eq!(b_flat(0.0, 0.8, 0.75, 0.85), 0.0);
        assert!((s_multi(0.35, 30.0, 10.0, 0.35)).abs() < 1e-12);
        assert!((s_decept(0.35, 0.35, 0.001, 0.05)).abs() < 1e-12);
        assert!((r_nonsep(&[0.0, 0.0, 0.0], 3)).abs() < 1e-15);
        assert!((r_nonsep(&[1.0, 0.0], 2) - 1.0).abs() < 1e-12);
        assert!((r_nonsep(&[1.0, 1.0], 2) - 2.0 / 3.0).abs() < 1e-12);
        assert!((r_nonsep(&[0.2, 0.6], 1) - 0.4).abs() < 1e-12);
    }

    #[test]
    fn optimal_distance_lands_on_front() {
        // WFG4-6 are separable: distance params at 0.35 put t_M at 0.
        for index in [4u8, 5, 6] {
            let pos = [0.3, 0.6, 0.2, 0.9];
            let z = optimal_z(&pos, 12, 4);
            let f = evaluate(index, &z, 3, 4);
            let t = transform(
                index,
                &z.iter()
                    .enumerate()
                    .map(|(i, v)| v / (2.0 * (i + 1) as f64))
                    .collect::<Vec<_>>(),
                4,
                3,
            );
            assert!(t[2].abs() < 1e-9, "WFG{index}: t_M = {}", t[2]);
            // concave front: sum of (f_i / 2i)^2 = 1
            let s: f64 = f
                .iter()
                .enumerate()
                .map(|(i, v)| (v / (2.0 * (i + 1) as f64)).powi(2))
                .sum();
            assert!((s - 1.0).abs() < 1e-9, "WFG{index}: {s}");
        }
    }

    #[test]
    fn bounded_objectives() {
        let z: Vec<f64> = (1..=12).map(|i| 2.0 * i as f64).collect();
        for index in 1..=9 {
            let f = evaluate(index, &z, 3, 4);
            for (i, v) in f.iter().enumerate() {
                assert!(*v >= 0.0 && *v <= 1.0 + 2.0 * (i + 1) as f64);
            }
        }
    }
}

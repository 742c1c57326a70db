//! CEC 2009 unconstrained problems UF1-UF10.

use std::f64::consts::PI;

pub(super) fn bounds(index: u8, n: usize) -> Vec<(f64, f64)> {
    let (head, tail) = match index {
        3 => (1, (0.0, 1.0)),
        1 | 2 | 5 | 6 | 7 => (1, (-1.0, 1.0)),
        4 => (1, (-2.0, 2.0)),
        _ => (2, (-2.0, 2.0)),
    };
    (0..n).map(|i| if i < head { (0.0, 1.0) } else { tail }).collect()
}

/// Sums `h(y_j)` over the 1-based indices `j` selected by `class(j)`, with
/// `y_j = x_j - shift(j)`. Returns `2 / |J| * sum` for each class.
fn class_means(
    x: &[f64],
    first: usize,
    classes: usize,
    class_of: impl Fn(usize) -> usize,
    y_of: impl Fn(usize, f64) -> f64,
    h: impl Fn(&[(usize, f64)]) -> f64,
) -> Vec<f64> {
    let mut buckets: Vec<Vec<(usize, f64)>> = vec![Vec::new(); classes];
    for j in first..=x.len() {
        buckets[class_of(j)].push((j, y_of(j, x[j - 1])));
    }
    buckets
        .iter()
        .map(|b| if b.is_empty() { 0.0 } else { 2.0 / b.len() as f64 * h(b) })
        .collect()
}

fn sq_sum(b: &[(usize, f64)]) -> f64 {
    b.iter().map(|&(_, y)| y * y).sum()
}

fn griewank_like(b: &[(usize, f64)]) -> f64 {
    let prod: f64 = b
        .iter()
        .map(|&(j, y)| (20.0 * y * PI / (j as f64).sqrt()).cos())
        .product();
    4.0 * sq_sum(b) - 2.0 * prod + 2.0
}

/// Two-objective problems: odd `j` feed f1, even `j` feed f2.
fn odd_even(j: usize) -> usize {
    if j % 2 == 1 {
        0
    } else {
        1
    }
}

/// Three-objective problems: `j - 1`, `j - 2`, `j` multiples of 3.
fn mod3(j: usize) -> usize {
    match j % 3 {
        1 => 0,
        2 => 1,
        _ => 2,
    }
}

pub(super) fn evaluate(index: u8, x: &[f64]) -> Vec<f64> {
    let n = x.len() as f64;
    let x1 = x[0];
    let sin_shift = |j: usize, v: f64| v - (6.0 * PI * x1 + j as f64 * PI / n).sin();
    match index {
        1 => {
            let s = class_means(x, 2, 2, odd_even, sin_shift, sq_sum);
            vec![x1 + s[0], 1.0 - x1.sqrt() + s[1]]
        }
        2 => {
            let y = |j: usize, v: f64| {
                let jf = j as f64;
                let amp = 0.3 * x1 * x1 * (24.0 * PI * x1 + 4.0 * jf * PI / n).cos() + 0.6 * x1;
                let angle = 6.0 * PI * x1 + jf * PI / n;
                if j % 2 == 1 {
                    v - amp * angle.cos()
                } else {
                    v - amp * angle.sin()
                }
            };
            let s = class_means(x, 2, 2, odd_even, y, sq_sum);
            vec![x1 + s[0], 1.0 - x1.sqrt() + s[1]]
        }
        3 => {
            let y = |j: usize, v: f64| v - x1.powf(0.5 * (1.0 + 3.0 * (j as f64 - 2.0) / (n - 2.0)));
            let s = class_means(x, 2, 2, odd_even, y, griewank_like);
            vec![x1 + s[0], 1.0 - x1.sqrt() + s[1]]
        }
        4 => {
            let h = |b: &[(usize, f64)]| {
                b.iter()
                    .map(|&(_, y)| y.abs() / (1.0 + (2.0 * y.abs()).exp()))
                    .sum::<f64>()
            };
            let s = class_means(x, 2, 2, odd_even, sin_shift, h);
            vec![x1 + s[0], 1.0 - x1 * x1 + s[1]]
        }
        5 => {
            let (big_n, eps) = (10.0, 0.1);
            let h = |b: &[(usize, f64)]| {
                b.iter()
                    .map(|&(_, y)| 2.0 * y * y - (4.0 * PI * y).cos() + 1.0)
                    .sum::<f64>()
            };
            let s = class_means(x, 2, 2, odd_even, sin_shift, h);
            let wave = (0.5 / big_n + eps) * (2.0 * big_n * PI * x1).sin().abs();
            vec![x1 + wave + s[0], 1.0 - x1 + wave + s[1]]
        }
        6 => {
            let (big_n, eps) = (2.0, 0.1);
            let s = class_means(x, 2, 2, odd_even, sin_shift, griewank_like);
            let wave = (2.0 * (0.5 / big_n + eps) * (2.0 * big_n * PI * x1).sin()).max(0.0);
            vec![x1 + wave + s[0], 1.0 - x1 + wave + s[1]]
        }
        7 => {
            let s = class_means(x, 2, 2, odd_even, sin_shift, sq_sum);
            let p = x1.powf(0.2);
            vec![p + s[0], 1.0 - p + s[1]]
        }
        8..=10 => {
            let x2 = x[1];
            let y = |j: usize, v: f64| v - 2.0 * x2 * (2.0 * PI * x1 + j as f64 * PI / n).sin();
            let s = if index == 10 {
                let h = |b: &[(usize, f64)]| {
                    b.iter()
                        .map(|&(_, y)| 4.0 * y * y - (8.0 * PI * y).cos() + 1.0)
                        .sum::<f64>()
                };
                class_means(x, 3, 3, mod3, y, h)
            } else {
                class_means(x, 3, 3, mod3, y, sq_sum)
            };
            let mut f = front_point(index, x1, x2);
            for (fi, si) in f.iter_mut().zip(s) {
                *fi += si;
            }
            f
        }
        _ => unreachable!("UF{index}"),
    }
}

/// Objective values of the position part alone (distance terms zero).
pub(super) fn front_point(index: u8, x1: f64, x2: f64) -> Vec<f64> {
    match index {
        1..=3 => vec![x1, 1.0 - x1.sqrt()],
        4 => vec![x1, 1.0 - x1 * x1],
        5 => {
            let wave = 0.15 * (20.0 * PI * x1).sin().abs();
            vec![x1 + wave, 1.0 - x1 + wave]
        }
        6 => {
            let wave = (0.6 * (4.0 * PI * x1).sin()).max(0.0);
            vec![x1 + wave, 1.0 - x1 + wave]
        }
        7 => {
            let p = x1.powf(0.2);
            vec![p, 1.0 - p]
        }
        8 | 10 => {
            let (a, b) = (0.5 * PI * x1, 0.5 * PI * x2);
            vec![a.cos() * b.cos(), a.cos() * b.sin(), a.sin()]
        }
        9 => {
            let eps = 0.1;
            let bump = ((1.0 + eps) * (1.0 - 4.0 * (2.0 * x1 - 1.0).powi(2))).max(0.0);
            vec![
                0.5 * (bump + 2.0 * x1) * x2,
                0.5 * (bump - 2.0 * x1 + 2.0) * x2,
                1.0 - x2,
            ]
        }
        _ => unreachable!("UF{index}"),
    }
}

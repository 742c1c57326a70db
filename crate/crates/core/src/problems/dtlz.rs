use std::f64::consts::{FRAC_PI_2, PI};

fn g_rastrigin(xm: &[f64]) -> f64 {
    100.0
        * (xm.len() as f64
            + xm.iter()
                .map(|&v| (v - 0.5).powi(2) - (20.0 * PI * (v - 0.5)).cos())
                .sum::<f64>())
}

fn g_sphere(xm: &[f64]) -> f64 {
    xm.iter().map(|&v| (v - 0.5).powi(2)).sum()
}

/// Spherical front mapping `(1 + g) * [cos..cos, ..., sin]` over angles.
fn spherical(angles: &[f64], g: f64, m: usize) -> Vec<f64> {
    (0..m)
        .map(|i| {
            let mut v = 1.0 + g;
            for a in &angles[..m - 1 - i] {
                v *= a.cos();
            }
            if i > 0 {
                v *= angles[m - 1 - i].sin();
            }
            v
        })
        .collect()
}

pub(super) fn evaluate(index: u8, x: &[f64], m: usize) -> Vec<f64> {
    let (pos, xm) = x.split_at(m - 1);
    match index {
        1 => {
            let g = g_rastrigin(xm);
            (0..m)
                .map(|i| {
                    let mut v = 0.5 * (1.0 + g);
                    for p in &pos[..m - 1 - i] {
                        v *= p;
                    }
                    if i > 0 {
                        v *= 1.0 - pos[m - 1 - i];
                    }
                    v
                })
                .collect()
        }
        2..=4 => {
            let g = if index == 3 { g_rastrigin(xm) } else { g_sphere(xm) };
            let alpha = if index == 4 { 100 } else { 1 };
            let angles: Vec<f64> = pos.iter().map(|&p| p.powi(alpha) * FRAC_PI_2).collect();
            spherical(&angles, g, m)
        }
        5 | 6 => {
            let g = if index == 5 {
                g_sphere(xm)
            } else {
                xm.iter().map(|&v| v.powf(0.1)).sum()
            };
            let angles: Vec<f64> = pos
                .iter()
                .enumerate()
                .map(|(i, &p)| {
                    if i == 0 {
                        p * FRAC_PI_2
                    } else {
                        PI / (4.0 * (1.0 + g)) * (1.0 + 2.0 * g * p)
                    }
                })
                .collect();
            spherical(&angles, g, m)
        }
        7 => {
            let g = 1.0 + 9.0 / xm.len() as f64 * xm.iter().sum::<f64>();
            let h = m as f64
                - pos
                    .iter()
                    .map(|&f| f / (1.0 + g) * (1.0 + (3.0 * PI * f).sin()))
                    .sum::<f64>();
            let mut f: Vec<f64> = pos.to_vec();
            f.push((1.0 + g) * h);
            f
        }
        _ => unreachable!("DTLZ{index}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dtlz2_midpoint() {
        let f = evaluate(2, &[0.5; 11], 2);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((f[0] - s).abs() < 1e-15 && (f[1] - s).abs() < 1e-15);
    }

    #[test]
    fn dtlz1_optimum_on_hyperplane() {
        let mut x = vec![0.5; 11];
        x[0] = 0.3;
        let f = evaluate(1, &x, 2);
        assert!((f[0] + f[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn dtlz7_optimum() {
        let mut x = vec![0.0; 11];
        x[0] = 0.0;
        assert_eq!(evaluate(7, &x, 2), vec![0.0, 4.0]);
    }

    #[test]
    fn three_objective_sphere() {
        let f = evaluate(2, &[0.5, 0.5, 0.5, 0.5], 3);
        let norm: f64 = f.iter().map(|v| v * v).sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }
}

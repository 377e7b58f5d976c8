use crate::error::{invalid, Error, Result};

/// Points on the coarse grid of [`optimize_scalar`].
pub const GRID_POINTS: usize = 10_000;

fn eval(f: &impl Fn(f64) -> f64, x: f64) -> Result<f64> {
    let y = f(x);
    if y.is_finite() {
        Ok(y)
    } else {
        Err(Error::Evaluation(format!("objective is {y} at {x}")))
    }
}

/// Maximizes `f` on `[lo, hi]`: a fixed grid, then golden-section search on
/// the bracket around the best grid point. Ties keep the smallest argument.
pub fn optimize_scalar(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)> {
    if !(lo < hi && tol > 0.0 && lo.is_finite() && hi.is_finite()) {
        return invalid(format!("bad bracket [{lo}, {hi}] or tolerance {tol}"));
    }
    let step = (hi - lo) / (GRID_POINTS - 1) as f64;
    let mut best = (0usize, f64::NEG_INFINITY);
    for i in 0..GRID_POINTS {
        let y = eval(&f, lo + step * i as f64)?;
        if y > best.1 {
            best = (i, y);
        }
    }
    let mut a = lo + step * best.0.saturating_sub(1) as f64;
    let mut b = (lo + step * (best.0 + 1) as f64).min(hi);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (eval(&f, c)?, eval(&f, d)?);
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = eval(&f, c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = eval(&f, d)?;
        }
    }
    let x = 0.5 * (a + b);
    let y = eval(&f, x)?;
    // The grid point itself may still beat the refined interior.
    let grid_x = lo + step * best.0 as f64;
    Ok(if best.1 > y { (grid_x, best.1) } else { (x, y) })
}

/// Maximizes `f` over a box with a shrinking grid: each round evaluates a
/// `side x side` grid and recentres a window of half the width on the best
/// point. Deterministic; ties keep the lexicographically smallest point.
pub fn maximize_box(
    f: impl Fn(f64, f64) -> f64,
    x_range: (f64, f64),
    y_range: (f64, f64),
    side: usize,
    rounds: usize,
) -> Result<((f64, f64), f64)> {
    let (mut xl, mut xh) = x_range;
    let (mut yl, mut yh) = y_range;
    let mut best = ((xl, yl), f64::NEG_INFINITY);
    for _ in 0..rounds {
        for i in 0..side {
            let x = xl + (xh - xl) * i as f64 / (side - 1) as f64;
            for j in 0..side {
                let y = yl + (yh - yl) * j as f64 / (side - 1) as f64;
                let v = f(x, y);
                if !v.is_finite() {
                    return Err(Error::Evaluation(format!("objective is {v} at ({x}, {y})")));
                }
                if v > best.1 {
                    best = ((x, y), v);
                }
            }
        }
        let (bx, by) = best.0;
        let wx = (xh - xl) / 4.0;
        let wy = (yh - yl) / 4.0;
        xl = (bx - wx).max(x_range.0);
        xh = (bx + wx).min(x_range.1);
        yl = (by - wy).max(y_range.0);
        yh = (by + wy).min(y_range.1);
    }
    Ok(best)
}

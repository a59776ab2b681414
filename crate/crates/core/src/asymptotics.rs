//! The exponent function `f_x(y) = sum_{i=0}^{floor(1/x)} max{ix + y - 1, 0}`,
//! its level sets, the `G(n, p)` regime scalars and the binomial pmf maximum.
//!
//! Everything here exists in two flavors: `f64`, and exact rationals
//! ([`Exponent`]) for inputs like `x = 1/3` where `floor(1/x)` jumps and
//! float drift would land on the wrong side of the jump.

use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Exact exponent or level value.
pub type Exponent = Ratio<i64>;

/// `|x - 1/k|` below this counts as `x = 1/k`.
pub const RECIPROCAL_GUARD: f64 = 1e-12;

/// Default bisection tolerance.
pub const DEFAULT_TOL: f64 = 1e-12;

/// `k` when `x` is within [`RECIPROCAL_GUARD`] of `1/k`.
pub fn reciprocal_of_integer(x: f64) -> Option<u32> {
    if x.is_nan() || x <= 0.0 {
        return None;
    }
    let k = (1.0 / x).round();
    (k >= 1.0 && (x - 1.0 / k).abs() < RECIPROCAL_GUARD).then_some(k as u32)
}

/// `floor(1/x)`, snapping to `k` near `x = 1/k`.
pub fn floor_recip(x: f64) -> u32 {
    reciprocal_of_integer(x).unwrap_or_else(|| (1.0 / x).floor() as u32)
}

pub fn floor_recip_exact(x: Exponent) -> u32 {
    // floor(q / p) for x = p / q > 0
    (*x.denom() / *x.numer()) as u32
}

fn check_x(x: f64) -> Result<()> {
    if x > 0.0 && x <= 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("x = {x} outside (0, 1]")))
    }
}

fn check_x_exact(x: Exponent) -> Result<()> {
    if x > Exponent::zero() && x <= Exponent::one() {
        Ok(())
    } else {
        Err(invalid(format!("x = {x} outside (0, 1]")))
    }
}

fn sum_terms<T>(x: T, y: T, top: u32) -> T
where
    T: Num + PartialOrd + Copy + FromPrimitive,
{
    (0..=top).fold(T::zero(), |acc, i| {
        let term = T::from_u32(i).unwrap() * x + y - T::one();
        if term > T::zero() {
            acc + term
        } else {
            acc
        }
    })
}

/// `f_x(y)` for `x in (0, 1]`, `y in [0, 1]`.
pub fn f_x(x: f64, y: f64) -> Result<f64> {
    check_x(x)?;
    if !(0.0..=1.0).contains(&y) {
        return Err(invalid(format!("y = {y} outside [0, 1]")));
    }
    Ok(f_unchecked(x, y))
}

#[inline]
fn f_unchecked(x: f64, y: f64) -> f64 {
    sum_terms(x, y, floor_recip(x))
}

pub fn f_x_exact(x: Exponent, y: Exponent) -> Result<Exponent> {
    check_x_exact(x)?;
    if y < Exponent::zero() || y > Exponent::one() {
        return Err(invalid(format!("y = {y} outside [0, 1]")));
    }
    Ok(sum_terms(x, y, floor_recip_exact(x)))
}

/// Left end of the interval on which `f_x` is strictly increasing:
/// `1 - floor(1/x) x`.
pub fn zero_edge(x: f64) -> f64 {
    (1.0 - f64::from(floor_recip(x)) * x).max(0.0)
}

/// Root of `f = level` from the linear pieces. On `[1 - jx, 1 - (j-1)x]`
/// the active terms are `i = j..=top`, so
/// `f(y) = (top - j + 1)(y - 1) + x (j + ... + top)`. The segment is the
/// leftmost one whose right end already reaches the level.
fn closed_form<T>(x: T, top: u32, level: T) -> Option<T>
where
    T: Num + PartialOrd + Copy + FromPrimitive,
{
    let int = |v: u32| T::from_u32(v).unwrap();
    for j in (1..=top).rev() {
        let hi = T::one() - int(j - 1) * x;
        if sum_terms(x, hi, top) < level {
            continue;
        }
        let lo = T::one() - int(j) * x;
        let active = top - j + 1;
        let index_sum = (j + top) * active / 2;
        let y = T::one() + (level - x * int(index_sum)) / int(active);
        // only moves the float route, by rounding error at a breakpoint
        let y = if y < lo {
            lo
        } else if y > hi {
            hi
        } else {
            y
        };
        return Some(y);
    }
    None
}

/// Solution of `f_x(y) = level` by both routes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelRoot {
    pub bisection: f64,
    pub closed_form: f64,
    pub iterations: u32,
}

impl LevelRoot {
    pub fn y(&self) -> f64 {
        self.closed_form
    }
}

/// Solves `f_x(y) = level` by bisection on `[1 - floor(1/x) x, 1]` and by
/// the piecewise-linear closed form. Fails when `f_x(1) <= level`.
pub fn solve_level(x: f64, level: f64, tol: f64) -> Result<LevelRoot> {
    check_x(x)?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(invalid("tolerance must be positive"));
    }
    let f_at_one = f_unchecked(x, 1.0);
    if f_at_one <= level || level <= 0.0 {
        return Err(Error::NoRoot { f_at_one, level });
    }
    let (mut lo, mut hi) = (zero_edge(x), 1.0);
    let mut iterations = 0;
    let mut mid = 0.5 * (lo + hi);
    while iterations < 200 {
        iterations += 1;
        mid = 0.5 * (lo + hi);
        let f = f_unchecked(x, mid);
        if (f - level).abs() <= tol && hi - lo <= tol {
            break;
        }
        if f < level {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * 4.0 {
            break;
        }
    }
    let closed =
        closed_form(x, floor_recip(x), level).expect("a root exists when f_x(1) exceeds the level");
    Ok(LevelRoot {
        bisection: mid,
        closed_form: closed,
        iterations,
    })
}

/// Exact root of `f_x(y) = level` for rational `x` and `level`.
pub fn solve_level_exact(x: Exponent, level: Exponent) -> Result<Exponent> {
    check_x_exact(x)?;
    let top = floor_recip_exact(x);
    let f_at_one = sum_terms(x, Exponent::one(), top);
    if f_at_one <= level || level <= Exponent::zero() {
        return Err(Error::NoRoot {
            f_at_one: ratio_to_f64(f_at_one),
            level: ratio_to_f64(level),
        });
    }
    Ok(closed_form(x, top, level).expect("root exists"))
}

pub fn ratio_to_f64(r: Exponent) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn check_threshold_range(x: f64, max: f64, reason: &'static str) -> Result<()> {
    if x > 0.0 && x <= max + RECIPROCAL_GUARD {
        Ok(())
    } else {
        Err(Error::ThresholdUndefined { x, reason })
    }
}

/// Lower-bound exponent: root of `f_x(y) = 1`, for `x in (0, 1/2]`.
pub fn y1(x: f64) -> Result<f64> {
    check_threshold_range(x, 0.5, "y1 is defined for x in (0, 1/2]")?;
    Ok(solve_level(x, 1.0, DEFAULT_TOL)?.y())
}

/// Upper-bound exponent: root of `f_x(y) = 4`, for `x in (0, 1/8]`.
pub fn y4(x: f64) -> Result<f64> {
    check_threshold_range(x, 0.125, "y4 is defined for x in (0, 1/8]")?;
    Ok(solve_level(x, 4.0, DEFAULT_TOL)?.y())
}

pub fn y1_exact(x: Exponent) -> Result<Exponent> {
    if x <= Exponent::zero() || x > Exponent::new(1, 2) {
        return Err(Error::ThresholdUndefined {
            x: ratio_to_f64(x),
            reason: "y1 is defined for x in (0, 1/2]",
        });
    }
    solve_level_exact(x, Exponent::one())
}

pub fn y4_exact(x: Exponent) -> Result<Exponent> {
    if x <= Exponent::zero() || x > Exponent::new(1, 8) {
        return Err(Error::ThresholdUndefined {
            x: ratio_to_f64(x),
            reason: "y4 is defined for x in (0, 1/8]",
        });
    }
    solve_level_exact(x, Exponent::from_integer(4))
}

/// Points `(x, y)` with `f_x(y) = level`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentCurve {
    pub level: f64,
    pub points: Vec<(f64, f64)>,
}

/// Level set points for every grid value where a root exists; grid values
/// with `f_x(1) <= level` are left out.
pub fn emit_curves(x_grid: &[f64], levels: &[f64], tol: f64) -> Result<Vec<ExponentCurve>> {
    levels
        .iter()
        .map(|&level| {
            let mut points = Vec::new();
            for &x in x_grid {
                match solve_level(x, level, tol) {
                    Ok(root) => points.push((x, root.y())),
                    Err(Error::NoRoot { .. }) => {}
                    Err(e) => return Err(e),
                }
            }
            Ok(ExponentCurve { level, points })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactCurve {
    pub level: Exponent,
    pub points: Vec<(Exponent, Exponent)>,
}

pub fn emit_curves_exact(x_grid: &[Exponent], levels: &[Exponent]) -> Result<Vec<ExactCurve>> {
    levels
        .iter()
        .map(|&level| {
            let mut points = Vec::new();
            for &x in x_grid {
                match solve_level_exact(x, level) {
                    Ok(y) => points.push((x, y)),
                    Err(Error::NoRoot { .. }) => {}
                    Err(e) => return Err(e),
                }
            }
            Ok(ExactCurve { level, points })
        })
        .collect()
}

/// Offset used for the right-hand side of each jump at `x = 1/k`.
pub const JUMP_OFFSET: f64 = 1e-6;

/// Uniform grid of `points` values on `(0, upper]` plus `1/k` and
/// `1/k + JUMP_OFFSET` for every `k >= 2` with `1/k` in range, so the jumps
/// of the level curves show up. Sorted, deduplicated.
pub fn figure_grid(points: usize, upper: f64, max_k: u32) -> Vec<f64> {
    let mut grid: Vec<f64> = (1..=points)
        .map(|i| upper * i as f64 / points as f64)
        .collect();
    for k in 2..=max_k {
        let at = 1.0 / f64::from(k);
        if at <= upper + RECIPROCAL_GUARD {
            grid.push(at);
            if at + JUMP_OFFSET <= upper {
                grid.push(at + JUMP_OFFSET);
            }
        }
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    grid
}

/// [`figure_grid`] over the rationals; the right side of each jump is
/// `1/k + 1/10^6`.
pub fn figure_grid_exact(points: usize, upper: Exponent, max_k: u32) -> Vec<Exponent> {
    let offset = Exponent::new(1, 1_000_000);
    let mut grid: Vec<Exponent> = (1..=points as i64)
        .map(|i| upper * Exponent::new(i, points as i64))
        .collect();
    for k in 2..=i64::from(max_k) {
        let at = Exponent::new(1, k);
        if at <= upper {
            grid.push(at);
            if at + offset <= upper {
                grid.push(at + offset);
            }
        }
    }
    grid.sort();
    grid.dedup();
    grid
}

/// Scalars of the `d = n^x` regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeParams {
    pub x: f64,
    pub n: usize,
    pub d: f64,
    /// largest `i` with `d^i = o(n)`
    pub i_star: u32,
    /// `d^{i*+1} / n`
    pub c: f64,
    /// `max{sqrt(ln n / d), d^{i*} / n}`
    pub gamma: f64,
}

/// `i* = floor(1/x)`, or `k - 1` when `x = 1/k`.
pub fn i_star(x: f64) -> u32 {
    match reciprocal_of_integer(x) {
        Some(k) => k - 1,
        None => (1.0 / x).floor() as u32,
    }
}

/// Regime scalars with the convention `d = n^x`.
pub fn regime(n: usize, x: f64) -> Result<RegimeParams> {
    if n < 3 {
        return Err(invalid("regime needs n >= 3"));
    }
    regime_with_degree(n, x, (n as f64).powf(x))
}

/// Regime scalars with a given (e.g. measured) average degree.
pub fn regime_with_degree(n: usize, x: f64, d: f64) -> Result<RegimeParams> {
    if !(x > 0.0 && x < 1.0) {
        return Err(invalid(format!("x = {x} outside (0, 1)")));
    }
    if d.is_nan() || d <= 0.0 {
        return Err(invalid("average degree must be positive"));
    }
    let i_star = i_star(x);
    let nf = n as f64;
    let c = d.powi(i_star as i32 + 1) / nf;
    let gamma = (nf.ln() / d).sqrt().max(d.powi(i_star as i32) / nf);
    Ok(RegimeParams {
        x,
        n,
        d,
        i_star,
        c,
        gamma,
    })
}

/// Full `Bin(trials, p)` pmf by the ratio recurrence outward from the mode.
pub fn binom_pmf(trials: u64, p: f64) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("p = {p} outside [0, 1]")));
    }
    let t = trials as usize;
    let mut w = vec![0.0; t + 1];
    if p == 0.0 {
        w[0] = 1.0;
        return Ok(w);
    }
    if p == 1.0 {
        w[t] = 1.0;
        return Ok(w);
    }
    let mode = binom_mode(trials, p) as usize;
    let odds = p / (1.0 - p);
    w[mode] = 1.0;
    for z in mode + 1..=t {
        w[z] = w[z - 1] * ((t - z + 1) as f64 / z as f64) * odds;
    }
    for z in (0..mode).rev() {
        w[z] = w[z + 1] * ((z + 1) as f64 / (t - z) as f64) / odds;
    }
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= total);
    Ok(w)
}

fn binom_mode(trials: u64, p: f64) -> u64 {
    (((trials + 1) as f64 * p).floor() as u64).min(trials)
}

/// `(argmax_z Pr(Z = z), max_z Pr(Z = z))` for `Z ~ Bin(trials, p)`.
pub fn binom_pmf_max(trials: u64, p: f64) -> Result<(u64, f64)> {
    let pmf = binom_pmf(trials, p)?;
    let mode = if p == 0.0 {
        0
    } else if p == 1.0 {
        trials
    } else {
        binom_mode(trials, p)
    };
    Ok((mode, pmf[mode as usize]))
}

//! Integrals over regions of the Reinhardt shadow `[0, r_1) × … × [0, r_n)`
//! cut out by a toric constraint `Σ 2 a_j log x_j < L` (or `≥ L`).
//!
//! The integrand is `Π x_j^{2 p_j + 1}`, the radial part of `|z^α|² e^{−ψ}`
//! for a diagonal weight. Dimensions are peeled from the front; the last
//! constrained dimension is integrated in closed form, earlier ones by
//! adaptive Gauss–Kronrod in `u = log x` between analytically located
//! breakpoints.

use std::cell::RefCell;

use crate::error::{Error, Result};
use crate::quadrature::integrate;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Below,
    Above,
}

/// `∫_u^v x^{2p+1} dx`, `+∞` when divergent at `u = 0`.
pub fn power_integral(u: f64, v: f64, p: f64) -> f64 {
    if v <= u {
        return 0.0;
    }
    let e = 2.0 * p + 2.0;
    if e == 0.0 {
        if u == 0.0 {
            f64::INFINITY
        } else {
            (v / u).ln()
        }
    } else if u == 0.0 {
        if e > 0.0 {
            v.powf(e) / e
        } else {
            f64::INFINITY
        }
    } else {
        (v.powf(e) - u.powf(e)) / e
    }
}

fn times(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        a * b
    }
}

pub struct Shadow<'a> {
    radii: &'a [f64],
    a: &'a [f64],
    p: &'a [f64],
    tol: f64,
    max_sum: Vec<f64>,
    active_from: Vec<bool>,
    box_from: Vec<f64>,
}

const MAX_INTERVALS: usize = 2000;

impl<'a> Shadow<'a> {
    pub fn new(radii: &'a [f64], a: &'a [f64], p: &'a [f64], tol: f64) -> Self {
        let n = radii.len();
        let mut max_sum = vec![0.0; n + 1];
        let mut active_from = vec![false; n + 1];
        let mut box_from = vec![1.0; n + 1];
        for j in (0..n).rev() {
            max_sum[j] = max_sum[j + 1] + if a[j] > 0.0 { 2.0 * a[j] * radii[j].ln() } else { 0.0 };
            active_from[j] = active_from[j + 1] || a[j] > 0.0;
            box_from[j] = times(power_integral(0.0, radii[j], p[j]), box_from[j + 1]);
        }
        Self { radii, a, p, tol, max_sum, active_from, box_from }
    }

    /// `∫ Π x_j^{2p_j+1} dx` over the part of the box on `side` of `L`.
    pub fn integral(&self, side: Side, level: f64) -> Result<f64> {
        self.from(0, side, level)
    }

    fn from(&self, j: usize, side: Side, level: f64) -> Result<f64> {
        let n = self.radii.len();
        if j == n || !self.active_from[j] {
            // The remaining constraint sum is identically zero.
            let holds = match side {
                Side::Below => 0.0 < level,
                Side::Above => 0.0 >= level,
            };
            return Ok(if holds { self.box_from[j] } else { 0.0 });
        }
        let (r, a, p) = (self.radii[j], self.a[j], self.p[j]);
        if a == 0.0 {
            let rest = self.from(j + 1, side, level)?;
            return Ok(times(power_integral(0.0, r, p), rest));
        }
        let rest_max = self.max_sum[j + 1];
        // For x_j <= b the remaining coordinates can reach any sum up to rest_max
        // without violating the constraint; for x_j >= b they cannot.
        let b = ((level - rest_max) / (2.0 * a)).exp();
        match side {
            Side::Below => {
                if level >= self.max_sum[j] {
                    return Ok(self.box_from[j]);
                }
                let bb = b.min(r);
                let full = times(power_integral(0.0, bb, p), self.box_from[j + 1]);
                if !self.active_from[j + 1] || bb >= r {
                    return Ok(full);
                }
                let cut = self.radial(j, side, level, bb.ln(), r.ln())?;
                Ok(full + cut)
            }
            Side::Above => {
                if level > self.max_sum[j] || b >= r {
                    return Ok(0.0);
                }
                if !self.active_from[j + 1] {
                    return Ok(times(power_integral(b, r, p), self.box_from[j + 1]));
                }
                self.radial(j, side, level, b.ln(), r.ln())
            }
        }
    }

    /// `∫_{e^lo}^{e^hi} x^{2p+1} F(L − 2a log x) dx` in the variable `u = log x`.
    fn radial(&self, j: usize, side: Side, level: f64, lo: f64, hi: f64) -> Result<f64> {
        let (a, p) = (self.a[j], self.p[j]);
        let failure: RefCell<Option<Error>> = RefCell::new(None);
        let integrand = |u: f64| -> f64 {
            match self.from(j + 1, side, level - 2.0 * a * u) {
                Ok(v) => times(((2.0 * p + 2.0) * u).exp(), v),
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    0.0
                }
            }
        };
        let res = integrate(integrand, lo, hi, self.tol, 0.0, MAX_INTERVALS)?;
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        if !res.value.is_finite() {
            return Ok(f64::INFINITY);
        }
        Ok(res.value)
    }
}

//! Picard–Fuchs system of `(I*, I2, I0)` and its numerical flow.
//!
//! The values satisfy `I = M(h) I'` with
//!
//! ```text
//!        | h   -2          h + 6       |
//! M(h) = | 0   3/4 (h-6)   3/2 (h+9)   |
//!        | 0   -3          3/2 (h+6)   |
//! ```
//!
//! and `det M = 9/8 h^2 (h+4)`. Differentiating once gives a closed
//! first-order system for the derivative triple, which is what gets
//! integrated; values are recovered from `M I'`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::EnergyLevel;
use crate::ode::{integrate, integrate_dense, DenseSolution, OdeOptions};
use crate::quadrature::{abelian_di, IntegralFrame, QuadOptions};

/// `I0'(-4) = -pi/sqrt(3)`: minus the area of `3u^2 + v^2 <= 1`.
pub const I0P_CENTER: f64 = -PI / 1.732_050_807_568_877_2;

pub fn pf_matrix(h: f64) -> [[f64; 3]; 3] {
    [
        [h, -2.0, h + 6.0],
        [0.0, 0.75 * (h - 6.0), 1.5 * (h + 9.0)],
        [0.0, -3.0, 1.5 * (h + 6.0)],
    ]
}

pub fn pf_det(h: f64) -> f64 {
    1.125 * h * h * (h + 4.0)
}

/// `M(h) I'`, ordered `(I*, I2, I0)`.
pub fn pf_values(h: f64, d: [f64; 3]) -> [f64; 3] {
    let m = pf_matrix(h);
    let mut out = [0.0; 3];
    for (i, row) in m.iter().enumerate() {
        out[i] = row.iter().zip(&d).map(|(a, b)| a * b).sum();
    }
    out
}

/// Solve `M(h) I' = I` for the derivatives, ordered `(I*', I2', I0')`.
pub fn pf_derivatives(h: f64, values: [f64; 3]) -> Result<[f64; 3]> {
    let det = pf_det(h);
    if !(det.abs() > 1e-14) {
        return Err(Error::Singular { h, det });
    }
    let [is, i2, i0] = values;
    let det2 = 1.125 * h * (h + 4.0);
    let d2 = (1.5 * (h + 6.0) * i2 - 1.5 * (h + 9.0) * i0) / det2;
    let d0 = (0.75 * (h - 6.0) * i0 + 3.0 * i2) / det2;
    let ds = (is + 2.0 * d2 - (h + 6.0) * d0) / h;
    Ok([ds, d2, d0])
}

/// Second derivatives from the differentiated system.
pub fn second_derivatives(h: f64, d: [f64; 3]) -> [f64; 3] {
    let [_, d2, d0] = d;
    let den = 3.0 * h * (h + 4.0);
    [
        -2.0 * d0 / (3.0 * h),
        ((h + 6.0) * d2 - 2.0 * (9.0 + 2.0 * h) * d0) / den,
        (2.0 * d2 - (6.0 + h) * d0) / den,
    ]
}

/// Largest `|M I' - I|` relative to `max(|I|, 1)` over the three components.
pub fn pf_residual(f: &IntegralFrame) -> f64 {
    let mi = pf_values(f.h, f.derivatives());
    mi.iter()
        .zip(f.values())
        .map(|(a, b)| (a - b).abs() / b.abs().max(1.0))
        .fold(0.0, f64::max)
}

fn rhs(h: f64, y: &[f64; 3]) -> [f64; 3] {
    second_derivatives(h, *y)
}

// Taylor coefficients at h = -4 in powers of e = h + 4, in units of I0'(-4).
const CENTER_ISTAR: [f64; 5] = [0.0, 0.0, 1.0 / 12.0, 11.0 / 1296.0, 109.0 / 93312.0];
const CENTER_I2: [f64; 5] = [0.0, 1.0, 1.0 / 9.0, 17.0 / 1944.0, 455.0 / 419904.0];
const CENTER_I0: [f64; 5] = [0.0, 1.0, 1.0 / 36.0, 5.0 / 1944.0, 35.0 / 104976.0];

pub const MAX_CENTER_ORDER: usize = 4;

fn poly_and_derivative(c: &[f64; 5], e: f64, order: usize) -> (f64, f64) {
    let mut v = 0.0;
    let mut d = 0.0;
    for k in (1..=order).rev() {
        v = v * e + c[k];
        d = d * e + k as f64 * c[k];
    }
    (v * e, d)
}

/// Truncated expansion at the center, terms through `(h+4)^order`.
pub fn series_center(h: EnergyLevel, order: usize) -> Result<IntegralFrame> {
    if order == 0 || order > MAX_CENTER_ORDER {
        return Err(Error::SeriesOrder {
            requested: order,
            max: MAX_CENTER_ORDER,
        });
    }
    let e = h.from_center();
    let a = I0P_CENTER;
    let (is, dis) = poly_and_derivative(&CENTER_ISTAR, e, order);
    let (i2, di2) = poly_and_derivative(&CENTER_I2, e, order);
    let (i0, di0) = poly_and_derivative(&CENTER_I0, e, order);
    Ok(IntegralFrame {
        h: h.value(),
        i_star: a * is,
        i2: a * i2,
        i0: a * i0,
        di_star: a * dis,
        di2: a * di2,
        di0: a * di0,
    })
}

/// Constants of the separatrix expansion with `L = ln|h|`:
/// `I0' = L/2 + k0`, `I2' = 3L/2 + k2`, `I*' = -L^2/6 - (2 k0/3) L + ks`.
///
/// The value-level constant of `I0 = -9 + h L/2 + c h` is `c = k0 - 1/2`,
/// and `k2 = 3 k0 + 3` in exact arithmetic. The `L` term of `I*'` follows
/// from integrating `I*'' = -2 I0'/(3h)`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SeparatrixFit {
    pub k0: f64,
    pub k2: f64,
    pub ks: f64,
    /// Largest spread of each constant across the fitting levels.
    pub residual: f64,
}

impl SeparatrixFit {
    pub const LEVELS: [f64; 3] = [-1e-10, -1e-11, -1e-12];

    pub fn fit(opts: QuadOptions) -> Result<Self> {
        let mut est = Vec::new();
        for h in Self::LEVELS {
            let (d0, d2, ds) = abelian_di(EnergyLevel::new(h)?, opts)?;
            let l = h.abs().ln();
            let k0 = d0 - 0.5 * l;
            est.push([k0, d2 - 1.5 * l, ds + l * l / 6.0 + 2.0 * k0 / 3.0 * l]);
        }
        let residual = (0..3)
            .map(|k| {
                let lo = est.iter().map(|e| e[k]).fold(f64::INFINITY, f64::min);
                let hi = est.iter().map(|e| e[k]).fold(f64::NEG_INFINITY, f64::max);
                hi - lo
            })
            .fold(0.0, f64::max);
        let [k0, k2, ks] = est[est.len() - 1];
        Ok(Self { k0, k2, ks, residual })
    }

    /// `c` of `I0 = -9 + h ln|h|/2 + c h`.
    pub fn c(&self) -> f64 {
        self.k0 - 0.5
    }

    /// Linear coefficient of `I2`, to compare with `3(c + 1)`.
    pub fn c2(&self) -> f64 {
        self.k2 - 1.5
    }

    pub fn derivatives(&self, h: f64) -> [f64; 3] {
        let l = h.abs().ln();
        [
            -l * l / 6.0 - 2.0 * self.k0 / 3.0 * l + self.ks,
            1.5 * l + self.k2,
            0.5 * l + self.k0,
        ]
    }
}

/// Separatrix expansion; values follow from `M I'`.
pub fn series_separatrix(h: EnergyLevel, fit: &SeparatrixFit) -> IntegralFrame {
    frame_from_derivatives(h.value(), fit.derivatives(h.value()))
}

/// Integrate the derivative system from `seed` to `h_to`.
pub fn pf_flow(seed: &IntegralFrame, h_to: EnergyLevel, opts: OdeOptions) -> Result<IntegralFrame> {
    let d = integrate(rhs, seed.h, seed.derivatives(), h_to.value(), opts)?;
    Ok(frame_from_derivatives(h_to.value(), d))
}

pub fn frame_from_derivatives(h: f64, d: [f64; 3]) -> IntegralFrame {
    let v = pf_values(h, d);
    IntegralFrame {
        h,
        i_star: v[0],
        i2: v[1],
        i0: v[2],
        di_star: d[0],
        di2: d[1],
        di0: d[2],
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FlowOptions {
    /// Seed at `-4 + delta1`.
    pub delta1: f64,
    /// Integrate up to `-delta2`.
    pub delta2: f64,
    pub rtol: f64,
    pub atol: f64,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self {
            delta1: 1e-3,
            delta2: 1e-6,
            rtol: 1e-13,
            atol: 1e-15,
        }
    }
}

/// Dense Picard–Fuchs solution over `[-4 + delta1, -delta2]`, cheap to
/// evaluate anywhere and shareable across threads.
#[derive(Debug, Clone)]
pub struct FrameCache {
    sol: DenseSolution<3>,
    opts: FlowOptions,
    fit: Option<SeparatrixFit>,
}

impl FrameCache {
    pub fn build(opts: FlowOptions) -> Result<Self> {
        let h0 = EnergyLevel::new(-4.0 + opts.delta1)?;
        let h1 = EnergyLevel::new(-opts.delta2)?;
        let seed = series_center(h0, MAX_CENTER_ORDER)?;
        let ode = OdeOptions {
            rtol: opts.rtol,
            atol: opts.atol,
            ..OdeOptions::default()
        };
        let sol = integrate_dense(rhs, h0.value(), seed.derivatives(), h1.value(), ode)?;
        Ok(Self { sol, opts, fit: None })
    }

    /// Attach a separatrix fit so that levels above `-delta2` are served by
    /// the expansion there.
    pub fn with_separatrix(mut self, fit: SeparatrixFit) -> Self {
        self.fit = Some(fit);
        self
    }

    pub fn options(&self) -> FlowOptions {
        self.opts
    }

    pub fn span(&self) -> (f64, f64) {
        self.sol.span()
    }

    pub fn steps(&self) -> usize {
        self.sol.len()
    }

    /// Frame at `h`. Below the seed the center expansion is used; above the
    /// end of the flow the separatrix expansion if one is attached.
    pub fn frame(&self, h: EnergyLevel) -> Result<IntegralFrame> {
        let (a, b) = self.span();
        let hv = h.value();
        if hv < a {
            return series_center(h, MAX_CENTER_ORDER);
        }
        if hv > b {
            return match &self.fit {
                Some(fit) => Ok(series_separatrix(h, fit)),
                None => Err(Error::EnergyOutOfRange(hv)),
            };
        }
        Ok(frame_from_derivatives(hv, self.sol.eval(hv)))
    }

    pub fn derivatives(&self, h: EnergyLevel) -> Result<[f64; 3]> {
        Ok(self.frame(h)?.derivatives())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_solve_inverts_matrix() {
        for h in [-3.5, -2.0, -0.3] {
            let d = [0.3, -1.7, -2.2];
            let v = pf_values(h, d);
            let back = pf_derivatives(h, v).unwrap();
            for k in 0..3 {
                assert!((back[k] - d[k]).abs() < 1e-12);
            }
        }
        assert!(matches!(pf_derivatives(0.0, [1.0; 3]), Err(Error::Singular { .. })));
        assert!(pf_derivatives(-4.0, [1.0; 3]).is_err());
    }

    #[test]
    fn series_order_bounds() {
        let h = EnergyLevel::new(-3.9).unwrap();
        assert!(series_center(h, 0).is_err());
        assert!(series_center(h, 5).is_err());
        let f = series_center(h, 4).unwrap();
        assert!(f.di0 < 0.0 && f.i0 < 0.0);
    }
}

//! The ratio `w(h) = I2'(h)/I0'(h)` and its derivatives.
//!
//! `w` solves the Riccati equation `3h(h+4) w' = R(h, w)` with
//! `R = -2w^2 + 2(h+6)w - 2(2h+9)`, increases from 1 to 3 across the
//! annulus, and stays between the tangent line `l1 = 1 + (h+4)/6` and the
//! chord `l2 = 3 + h/2`.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::EnergyLevel;
use crate::ode::{integrate_dense, DenseSolution, OdeOptions};
use crate::quadrature::{abelian_di, QuadOptions};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioPoint {
    pub h: f64,
    pub w: f64,
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
}

/// `I2'/I0'` by quadrature.
pub fn w_direct(h: EnergyLevel, opts: QuadOptions) -> Result<f64> {
    let (d0, d2, _) = abelian_di(h, opts)?;
    Ok(d2 / d0)
}

pub fn riccati_rhs(h: f64, w: f64) -> f64 {
    -2.0 * w * w + 2.0 * (h + 6.0) * w - 2.0 * (2.0 * h + 9.0)
}

/// Expansion at the center through `(h+4)^3`.
pub fn w_center_series(h: f64) -> f64 {
    let e = h + 4.0;
    1.0 + e / 6.0 + e * e / 108.0 + 7.0 * e * e * e / 5832.0
}

/// Leading behavior at the separatrix, `3 + 6/ln|h|`.
pub fn w_separatrix_asymptote(h: f64) -> f64 {
    3.0 + 6.0 / h.abs().ln()
}

pub fn zeta(h: f64, w: f64) -> f64 {
    let (h2, h3) = (h * h, h * h * h);
    -324.0 - 108.0 * h - 37.0 * h2 - 4.0 * h3
        + 2.0 * (108.0 - 42.0 * h + 4.0 * h2 + h3) * w
        + (-144.0 + 76.0 * h + h2) * w * w
        - 12.0 * (h - 6.0) * w * w * w
        - 12.0 * w.powi(4)
}

/// Dense solution of the Riccati equation over `[-4 + delta, -cutoff]`.
#[derive(Debug, Clone)]
pub struct RiccatiFlow {
    sol: DenseSolution<1>,
}

impl RiccatiFlow {
    pub const DELTA: f64 = 1e-3;
    pub const CUTOFF: f64 = 1e-12;

    pub fn build(delta: f64, cutoff: f64) -> Result<Self> {
        let h0 = -4.0 + delta;
        let f = |h: f64, y: &[f64; 1]| [riccati_rhs(h, y[0]) / (3.0 * h * (h + 4.0))];
        let opts = OdeOptions {
            rtol: 1e-13,
            atol: 1e-15,
            ..OdeOptions::default()
        };
        let sol = integrate_dense(f, h0, [w_center_series(h0)], -cutoff, opts)?;
        let (_, end) = sol.span();
        let w_end = sol.eval(end)[0];
        if !(w_end > 1.0 && w_end < 3.0) {
            return Err(Error::Integration {
                t: end,
                reason: format!("ratio left (1, 3): {w_end}"),
            });
        }
        Ok(Self { sol })
    }

    pub fn span(&self) -> (f64, f64) {
        self.sol.span()
    }

    pub fn eval(&self, h: EnergyLevel) -> f64 {
        let (a, b) = self.span();
        let hv = h.value();
        if hv < a {
            w_center_series(hv)
        } else if hv > b {
            w_separatrix_asymptote(hv)
        } else {
            self.sol.eval(hv)[0]
        }
    }
}

fn shared_flow() -> Result<&'static RiccatiFlow> {
    static FLOW: OnceLock<std::result::Result<RiccatiFlow, String>> = OnceLock::new();
    FLOW.get_or_init(|| RiccatiFlow::build(RiccatiFlow::DELTA, RiccatiFlow::CUTOFF).map_err(|e| e.to_string()))
        .as_ref()
        .map_err(|e| Error::Integration {
            t: -4.0 + RiccatiFlow::DELTA,
            reason: e.clone(),
        })
}

/// `w(h)` from the Riccati flow (built once per process).
pub fn w_riccati(h: EnergyLevel) -> Result<f64> {
    Ok(shared_flow()?.eval(h))
}

/// Closed forms of `w'`, `w''`, `w'''` at an arbitrary point `(h, w)`.
pub fn w_derivs(h: EnergyLevel, w: f64) -> (f64, f64, f64) {
    let h = h.value();
    let d = 3.0 * h * (h + 4.0);
    let w1 = riccati_rhs(h, w) / d;
    let w2 = -2.0 * (6.0 + h - 2.0 * w) * (-2.0 * h - 6.0 * w + h * w + 2.0 * w * w) / (d * d);
    let w3 = 4.0 * zeta(h, w) / (d * d * d);
    (w1, w2, w3)
}

pub fn ratio_point(h: EnergyLevel) -> Result<RatioPoint> {
    let w = w_riccati(h)?;
    let (w1, w2, w3) = w_derivs(h, w);
    Ok(RatioPoint {
        h: h.value(),
        w,
        w1,
        w2,
        w3,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub holds: bool,
    /// `w - l1(h)`.
    pub tangent_margin: f64,
    /// `l2(h) - w`.
    pub chord_margin: f64,
}

/// `l1(h) <= w <= l2(h)` on the closed range `[-4, 0]`.
pub fn envelope_check(h: f64, w: f64) -> Result<Envelope> {
    if !(-4.0..=0.0).contains(&h) {
        return Err(Error::EnergyOutOfRange(h));
    }
    let tangent_margin = w - (1.0 + (h + 4.0) / 6.0);
    let chord_margin = 3.0 + h / 2.0 - w;
    Ok(Envelope {
        holds: tangent_margin >= 0.0 && chord_margin >= 0.0,
        tangent_margin,
        chord_margin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn envelope_examples() {
        let e = envelope_check(-4.0, 1.0).unwrap();
        assert!(e.holds && e.tangent_margin == 0.0 && e.chord_margin == 0.0);
        let e = envelope_check(0.0, 3.0).unwrap();
        assert!(e.holds && e.chord_margin == 0.0);
        assert!(!envelope_check(-2.0, 2.01).unwrap().holds);
        assert!(envelope_check(0.5, 2.0).is_err());
    }

    #[test]
    fn third_derivative_at_critical_point() {
        let (_, _, w3) = w_derivs(EnergyLevel::new(-2.0).unwrap(), 2.0);
        assert!((w3 - 1.0 / 27.0).abs() < 1e-15);
        assert_eq!(zeta(-2.0, 2.0), -16.0);
    }
}

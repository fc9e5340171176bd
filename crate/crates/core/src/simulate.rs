//! Direct simulation of the perturbed triangle system
//!
//! ```text
//! x' = x[b - b x - (b+1) y] + e0 x^2 + e1 y^2
//! y' = y[-a + (a+1) x + a y] + e0 y^2 + e2 x^2,   a = 1 + e3, b = 1 + e4
//! ```
//!
//! The Poincaré section is the diagonal `x = y` between the center
//! `(1/3, 1/3)` and the origin; section points are labeled by `t` with
//! `(x, y) = (t, t)` and `H00 = t^2 (1 - 2t)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cyclicity::mu_from_eps;
use crate::error::{Error, Result};
use crate::geometry::{level_to_h, to_h_chart, triangle_hamiltonian, OvalPoint, TrianglePoint};
use crate::ode::{brent, OdeOptions, Stepper};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EpsVector {
    pub eps: [f64; 5],
}

impl EpsVector {
    pub fn new(eps: [f64; 5]) -> Self {
        Self { eps }
    }

    pub fn alpha(&self) -> f64 {
        1.0 + self.eps[3]
    }

    pub fn beta(&self) -> f64 {
        1.0 + self.eps[4]
    }

    pub fn mu(&self) -> [f64; 4] {
        mu_from_eps(self.eps)
    }

    pub fn norm(&self) -> f64 {
        self.eps.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

pub fn vector_field(x: f64, y: f64, e: &EpsVector) -> (f64, f64) {
    let [e0, e1, e2, _, _] = e.eps;
    let (a, b) = (e.alpha(), e.beta());
    (
        x * (b - b * x - (b + 1.0) * y) + e0 * x * x + e1 * y * y,
        y * (-a + (a + 1.0) * x + a * y) + e0 * y * y + e2 * x * x,
    )
}

/// `X_eps - X_0`; the unperturbed part is tangent to the level sets of `H00`.
pub fn perturbation_part(x: f64, y: f64, e: &EpsVector) -> (f64, f64) {
    let [e0, e1, e2, e3, e4] = e.eps;
    (
        e4 * x * (1.0 - x - y) + e0 * x * x + e1 * y * y,
        e3 * y * (x + y - 1.0) + e0 * y * y + e2 * x * x,
    )
}

/// `dH00/dt` along the perturbed flow.
pub fn h00_rate(x: f64, y: f64, e: &EpsVector) -> f64 {
    let (dx, dy) = perturbation_part(x, y, e);
    y * (1.0 - 2.0 * x - y) * dx + x * (1.0 - x - 2.0 * y) * dy
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionPoint {
    /// `(x, y) = (t, t)`, `0 < t < 1/3`.
    pub t: f64,
    pub h00: f64,
    pub h: f64,
}

impl SectionPoint {
    pub fn from_t(t: f64) -> Result<Self> {
        if !(t > 0.0 && t < 1.0 / 3.0) {
            return Err(Error::EnergyOutOfRange(level_to_h(t * t * (1.0 - 2.0 * t))));
        }
        let h00 = t * t * (1.0 - 2.0 * t);
        Ok(Self { t, h00, h: level_to_h(h00) })
    }

    /// Section point on the oval of level `h`.
    pub fn from_h(h: f64) -> Result<Self> {
        if !(h > -4.0 && h < 0.0) {
            return Err(Error::EnergyOutOfRange(h));
        }
        let target = -h / 108.0;
        let t = brent(|t| t * t * (1.0 - 2.0 * t) - target, 0.0, 1.0 / 3.0, 1e-16);
        Self::from_t(t)
    }

    pub fn triangle_point(&self) -> TrianglePoint {
        TrianglePoint { x: self.t, y: self.t }
    }

    pub fn oval_point(&self) -> OvalPoint {
        to_h_chart(self.triangle_point())
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SimOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Give up after this much time without a return.
    pub t_max: f64,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-12,
            atol: 1e-16,
            t_max: 500.0,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Return {
    pub start: SectionPoint,
    /// Section parameter `(x + y)/2` at the return.
    pub t_return: f64,
    /// `H00(return) - H00(start)`, accumulated along the orbit.
    pub displacement: f64,
    pub period: f64,
    /// Distance between the return point and the diagonal (event residual).
    pub residual: f64,
}

/// One revolution from the section point back to the section.
pub fn poincare_return(s: SectionPoint, e: &EpsVector, opts: &SimOptions) -> Result<Return> {
    let f = |_t: f64, u: &[f64; 3]| {
        let (dx, dy) = vector_field(u[0], u[1], e);
        [dx, dy, h00_rate(u[0], u[1], e)]
    };
    let ode = OdeOptions {
        rtol: opts.rtol,
        atol: opts.atol,
        ..OdeOptions::default()
    };
    let mut st = Stepper::new(f, 0.0, [s.t, s.t, 0.0], 1.0, ode);
    let escape = || Error::Escape { t0: s.t };
    // leave the section first: x - y becomes positive
    let mut armed = false;
    while st.t < opts.t_max {
        let prev = st.y;
        st.step().map_err(|_| escape())?;
        let [x, y, _] = st.y;
        if !(x > 0.0 && y > 0.0 && x + y < 1.0) {
            return Err(escape());
        }
        let g0 = prev[0] - prev[1];
        let g1 = x - y;
        if !armed {
            if g1 < 0.0 {
                armed = true;
            }
            continue;
        }
        if g0 < 0.0 && g1 >= 0.0 && x + y < 2.0 / 3.0 {
            let dense = st.dense().expect("accepted step").clone();
            let tc = brent(
                |t| {
                    let u = dense.eval(t);
                    u[0] - u[1]
                },
                dense.t0,
                dense.t1(),
                1e-15,
            );
            let u = dense.eval(tc);
            return Ok(Return {
                start: s,
                t_return: 0.5 * (u[0] + u[1]),
                displacement: u[2],
                period: tc,
                residual: (u[0] - u[1]).abs(),
            });
        }
    }
    Err(escape())
}

/// Section parameters for a level window, equally spaced in `t`.
pub fn section_grid(h_lo: f64, h_hi: f64, n: usize) -> Result<Vec<SectionPoint>> {
    let a = SectionPoint::from_h(h_lo)?.t;
    let b = SectionPoint::from_h(h_hi)?.t;
    (0..n)
        .map(|i| SectionPoint::from_t(a + (b - a) * i as f64 / (n - 1) as f64))
        .collect()
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CycleOptions {
    pub h_lo: f64,
    pub h_hi: f64,
    pub n: usize,
    /// Bracket width in `t` at which refinement stops.
    pub xtol: f64,
    pub sim: SimOptions,
}

impl Default for CycleOptions {
    fn default() -> Self {
        Self {
            h_lo: -3.9,
            h_hi: -0.1,
            n: 55,
            xtol: 1e-9,
            sim: SimOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Cycle {
    pub t: f64,
    pub h: f64,
    pub oval_point: OvalPoint,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CycleReport {
    pub eps: EpsVector,
    pub count: usize,
    pub cycles: Vec<Cycle>,
    pub samples: Vec<Return>,
    /// Levels of grid points whose orbit left the triangle.
    pub escaped: Vec<f64>,
    pub max_abs_displacement: f64,
}

/// Sign changes of the section displacement between neighbouring grid
/// points, refined by Brent's method. Escaping orbits break the chain.
pub fn count_cycles(e: &EpsVector, opts: &CycleOptions) -> Result<CycleReport> {
    let grid = section_grid(opts.h_lo, opts.h_hi, opts.n)?;
    let runs: Vec<Result<Return>> = grid
        .par_iter()
        .map(|&s| poincare_return(s, e, &opts.sim))
        .collect();
    let mut escaped = Vec::new();
    let mut brackets = Vec::new();
    for (i, r) in runs.iter().enumerate() {
        match r {
            Err(Error::Escape { .. }) => escaped.push(grid[i].h),
            Err(e) => return Err(Error::Integration { t: grid[i].t, reason: e.to_string() }),
            Ok(b) if i > 0 => {
                if let Ok(a) = &runs[i - 1] {
                    if a.displacement * b.displacement < 0.0 {
                        brackets.push((a.start.t, b.start.t));
                    }
                }
            }
            Ok(_) => {}
        }
    }
    let samples: Vec<Return> = runs.into_iter().filter_map(|r| r.ok()).collect();
    let mut cycles: Vec<Cycle> = brackets
        .par_iter()
        .map(|&(a, b)| {
            let d = |t: f64| {
                SectionPoint::from_t(t)
                    .and_then(|s| poincare_return(s, e, &opts.sim))
                    .map_or(f64::NAN, |r| r.displacement)
            };
            let t = brent(d, a, b, opts.xtol);
            let s = SectionPoint::from_t(t)?;
            Ok(Cycle {
                t,
                h: s.h,
                oval_point: s.oval_point(),
            })
        })
        .collect::<Result<_>>()?;
    cycles.sort_by(|a, b| a.h.total_cmp(&b.h));
    Ok(CycleReport {
        eps: *e,
        count: cycles.len(),
        max_abs_displacement: samples.iter().map(|r| r.displacement.abs()).fold(0.0, f64::max),
        cycles,
        samples,
        escaped,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gauge {
    /// All of `mu2, mu3, mu4` vanish.
    Trivial,
    /// `eps3 = eps4 = tau`; covers `mu3 = 0`.
    Equal,
    /// `eps3 = tau, eps4 = -tau`; covers `mu3 != 0`, `mu4 != 0`.
    Antisymmetric,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EpsSolution {
    pub eps: EpsVector,
    pub gauge: Gauge,
    /// `mu` is scaled by `scale = delta^k`, `k` the highest order present.
    pub scale: f64,
    pub mu_target: [f64; 4],
    pub mu_induced: [f64; 4],
    /// Cosine between target and induced `mu`.
    pub cosine: f64,
}

/// An `eps` inducing the direction `mu` with every component `O(delta)`.
pub fn eps_from_mu(mu: [f64; 4], delta: f64) -> Result<EpsSolution> {
    let order = if mu[2] != 0.0 || mu[3] != 0.0 {
        3
    } else if mu[1] != 0.0 {
        2
    } else {
        1
    };
    let scale = delta.powi(order);
    let [m1, m2, m3, m4] = mu.map(|m| m * scale);
    let (rest, gauge) = if m2 == 0.0 && m3 == 0.0 && m4 == 0.0 {
        ([0.0; 4], Gauge::Trivial)
    } else if m3 == 0.0 {
        if m2 == 0.0 {
            return Err(Error::Gauge(format!(
                "mu4 = {m4:e} with mu2 = mu3 = 0 needs eps1 eps3 != eps2 eps4, which forces mu2 or mu3"
            )));
        }
        // mu2 = -tau S/2, mu4 = tau d S/6 with S = e1 + e2, d = e1 - e2
        let tau = (2.0 * m2.abs()).sqrt();
        let s = -2.0 * m2 / tau;
        let d = -3.0 * m4 / m2;
        ([(s + d) / 2.0, (s - d) / 2.0, tau, tau], Gauge::Equal)
    } else {
        if m4 == 0.0 {
            return Err(Error::Gauge(format!(
                "mu3 = {m3:e} with mu4 = 0 has no O(delta) solution with eps3 = -eps4"
            )));
        }
        let s = (36.0 * m4 * m4 / m3).cbrt();
        let tau = s * m3 / (6.0 * m4);
        let d = -2.0 * m2 / tau;
        ([(s + d) / 2.0, (s - d) / 2.0, tau, -tau], Gauge::Antisymmetric)
    };
    let eps = EpsVector::new([-m1, rest[0], rest[1], rest[2], rest[3]]);
    let induced = eps.mu();
    let dot: f64 = induced.iter().zip(&mu).map(|(a, b)| a * b).sum();
    let na = induced.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = mu.iter().map(|x| x * x).sum::<f64>().sqrt();
    let cosine = if na == 0.0 && nb == 0.0 { 1.0 } else { dot / (na * nb) };
    Ok(EpsSolution {
        eps,
        gauge,
        scale,
        mu_target: mu,
        mu_induced: induced.map(|x| x / scale),
        cosine,
    })
}

/// Triangle Hamiltonian at the state of an orbit.
pub fn h00_at(x: f64, y: f64) -> f64 {
    triangle_hamiltonian(TrianglePoint { x, y })
}

//! Parameter charts, the principal displacement function `J(h)`, zero
//! counting, ECT determinants, the three-zero construction and parameter
//! scans.
//!
//! `J` is a linear combination of `(I0', I2', I*')` with coefficients linear
//! in `h` and in the parameters `(lambda, sigma, gamma, kappa)`. Derivative
//! frames come from a shared [`FrameCache`], so evaluating `J` at a level
//! costs one dense-output lookup.

use std::sync::OnceLock;

use num_traits::{ToPrimitive, Zero as _};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::EnergyLevel;
use crate::ode::brent;
use crate::picard_fuchs::{FlowOptions, FrameCache, SeparatrixFit, I0P_CENTER};
use crate::polyalg::{int, parse, ExactPoly, Rat};
use crate::quadrature::{abelian_di, IntegralFrame, QuadOptions};
use crate::ratio::{w_derivs, w_riccati};

/// `greek = L mu`, rows `lambda, sigma, gamma, kappa`.
pub const L_MATRIX: [[i64; 4]; 4] = [
    [0, -1296, -648, 0],
    [-144, -468, -270, -6],
    [0, 216, -324, 0],
    [0, 54, -81, 1],
];

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Greek {
    pub lambda: f64,
    pub sigma: f64,
    pub gamma: f64,
    pub kappa: f64,
}

impl Greek {
    pub fn from_array(a: [f64; 4]) -> Self {
        Self {
            lambda: a[0],
            sigma: a[1],
            gamma: a[2],
            kappa: a[3],
        }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.lambda, self.sigma, self.gamma, self.kappa]
    }

    pub fn norm(self) -> f64 {
        self.to_array().iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn scaled(self, s: f64) -> Self {
        Self::from_array(self.to_array().map(|x| x * s))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationParams {
    pub mu: [f64; 4],
    pub greek: Greek,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Chart {
    Mu,
    Greek,
    Eps,
}

fn to_rat(x: f64) -> Rat {
    Rat::from_float(x).unwrap_or_else(|| Rat::zero())
}

pub fn greek_from_mu_exact(mu: &[Rat; 4]) -> [Rat; 4] {
    std::array::from_fn(|i| (0..4).map(|j| int(L_MATRIX[i][j]) * &mu[j]).sum())
}

/// Exact inverse of [`L_MATRIX`].
pub fn l_inverse() -> &'static [[Rat; 4]; 4] {
    static INV: OnceLock<[[Rat; 4]; 4]> = OnceLock::new();
    INV.get_or_init(|| {
        let mut a: Vec<Vec<Rat>> = (0..4)
            .map(|i| {
                (0..8)
                    .map(|j| if j < 4 { int(L_MATRIX[i][j]) } else { int((j - 4 == i) as i64) })
                    .collect()
            })
            .collect();
        for c in 0..4 {
            let p = (c..4).find(|&r| !a[r][c].is_zero()).expect("L is invertible");
            a.swap(c, p);
            let piv = a[c][c].clone();
            for v in a[c].iter_mut() {
                *v /= &piv;
            }
            for r in 0..4 {
                if r != c && !a[r][c].is_zero() {
                    let f = a[r][c].clone();
                    for j in 0..8 {
                        let t = &f * &a[c][j];
                        a[r][j] -= t;
                    }
                }
            }
        }
        std::array::from_fn(|i| std::array::from_fn(|j| a[i][j + 4].clone()))
    })
}

pub fn mu_from_greek_exact(g: &[Rat; 4]) -> [Rat; 4] {
    let inv = l_inverse();
    std::array::from_fn(|i| (0..4).map(|j| &inv[i][j] * &g[j]).sum())
}

/// `(mu1..mu4)` induced by `eps = (eps0, .., eps4)`.
pub fn mu_from_eps(eps: [f64; 5]) -> [f64; 4] {
    let [e0, e1, e2, e3, e4] = eps;
    let m = e1 * e3 - e2 * e4;
    [
        -e0,
        -(e1 * e3 + e2 * e4) / 2.0,
        m * (e3 - e4) / 2.0,
        m * (e1 + e2) / 6.0,
    ]
}

impl PerturbationParams {
    pub fn from_mu(mu: [f64; 4]) -> Self {
        let g = greek_from_mu_exact(&mu.map(to_rat));
        Self {
            mu,
            greek: Greek::from_array(g.map(|x| x.to_f64().unwrap_or(f64::NAN))),
        }
    }

    pub fn from_greek(greek: Greek) -> Self {
        let mu = mu_from_greek_exact(&greek.to_array().map(to_rat));
        Self {
            mu: mu.map(|x| x.to_f64().unwrap_or(f64::NAN)),
            greek,
        }
    }

    pub fn from_eps(eps: [f64; 5]) -> Self {
        Self::from_mu(mu_from_eps(eps))
    }

    pub fn is_zero(&self) -> bool {
        self.mu.iter().all(|&m| m == 0.0) && self.greek.to_array().iter().all(|&g| g == 0.0)
    }
}

pub fn convert_params(chart: Chart, values: &[f64]) -> Result<PerturbationParams> {
    let want = if chart == Chart::Eps { 5 } else { 4 };
    if values.len() != want {
        return Err(Error::Parse {
            pos: values.len(),
            msg: format!("{chart:?} chart takes {want} values"),
        });
    }
    Ok(match chart {
        Chart::Mu => PerturbationParams::from_mu([values[0], values[1], values[2], values[3]]),
        Chart::Greek => PerturbationParams::from_greek(Greek::from_array([values[0], values[1], values[2], values[3]])),
        Chart::Eps => PerturbationParams::from_eps([values[0], values[1], values[2], values[3], values[4]]),
    })
}

/// Coefficients of `(I*', I2', I0')` in `J`.
pub fn j_coefficients(h: f64, g: &Greek) -> [f64; 3] {
    let Greek {
        lambda: l,
        sigma: s,
        gamma: c,
        kappa: k,
    } = *g;
    let a0 = (2.0 * (3.0 * l - 12.0 * s - 10.0 * c + 72.0 * k) + (l - 4.0 * s + 2.0 * c - 8.0 * k) * h) / 5184.0;
    let a2 = (-l + 4.0 * s - 2.0 * c - 24.0 * k) / 2592.0;
    let a_star = (l + 6.0 * c) / 1296.0;
    [a_star, a2, a0]
}

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn j_from_frame(f: &IntegralFrame, g: &Greek) -> f64 {
    dot3(j_coefficients(f.h, g), f.derivatives())
}

/// Coefficients of `(I*', I2', I0')` in `J_k`, `k = 1..=4`.
pub fn jk_coefficients(k: usize, h: f64) -> [f64; 3] {
    match k {
        1 => [0.0, -2.0 / 9.0, (h + 6.0) / 9.0],
        2 => [0.0, -8.0 / 9.0, (h + 12.0) / 9.0],
        3 => [-2.0, 5.0 / 6.0, (h - 6.0) / 12.0],
        4 => [0.0, -1.0 / 54.0, (h + 18.0) / 324.0],
        _ => panic!("J index {k} out of range"),
    }
}

/// `f = -16 lambda - 16 sigma h + (lambda - 4 sigma + 2 gamma - 8 kappa) h^2 - 32 (gamma + kappa h) w`.
pub fn f_eval(h: f64, g: &Greek, w: f64) -> f64 {
    -16.0 * g.lambda - 16.0 * g.sigma * h + (g.lambda - 4.0 * g.sigma + 2.0 * g.gamma - 8.0 * g.kappa) * h * h
        - 32.0 * (g.gamma + g.kappa * h) * w
}

/// `f(0) = -16 (lambda + 6 gamma)`.
pub fn f_separatrix(g: &Greek) -> f64 {
    -16.0 * (g.lambda + 6.0 * g.gamma)
}

/// `f'(-4) = -(8/3)(3 lambda - 6 sigma + 8 gamma - 20 kappa)`.
pub fn f_prime_center(g: &Greek) -> f64 {
    -8.0 / 3.0 * (3.0 * g.lambda - 6.0 * g.sigma + 8.0 * g.gamma - 20.0 * g.kappa)
}

/// `J(-4) = (4 kappa - gamma) I0'(-4) / 162`.
pub fn j_center(g: &Greek) -> f64 {
    (4.0 * g.kappa - g.gamma) / 162.0 * I0P_CENTER
}

/// `J'(-4) = -f'(-4) I0'(-4) / 31104`.
pub fn j_prime_center(g: &Greek) -> f64 {
    -f_prime_center(g) * I0P_CENTER / 31104.0
}

/// `rho = w''/w''' + (h + gamma)/3` along `w = w(h)` (kappa = 1).
pub fn rho_eval(h: EnergyLevel, gamma: f64) -> Result<f64> {
    let w = w_riccati(h)?;
    let (_, w2, w3) = w_derivs(h, w);
    if w3 == 0.0 || !w3.is_finite() {
        return Err(Error::Singular { h: h.value(), det: w3 });
    }
    Ok(w2 / w3 + (h.value() + gamma) / 3.0)
}

/// `(A, B, C)` of `J ~ A L^2 + B L + C`, `L = ln|h|`, near the separatrix.
pub fn separatrix_model(fit: &SeparatrixFit, g: &Greek) -> [f64; 3] {
    let [cs, c2, c0] = j_coefficients(0.0, g);
    [
        -cs / 6.0,
        0.5 * c0 + 1.5 * c2 - 2.0 * fit.k0 / 3.0 * cs,
        c0 * fit.k0 + c2 * fit.k2 + cs * fit.ks,
    ]
}

/// Shared evaluation context: the Picard–Fuchs dense cache plus the
/// separatrix constants.
#[derive(Debug, Clone)]
pub struct JContext {
    pub cache: FrameCache,
    pub tail: SeparatrixFit,
}

impl JContext {
    pub fn build(flow: FlowOptions, quad: QuadOptions) -> Result<Self> {
        let tail = SeparatrixFit::fit(quad)?;
        Ok(Self {
            cache: FrameCache::build(flow)?.with_separatrix(tail),
            tail,
        })
    }

    /// Process-wide context with default options.
    pub fn shared() -> Result<&'static JContext> {
        static CTX: OnceLock<std::result::Result<JContext, String>> = OnceLock::new();
        CTX.get_or_init(|| Self::build(FlowOptions::default(), QuadOptions::with_tol(1e-12)).map_err(|e| e.to_string()))
            .as_ref()
            .map_err(|e| Error::Integration {
                t: f64::NAN,
                reason: e.clone(),
            })
    }

    pub fn frame(&self, h: f64) -> Result<IntegralFrame> {
        self.cache.frame(EnergyLevel::new(h)?)
    }

    pub fn j(&self, h: f64, g: &Greek) -> Result<f64> {
        Ok(j_from_frame(&self.frame(h)?, g))
    }

    /// `J' = f I0' / (7776 h (h+4))`.
    pub fn j_prime(&self, h: f64, g: &Greek) -> Result<f64> {
        let f = self.frame(h)?;
        let w = f.di2 / f.di0;
        Ok(f_eval(h, g, w) * f.di0 / (7776.0 * h * (h + 4.0)))
    }

    pub fn jk(&self, k: usize, h: f64) -> Result<f64> {
        Ok(dot3(jk_coefficients(k, h), self.frame(h)?.derivatives()))
    }
}

/// J via quadrature frames; the oracle path.
pub fn j_quadrature(h: EnergyLevel, g: &Greek, opts: QuadOptions) -> Result<f64> {
    let (d0, d2, ds) = abelian_di(h, opts)?;
    Ok(dot3(j_coefficients(h.value(), g), [ds, d2, d0]))
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ZeroOptions {
    pub delta1: f64,
    pub delta2: f64,
    /// Uniform points on `[-4 + delta1, split]`.
    pub n_uniform: usize,
    /// Log-spaced points toward each endpoint.
    pub n_log: usize,
    pub split: f64,
    pub xtol: f64,
    /// A zero is simple when `|J'| w > simple_tol * m`, where `w` and `m`
    /// are the width of and the largest `|J|` on the surrounding
    /// `2 * neighborhood` grid cells.
    pub simple_tol: f64,
    /// Local minima of `|J|` below `tangent_tol * m` are flagged.
    pub tangent_tol: f64,
    pub neighborhood: usize,
}

impl Default for ZeroOptions {
    fn default() -> Self {
        Self {
            delta1: 1e-3,
            delta2: 1e-6,
            n_uniform: 1600,
            n_log: 200,
            split: -0.05,
            xtol: 1e-13,
            simple_tol: 1e-6,
            tangent_tol: 1e-6,
            neighborhood: 8,
        }
    }
}

impl ZeroOptions {
    pub fn grid(&self) -> Vec<f64> {
        let a = -4.0 + self.delta1;
        let mut g: Vec<f64> = (0..self.n_uniform)
            .map(|i| a + (self.split - a) * i as f64 / (self.n_uniform - 1) as f64)
            .collect();
        let (l1, l2) = (self.delta1.ln(), (self.split + 4.0).ln());
        g.extend((1..self.n_log).map(|i| -4.0 + (l1 + (l2 - l1) * i as f64 / self.n_log as f64).exp()));
        let (l1, l2) = ((-self.split).ln(), self.delta2.ln());
        g.extend((1..=self.n_log).map(|i| -(l1 + (l2 - l1) * i as f64 / self.n_log as f64).exp()));
        g.sort_by(|x, y| x.total_cmp(y));
        g.dedup();
        g
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroRegion {
    CenterTail,
    Interior,
    SeparatrixTail,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Zero {
    pub h: f64,
    pub bracket: (f64, f64),
    /// `+1` when J increases through the zero.
    pub direction: i8,
    pub simple: bool,
    pub region: ZeroRegion,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ZeroReport {
    pub greek: Greek,
    pub zeros: Vec<Zero>,
    /// Near-tangencies: local minima of `|J|` without a sign change.
    pub near_tangencies: Vec<f64>,
    pub j_center: f64,
    pub j_prime_center: f64,
    pub f_separatrix: f64,
    /// Sign of `J` just above `-4` and just below `0`.
    pub center_sign: i8,
    pub separatrix_sign: i8,
    pub parity_consistent: bool,
    pub tail_model_mismatch: bool,
    pub count: usize,
    /// Zeros or tangencies that are multiplicity-suspect.
    pub flagged: usize,
}

fn sgn(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

// Golden-section minimum of |J| on [a, b].
fn min_abs<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c).abs(), f(d).abs());
    for _ in 0..80 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c).abs();
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d).abs();
        }
        if (b - a).abs() < 1e-14 * a.abs().max(1.0) {
            break;
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Zeros of `J` in `(-4, 0)`.
pub fn count_zeros(ctx: &JContext, params: &PerturbationParams, opts: &ZeroOptions) -> Result<ZeroReport> {
    if params.is_zero() {
        return Err(Error::DegenerateParams);
    }
    let g = params.greek;
    let grid = opts.grid();
    let vals: Vec<f64> = grid.iter().map(|&h| ctx.j(h, &g)).collect::<Result<_>>()?;
    let n = grid.len();
    let local = |i: usize| {
        let lo = i.saturating_sub(opts.neighborhood);
        let hi = (i + opts.neighborhood + 1).min(n - 1);
        let m = vals[lo..=hi].iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        (grid[hi] - grid[lo], m)
    };
    let jf = |h: f64| ctx.j(h, &g).unwrap_or(f64::NAN);
    let mut zeros = Vec::new();
    let mut near = Vec::new();
    let mut flagged = 0;

    // tail at the center: linear model from the closed-form endpoint values
    let jc = j_center(&g);
    let jpc = j_prime_center(&g);
    let tiny = 1e-14 * g.norm();
    let center_sign = if jc.abs() > tiny { sgn(jc) } else { sgn(jpc) };
    let first = sgn(vals[0]);
    if center_sign != 0 && first != 0 && center_sign != first {
        let e = if jpc != 0.0 { -jc / jpc } else { f64::NAN };
        let h = if e > 0.0 && e < opts.delta1 { -4.0 + e } else { -4.0 + 0.5 * opts.delta1 };
        zeros.push(Zero {
            h,
            bracket: (-4.0, grid[0]),
            direction: first,
            simple: {
                let (_, m) = local(0);
                jpc.abs() * opts.delta1 > opts.simple_tol * m
            },
            region: ZeroRegion::CenterTail,
        });
    }

    for i in 0..grid.len() - 1 {
        let (a, b) = (grid[i], grid[i + 1]);
        let (fa, fb) = (vals[i], vals[i + 1]);
        if fa == 0.0 && i > 0 {
            continue;
        }
        if sgn(fa) * sgn(fb) < 0 || fb == 0.0 {
            let r = if fb == 0.0 { b } else { brent(jf, a, b, opts.xtol) };
            let d = ctx.j_prime(r, &g)?;
            let (width, m) = local(i);
            let simple = d.abs() * width > opts.simple_tol * m;
            if !simple {
                flagged += 1;
            }
            zeros.push(Zero {
                h: r,
                bracket: (a, b),
                direction: sgn(fb - fa),
                simple,
                region: ZeroRegion::Interior,
            });
        } else if i > 0
            && sgn(vals[i - 1]) == sgn(fa)
            && sgn(fa) == sgn(fb)
            && fa.abs() < vals[i - 1].abs()
            && fa.abs() < fb.abs()
        {
            let (hm, m) = min_abs(jf, grid[i - 1], b);
            if m < opts.tangent_tol * local(i).1 {
                near.push(hm);
                flagged += 1;
            }
        }
    }

    // tail at the separatrix: J ~ A L^2 + B L + C
    let [qa, qb, qc] = separatrix_model(&ctx.tail, &g);
    let separatrix_sign = if qa.abs() > tiny {
        sgn(qa)
    } else if qb.abs() > tiny {
        -sgn(qb)
    } else {
        sgn(qc)
    };
    let l2 = opts.delta2.ln();
    let mut roots: Vec<f64> = if qa.abs() > tiny {
        let disc = qb * qb - 4.0 * qa * qc;
        if disc < 0.0 {
            vec![]
        } else {
            let s = disc.sqrt();
            let q = -0.5 * (qb + qb.signum() * s);
            let mut r = vec![q / qa];
            if q != 0.0 {
                r.push(qc / q);
            }
            r
        }
    } else if qb.abs() > tiny {
        vec![-qc / qb]
    } else {
        vec![]
    };
    roots.retain(|&l| l < l2);
    let last = sgn(*vals.last().expect("nonempty grid"));
    let want_odd = separatrix_sign != 0 && last != 0 && separatrix_sign != last;
    let mut tail_model_mismatch = false;
    if (roots.len() % 2 == 1) != want_odd {
        tail_model_mismatch = true;
        if roots.is_empty() {
            roots.push(l2 - 1.0);
        } else {
            roots.sort_by(|a, b| b.total_cmp(a));
            roots.remove(0);
        }
    }
    roots.sort_by(|a, b| b.total_cmp(a));
    for l in roots {
        let h = -l.exp();
        let slope = (2.0 * qa * l + qb) / h;
        zeros.push(Zero {
            h,
            bracket: (*grid.last().expect("nonempty"), 0.0),
            direction: sgn(-slope),
            simple: true,
            region: ZeroRegion::SeparatrixTail,
        });
    }

    let count = zeros.len();
    let parity_consistent = (count % 2 == 1) == (center_sign != separatrix_sign);
    Ok(ZeroReport {
        greek: g,
        zeros,
        near_tangencies: near,
        j_center: jc,
        j_prime_center: jpc,
        f_separatrix: f_separatrix(&g),
        center_sign,
        separatrix_sign,
        parity_consistent,
        tail_model_mismatch,
        count,
        flagged,
    })
}

// Numerators of d^i/dh^i J_k over D^i, D = 3h(h+4), as exact polynomials
// in h; entries ordered (I*', I2', I0').
fn ect_numerators() -> &'static Vec<Vec<[ExactPoly; 3]>> {
    static NUM: OnceLock<Vec<Vec<[ExactPoly; 3]>>> = OnceLock::new();
    NUM.get_or_init(|| {
        let d = parse("3*h*(h+4)");
        let dp = parse("6*h+12");
        let base = [
            ["0", "-2/9", "(h+6)/9"],
            ["0", "-8/9", "(h+12)/9"],
            ["-2", "5/6", "(h-6)/12"],
            ["0", "-1/54", "(h+18)/324"],
        ];
        base.iter()
            .map(|row| {
                let mut out = vec![[parse(row[0]), parse(row[1]), parse(row[2])]];
                for i in 0..3i64 {
                    let [ns, n2, n0] = out.last().expect("nonempty").clone();
                    let ki = int(i);
                    let lift = |p: &ExactPoly| &(&p.derivative("h") * &d) - &(&dp * p).scale(&ki);
                    let new0 = lift(&n0) - &n0 * &parse("6+h") - &n2 * &parse("2*(9+2*h)") - &ns * &parse("2*(h+4)");
                    let new2 = lift(&n2) + n0.scale(&int(2)) + &n2 * &parse("h+6");
                    let news = lift(&ns);
                    out.push([news, new2, new0]);
                }
                out
            })
            .collect()
    })
}

/// `d^i J_k / dh^i` at a frame, `k = 1..=4`, `i = 0..=3`.
pub fn jk_derivative(k: usize, i: usize, f: &IntegralFrame) -> f64 {
    let n = &ect_numerators()[k - 1][i];
    let pt = [("h", f.h)];
    let c = [n[0].eval_f64(&pt), n[1].eval_f64(&pt), n[2].eval_f64(&pt)];
    dot3(c, f.derivatives()) / (3.0 * f.h * (f.h + 4.0)).powi(i as i32)
}

fn det(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m.to_vec();
    let mut d = 1.0;
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).expect("nonempty");
        if a[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= a[c][c];
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for j in c..n {
                a[r][j] -= f * a[c][j];
            }
        }
    }
    d
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EctPoint {
    pub h: f64,
    pub deltas: [f64; 4],
    /// Largest relative gap between exact derivative entries and central
    /// differences of the next-lower entries.
    pub fd_gap: f64,
    pub inconclusive: bool,
}

/// Wronskian-type determinants `Delta_k = det[J_j^(i)]_{i,j<k}`.
pub fn ect_determinants(ctx: &JContext, h: f64) -> Result<EctPoint> {
    let f = ctx.frame(h)?;
    let w: Vec<Vec<f64>> = (0..4).map(|i| (1..=4).map(|k| jk_derivative(k, i, &f)).collect()).collect();
    let deltas: [f64; 4] = std::array::from_fn(|k| {
        let sub: Vec<Vec<f64>> = (0..=k).map(|i| w[i][..=k].to_vec()).collect();
        det(&sub)
    });
    let s = 1e-3 * (h + 4.0).min(-h).min(1.0);
    let fp = ctx.frame(h + s)?;
    let fm = ctx.frame(h - s)?;
    let mut fd_gap: f64 = 0.0;
    for i in 1..4 {
        let row_scale = w[i].iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for k in 1..=4 {
            let fd = (jk_derivative(k, i - 1, &fp) - jk_derivative(k, i - 1, &fm)) / (2.0 * s);
            fd_gap = fd_gap.max((fd - w[i][k - 1]).abs() / row_scale);
        }
    }
    Ok(EctPoint {
        h,
        deltas,
        fd_gap,
        inconclusive: fd_gap > 1e-3,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EctWindow {
    /// First grid level where some `Delta_k >= 0` or the check is
    /// inconclusive; `-delta2` if none.
    pub b: f64,
    /// `-4 + 0.9 (b + 4)`.
    pub certified: f64,
    pub points: Vec<EctPoint>,
    pub all_negative: bool,
}

/// Scan `Delta_k` on `n` log-spaced levels from `-4 + start` to `-delta2`.
pub fn ect_window(ctx: &JContext, n: usize, start: f64, delta2: f64) -> Result<EctWindow> {
    let (l1, l2) = (start.ln(), (4.0 - delta2).ln());
    let mut hs: Vec<f64> = (0..n).map(|i| -4.0 + (l1 + (l2 - l1) * i as f64 / (n - 1) as f64).exp()).collect();
    hs[n - 1] = -delta2;
    let points: Vec<EctPoint> = hs.par_iter().map(|&h| ect_determinants(ctx, h)).collect::<Result<_>>()?;
    let bad = points.iter().position(|p| p.inconclusive || p.deltas.iter().any(|&d| !(d < 0.0)));
    let b = bad.map_or(-delta2, |i| points[i].h);
    let inside: Vec<EctPoint> = points.iter().copied().filter(|p| p.h < b).collect();
    Ok(EctWindow {
        b,
        certified: -4.0 + 0.9 * (b + 4.0),
        all_negative: !inside.is_empty() && inside.iter().all(|p| p.deltas.iter().all(|&d| d < 0.0)),
        points: inside,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThreeZeros {
    pub targets: [f64; 3],
    pub params: PerturbationParams,
    pub report: ZeroReport,
}

/// Unit vector `mu` with `J(h_i) = 0` at the three levels: the kernel of the
/// 3x4 matrix `[J_k(h_i)]`, from signed 3x3 minors. The largest component is
/// made positive.
pub fn target_kernel(ctx: &JContext, targets: [f64; 3]) -> Result<[f64; 4]> {
    let rows: Vec<[f64; 4]> = targets
        .iter()
        .map(|&h| Ok([ctx.jk(1, h)?, ctx.jk(2, h)?, ctx.jk(3, h)?, ctx.jk(4, h)?]))
        .collect::<Result<_>>()?;
    let mut mu = [0.0; 4];
    for (k, m) in mu.iter_mut().enumerate() {
        let minor: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| (0..4).filter(|&j| j != k).map(|j| r[j]).collect())
            .collect();
        *m = if k % 2 == 0 { det(&minor) } else { -det(&minor) };
    }
    let norm = mu.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(norm > 0.0) {
        return Err(Error::InvalidTargets("rank-deficient target system".into()));
    }
    let big = mu.iter().copied().max_by(|x, y| x.abs().total_cmp(&y.abs())).expect("four");
    Ok(mu.map(|x| x / norm * big.signum()))
}

/// Parameters whose `J` vanishes at three prescribed levels; verified by
/// [`count_zeros`] to have exactly those three simple zeros.
pub fn find_three_zeros(ctx: &JContext, targets: [f64; 3], opts: &ZeroOptions) -> Result<ThreeZeros> {
    let [a, b, c] = targets;
    if !(a > -4.0 && a < b && b < c && c < 0.0) {
        return Err(Error::InvalidTargets(format!("need -4 < h1 < h2 < h3 < 0, got {targets:?}")));
    }
    let mu = target_kernel(ctx, targets)?;
    let params = PerturbationParams::from_mu(mu);
    let report = count_zeros(ctx, &params, opts)?;
    let hits = targets
        .iter()
        .all(|&t| report.zeros.iter().any(|z| z.simple && (z.h - t).abs() < 1e-6 * (1.0 + t.abs())));
    if report.count != 3 || report.flagged != 0 || !hits {
        return Err(Error::WindowTooLarge { found: report.count });
    }
    Ok(ThreeZeros {
        targets,
        params,
        report,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stratum {
    /// `kappa = 0`.
    Kappa0,
    /// `kappa = 1`, `gamma <= -26/7` or `gamma >= 0`.
    Kappa1Outer,
    /// `kappa = 1`, `-26/7 < gamma < 0`, `f(0) >= 0`.
    Kappa1MidF0NonNeg,
    /// `kappa = 1`, `-26/7 < gamma < 0`, `f(0) < 0`.
    Kappa1MidF0Neg,
    /// Random target triples through [`find_three_zeros`].
    Constructed,
}

impl Stratum {
    pub const ALL: [Stratum; 5] = [
        Stratum::Kappa0,
        Stratum::Kappa1Outer,
        Stratum::Kappa1MidF0NonNeg,
        Stratum::Kappa1MidF0Neg,
        Stratum::Constructed,
    ];

    pub fn predicted_bound(self) -> usize {
        match self {
            Stratum::Kappa1MidF0Neg => 2,
            _ => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Stratum::Kappa0 => "kappa0",
            Stratum::Kappa1Outer => "kappa1_outer",
            Stratum::Kappa1MidF0NonNeg => "kappa1_mid_f0_nonneg",
            Stratum::Kappa1MidF0Neg => "kappa1_mid_f0_neg",
            Stratum::Constructed => "constructed",
        }
    }

    /// Stratum of a direction after rescaling to `kappa = 1` when
    /// `kappa != 0` (J only changes by a nonzero factor).
    pub fn classify(g: &Greek) -> Stratum {
        if g.kappa == 0.0 {
            return Stratum::Kappa0;
        }
        let n = g.scaled(1.0 / g.kappa);
        if n.gamma <= -26.0 / 7.0 || n.gamma >= 0.0 {
            Stratum::Kappa1Outer
        } else if f_separatrix(&n) < 0.0 {
            Stratum::Kappa1MidF0Neg
        } else {
            Stratum::Kappa1MidF0NonNeg
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanSpec {
    pub samples: usize,
    pub seed: u64,
    /// Fraction of samples drawn with `kappa = 0`.
    pub kappa0_fraction: f64,
    /// Fraction of samples built from random target triples.
    pub constructed_fraction: f64,
    /// Upper end of the window for constructed targets.
    pub window: f64,
}

impl Default for ScanSpec {
    fn default() -> Self {
        Self {
            samples: 10_000,
            seed: 20240917,
            kappa0_fraction: 0.2,
            constructed_fraction: 0.05,
            window: -3.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanSample {
    pub index: usize,
    pub stratum: Stratum,
    pub greek: Greek,
    pub count: usize,
    pub flagged: usize,
    pub parity_consistent: bool,
    pub tail_model_mismatch: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StratumSummary {
    pub stratum: Stratum,
    pub name: String,
    pub samples: usize,
    pub max_count: usize,
    pub predicted_bound: usize,
    /// Samples with 0, 1, 2, 3, and 4 or more zeros.
    pub histogram: [usize; 5],
    pub flagged: usize,
    pub within_bound: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanReport {
    pub spec: ScanSpec,
    pub strata: Vec<StratumSummary>,
    pub global_max: usize,
    pub flagged_samples: usize,
    pub parity_failures: usize,
    pub tail_mismatches: usize,
    /// Largest count among all directions with `kappa != 0`, `gamma < 0`
    /// and `f(0) < 0` after normalization.
    pub gamma_neg_f0_neg_max: usize,
    pub samples: Vec<ScanSample>,
}

fn unit_direction(rng: &mut ChaCha8Rng, dims: usize) -> [f64; 4] {
    loop {
        let mut v = [0.0; 4];
        for x in v.iter_mut().take(dims) {
            *x = StandardNormal.sample(rng);
        }
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-12 {
            return v.map(|x| x / n);
        }
    }
}

fn scan_sample(ctx: &JContext, spec: &ScanSpec, opts: &ZeroOptions, index: usize) -> Result<ScanSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(index as u64);
    let u: f64 = rng.random();
    let (stratum, greek, report) = if u < spec.constructed_fraction {
        let lo = -4.0 + 2.0 * opts.delta1;
        let mut t = [0.0; 3];
        loop {
            for x in t.iter_mut() {
                *x = lo + (spec.window - lo) * rng.random::<f64>();
            }
            t.sort_by(|a, b| a.total_cmp(b));
            if t[1] - t[0] > 0.02 * (spec.window - lo) && t[2] - t[1] > 0.02 * (spec.window - lo) {
                break;
            }
        }
        let three = find_three_zeros(ctx, t, opts);
        match three {
            Ok(th) => (Stratum::Constructed, th.params.greek, th.report),
            Err(Error::WindowTooLarge { .. }) => {
                let p = PerturbationParams::from_mu(target_kernel(ctx, t)?);
                (Stratum::Constructed, p.greek, count_zeros(ctx, &p, opts)?)
            }
            Err(e) => return Err(e),
        }
    } else if u < spec.constructed_fraction + spec.kappa0_fraction {
        let v = unit_direction(&mut rng, 3);
        let g = Greek::from_array(v);
        let p = PerturbationParams::from_greek(g);
        (Stratum::Kappa0, g, count_zeros(ctx, &p, opts)?)
    } else {
        let g = Greek::from_array(unit_direction(&mut rng, 4));
        let p = PerturbationParams::from_greek(g);
        (Stratum::classify(&g), g, count_zeros(ctx, &p, opts)?)
    };
    Ok(ScanSample {
        index,
        stratum,
        greek,
        count: report.count,
        flagged: report.flagged,
        parity_consistent: report.parity_consistent,
        tail_model_mismatch: report.tail_model_mismatch,
    })
}

/// Seeded parameter scan; sample `i` draws from its own ChaCha stream, so
/// results do not depend on thread scheduling.
pub fn scan(ctx: &JContext, spec: &ScanSpec, opts: &ZeroOptions) -> Result<ScanReport> {
    let samples: Vec<ScanSample> = (0..spec.samples)
        .into_par_iter()
        .map(|i| scan_sample(ctx, spec, opts, i))
        .collect::<Result<_>>()?;
    let strata = Stratum::ALL
        .iter()
        .map(|&s| {
            let mine: Vec<&ScanSample> = samples.iter().filter(|x| x.stratum == s).collect();
            let mut histogram = [0usize; 5];
            for x in &mine {
                histogram[x.count.min(4)] += 1;
            }
            let max_count = mine.iter().map(|x| x.count).max().unwrap_or(0);
            StratumSummary {
                stratum: s,
                name: s.name().to_string(),
                samples: mine.len(),
                max_count,
                predicted_bound: s.predicted_bound(),
                histogram,
                flagged: mine.iter().filter(|x| x.flagged > 0).count(),
                within_bound: max_count <= s.predicted_bound(),
            }
        })
        .collect();
    let gamma_neg_f0_neg_max = samples
        .iter()
        .filter(|x| x.greek.kappa != 0.0)
        .filter(|x| {
            let n = x.greek.scaled(1.0 / x.greek.kappa);
            n.gamma < 0.0 && f_separatrix(&n) < 0.0
        })
        .map(|x| x.count)
        .max()
        .unwrap_or(0);
    Ok(ScanReport {
        spec: spec.clone(),
        strata,
        global_max: samples.iter().map(|x| x.count).max().unwrap_or(0),
        flagged_samples: samples.iter().filter(|x| x.flagged > 0).count(),
        parity_failures: samples.iter().filter(|x| !x.parity_consistent).count(),
        tail_mismatches: samples.iter().filter(|x| x.tail_model_mismatch).count(),
        gamma_neg_f0_neg_max,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::rat;

    #[test]
    fn chart_examples() {
        let p = PerturbationParams::from_mu([1.0, 0.0, 0.0, 0.0]);
        assert_eq!(p.greek.to_array(), [0.0, -144.0, 0.0, 0.0]);
        let p = PerturbationParams::from_eps([0.1, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(p.mu, [-0.1, 0.0, 0.0, 0.0]);
        assert!(PerturbationParams::from_mu([0.0; 4]).is_zero());
    }

    #[test]
    fn inverse_is_exact() {
        let mu = [rat(1, 3), rat(-2, 7), rat(5, 11), rat(13, 17)];
        assert_eq!(mu_from_greek_exact(&greek_from_mu_exact(&mu)), mu);
    }

    #[test]
    fn center_value_vanishes_on_gamma_four_kappa() {
        let g = Greek {
            lambda: 0.3,
            sigma: -1.1,
            gamma: 4.0,
            kappa: 1.0,
        };
        assert_eq!(j_center(&g), 0.0);
    }
}

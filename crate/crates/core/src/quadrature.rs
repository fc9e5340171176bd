//! Direct evaluation of the Abelian integrals over the ovals `H = h` and of
//! the original area/line integrals `J1..J4` in the triangle chart.
//!
//! Every integral over `[x1, x2]` is rewritten with `x = x1 + (x2-x1) sin^2 θ`,
//! which turns the square-root endpoint behavior into smooth integrands on
//! `[0, π/2]`. Near `h = 0` the integrands still develop peaks of width
//! `sqrt|h|` at both ends of the θ-range; tanh-sinh handles these as long as
//! the integrand sees the exact distance to each endpoint, so the rule below
//! passes both distances to the callback.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{self, newton_bisect, oval_extent, EnergyLevel, OvalExtent};

/// A quadrature node on `[a, b]`, with both endpoint distances carried
/// separately so that `b - x` never suffers cancellation.
#[derive(Debug, Clone, Copy)]
pub struct Node {
    pub x: f64,
    pub from_a: f64,
    pub to_b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadOptions {
    /// Relative tolerance on the difference of successive levels.
    pub tol: f64,
    pub max_level: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_level: 12,
        }
    }
}

impl QuadOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

const T_MAX: f64 = 6.0;

// (complement 1 - |x|, weight) on [-1, 1] for t = j * 2^-level, odd j only
// when level > 0. Computed once for every level.
struct Level {
    nodes: Vec<(f64, f64)>,
}

fn levels() -> &'static [Level] {
    static LEVELS: OnceLock<Vec<Level>> = OnceLock::new();
    LEVELS.get_or_init(|| {
        (0..=14)
            .map(|lvl| {
                let step = (0.5f64).powi(lvl);
                let mut nodes = Vec::new();
                let mut j = if lvl == 0 { 0u64 } else { 1 };
                loop {
                    let t = j as f64 * step;
                    if t > T_MAX {
                        break;
                    }
                    let u = FRAC_PI_2 * t.sinh();
                    let e = (-2.0 * u).exp();
                    let comp = 2.0 * e / (1.0 + e);
                    let weight = FRAC_PI_2 * t.cosh() * 4.0 * e / ((1.0 + e) * (1.0 + e));
                    if comp > 0.0 && weight > 0.0 {
                        nodes.push((comp, weight));
                    }
                    j += if lvl == 0 { 1 } else { 2 };
                }
                Level { nodes }
            })
            .collect()
    })
}

/// Vector-valued tanh-sinh quadrature of `f` over `[a, b]`.
///
/// Returns the integral and the difference between the last two levels.
pub fn tanh_sinh<const N: usize, F>(f: F, a: f64, b: f64, opts: QuadOptions) -> Result<([f64; N], f64)>
where
    F: Fn(Node) -> [f64; N],
{
    let half = 0.5 * (b - a);
    let levels = levels();
    let max_level = opts.max_level.min(levels.len() - 1);
    let mut acc = [0.0f64; N];
    let mut prev = [f64::NAN; N];
    let mut last_err = f64::INFINITY;

    let add_node = |acc: &mut [f64; N], comp: f64, w: f64, center: bool| {
        let d = half * comp;
        if center {
            let v = f(Node {
                x: a + half,
                from_a: half,
                to_b: half,
            });
            for k in 0..N {
                acc[k] += w * v[k];
            }
            return;
        }
        let left = f(Node {
            x: a + d,
            from_a: d,
            to_b: (b - a) - d,
        });
        let right = f(Node {
            x: b - d,
            from_a: (b - a) - d,
            to_b: d,
        });
        for k in 0..N {
            acc[k] += w * (left[k] + right[k]);
        }
    };

    for (lvl, level) in levels.iter().enumerate().take(max_level + 1) {
        for (i, &(comp, w)) in level.nodes.iter().enumerate() {
            add_node(&mut acc, comp, w, lvl == 0 && i == 0);
        }
        let step = 0.5f64.powi(lvl as i32);
        let mut cur = [0.0; N];
        for k in 0..N {
            cur[k] = acc[k] * step * half;
        }
        if lvl >= 3 {
            let mut ok = true;
            let mut worst = 0.0f64;
            for k in 0..N {
                let diff = (cur[k] - prev[k]).abs();
                let scale = cur[k].abs().max(1e-280);
                worst = worst.max(diff / scale);
                if !(diff <= opts.tol * scale) {
                    ok = false;
                }
            }
            last_err = worst;
            if ok {
                return Ok((cur, worst));
            }
        }
        prev = cur;
    }
    Err(Error::Quadrature {
        estimate: prev[0],
        achieved: last_err,
        requested: opts.tol,
    })
}

/// Values and h-derivatives of `(I*, I2, I0)` at one level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralFrame {
    pub h: f64,
    pub i_star: f64,
    pub i2: f64,
    pub i0: f64,
    pub di_star: f64,
    pub di2: f64,
    pub di0: f64,
}

impl IntegralFrame {
    pub fn values(&self) -> [f64; 3] {
        [self.i_star, self.i2, self.i0]
    }

    pub fn derivatives(&self) -> [f64; 3] {
        [self.di_star, self.di2, self.di0]
    }
}

// Point of the θ-parametrized oval: x, x3 - x, and sin^2, cos^2 of θ.
struct OvalNode {
    x: f64,
    gap: f64,
    s2: f64,
    c2: f64,
}

impl OvalNode {
    fn at(ext: &OvalExtent, n: Node) -> Self {
        let s = n.from_a.sin();
        let c = n.to_b.sin();
        let (s2, c2) = (s * s, c * c);
        let w = ext.width();
        let x = if n.from_a <= n.to_b {
            ext.x1 + w * s2
        } else {
            ext.x2 - w * c2
        };
        OvalNode {
            x,
            gap: ext.gap() + w * c2,
            s2,
            c2,
        }
    }

    // sqrt(x / (x3 - x))
    fn g(&self) -> f64 {
        (self.x / self.gap).sqrt()
    }
}

fn star_weight(x: f64) -> f64 {
    (x - 1.0) * x.ln()
}

/// `I_i(h) = ∮ x^i y dx` over the counterclockwise oval, `-2 <= i <= 6`.
pub fn abelian_i(i: i32, h: EnergyLevel, opts: QuadOptions) -> Result<f64> {
    let ext = oval_extent(h);
    let w = ext.width();
    let ([v], _) = tanh_sinh(
        |n| {
            let o = OvalNode::at(&ext, n);
            [o.x.powi(i) * o.s2 * o.c2 / o.g()]
        },
        0.0,
        FRAC_PI_2,
        opts,
    )?;
    Ok(-4.0 * w * w * v)
}

/// `I_{i,j} = ∮ x^i y^j dx` for odd `j`.
pub fn abelian_iij(i: i32, j: i32, h: EnergyLevel, opts: QuadOptions) -> Result<f64> {
    assert!(j > 0 && j % 2 == 1, "odd powers of y only");
    let ext = oval_extent(h);
    let w = ext.width();
    let ([v], _) = tanh_sinh(
        |n| {
            let o = OvalNode::at(&ext, n);
            let sc = (o.s2 * o.c2).powi((j + 1) / 2);
            [o.x.powi(i) * sc / o.g().powi(j)]
        },
        0.0,
        FRAC_PI_2,
        opts,
    )?;
    Ok(-4.0 * w.powi(j + 1) * v)
}

/// `I*(h) = ∮ y (x-1) ln x dx`.
pub fn abelian_istar(h: EnergyLevel, opts: QuadOptions) -> Result<f64> {
    let ext = oval_extent(h);
    let w = ext.width();
    let ([v], _) = tanh_sinh(
        |n| {
            let o = OvalNode::at(&ext, n);
            [star_weight(o.x) * o.s2 * o.c2 / o.g()]
        },
        0.0,
        FRAC_PI_2,
        opts,
    )?;
    Ok(-4.0 * w * w * v)
}

/// `I_i'(h) = ∮ x^{i-1}/(2y) dx`.
pub fn abelian_di_index(i: i32, h: EnergyLevel, opts: QuadOptions) -> Result<f64> {
    let ext = oval_extent(h);
    let ([v], _) = tanh_sinh(
        |n| {
            let o = OvalNode::at(&ext, n);
            [o.x.powi(i - 1) * o.g()]
        },
        0.0,
        FRAC_PI_2,
        opts,
    )?;
    Ok(-2.0 * v)
}

/// `(I0', I2', I*')`.
pub fn abelian_di(h: EnergyLevel, opts: QuadOptions) -> Result<(f64, f64, f64)> {
    let ext = oval_extent(h);
    let ([d0, d2, ds], _) = tanh_sinh(
        |n| {
            let o = OvalNode::at(&ext, n);
            let g = o.g();
            [g / o.x, g * o.x, star_weight(o.x) / o.x * g]
        },
        0.0,
        FRAC_PI_2,
        opts,
    )?;
    Ok((-2.0 * d0, -2.0 * d2, -2.0 * ds))
}

/// All six frame components in one pass.
pub fn frame(h: EnergyLevel, opts: QuadOptions) -> Result<IntegralFrame> {
    let ext = oval_extent(h);
    let w = ext.width();
    let ([is, i2, i0, ds, d2, d0], _) = tanh_sinh(
        |n| {
            let o = OvalNode::at(&ext, n);
            let g = o.g();
            let area = o.s2 * o.c2 / g;
            let sw = star_weight(o.x);
            [area * sw, area * o.x * o.x, area, sw / o.x * g, g * o.x, g / o.x]
        },
        0.0,
        FRAC_PI_2,
        opts,
    )?;
    let a = -4.0 * w * w;
    Ok(IntegralFrame {
        h: h.value(),
        i_star: a * is,
        i2: a * i2,
        i0: a * i0,
        di_star: -2.0 * ds,
        di2: -2.0 * d2,
        di0: -2.0 * d0,
    })
}

/// Which of the four displacement integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum JIndex {
    J1,
    J2,
    J3,
    J4,
}

impl JIndex {
    pub fn from_number(k: usize) -> Option<Self> {
        match k {
            1 => Some(JIndex::J1),
            2 => Some(JIndex::J2),
            3 => Some(JIndex::J3),
            4 => Some(JIndex::J4),
            _ => None,
        }
    }
}

const CENTER: f64 = 1.0 / 3.0;

// Abscissae bounding {H00 >= c}: roots of x(1-x)^2 = 4c in (0,1/3) and (1/3,1).
fn region_x_range(c: f64) -> (f64, f64) {
    let phi = |x: f64| (x * (1.0 - x) * (1.0 - x) - 4.0 * c, (1.0 - x) * (1.0 - 3.0 * x));
    (newton_bisect(phi, 0.0, CENTER), newton_bisect(phi, CENTER, 1.0))
}

/// `∬_{H00 >= c} f(x, y) dx dy` by iterated sin^2-substituted quadrature over
/// vertical slices.
pub fn region_integral<F>(c: f64, f: F, opts: QuadOptions) -> Result<f64>
where
    F: Fn(f64, f64) -> f64,
{
    let (xa, xb) = region_x_range(c);
    let wx = xb - xa;
    let inner_opts = QuadOptions {
        tol: opts.tol * 0.1,
        ..opts
    };
    let failure = std::cell::Cell::new(None);
    let ([v], _) = tanh_sinh(
        |n| {
            let s = n.from_a.sin();
            let co = n.to_b.sin();
            let x = if n.from_a <= n.to_b {
                xa + wx * s * s
            } else {
                xb - wx * co * co
            };
            let disc = (x * (1.0 - x) * (1.0 - x) - 4.0 * c).max(0.0) / x;
            let root = disc.sqrt();
            let ylo = 0.5 * ((1.0 - x) - root);
            let wy = root;
            let inner = tanh_sinh(
                |m| {
                    let t = m.from_a.sin();
                    let u = m.to_b.sin();
                    let y = if m.from_a <= m.to_b {
                        ylo + wy * t * t
                    } else {
                        ylo + wy - wy * u * u
                    };
                    [f(x, y) * 2.0 * t * u]
                },
                0.0,
                FRAC_PI_2,
                inner_opts,
            );
            match inner {
                Ok(([iv], _)) => [iv * wy * 2.0 * s * co],
                Err(e) => {
                    failure.set(Some(e.to_string()));
                    [0.0]
                }
            }
        },
        0.0,
        FRAC_PI_2,
        opts,
    )?;
    if let Some(msg) = failure.take() {
        return Err(Error::Integration { t: c, reason: msg });
    }
    Ok(v * wx)
}

fn j_area_integrand(k: JIndex, x: f64, y: f64) -> f64 {
    let s = x + y;
    match k {
        JIndex::J1 => -2.0 * s,
        JIndex::J2 => (x * x * x + y * y * y) / (x * y),
        JIndex::J3 => {
            let d = x - y;
            (d * s * s * (x / y).ln() + s * (x * x + x * y + y * y)) / (x * y)
        }
        JIndex::J4 => unreachable!("J4 has no integrable area form"),
    }
}

/// The `J31` piece of `J3`, from its area form.
pub fn j31_area(h: EnergyLevel, opts: QuadOptions) -> Result<f64> {
    let c = geometry::level_to_h00(h.value());
    region_integral(
        c,
        |x, y| {
            let s = x + y;
            let d = x - y;
            d * s * (s * (x / y).ln() - 2.0 * d) / (x * y)
        },
        opts,
    )
}

/// `∮ y^2 dx - x^2 dy` over the counterclockwise oval `H00 = c`, with the
/// oval traced in polar form around the center and the trapezoid rule in
/// the angle.
pub fn j1_line(h: EnergyLevel, opts: QuadOptions) -> Result<f64> {
    let c = geometry::level_to_h00(h.value());
    let integrand = |phi: f64| {
        let (sn, cs) = phi.sin_cos();
        // distance to the triangle boundary along the ray
        let mut edge = f64::INFINITY;
        if cs < 0.0 {
            edge = edge.min(CENTER / -cs);
        }
        if sn < 0.0 {
            edge = edge.min(CENTER / -sn);
        }
        if cs + sn > 0.0 {
            edge = edge.min(CENTER / (cs + sn));
        }
        let hval = |r: f64| {
            let x = CENTER + r * cs;
            let y = CENTER + r * sn;
            let v = x * y * (1.0 - x - y) - c;
            let gx = y * (1.0 - 2.0 * x - y);
            let gy = x * (1.0 - x - 2.0 * y);
            (v, gx * cs + gy * sn)
        };
        let r = newton_bisect(hval, 0.0, edge);
        let x = CENTER + r * cs;
        let y = CENTER + r * sn;
        let gx = y * (1.0 - 2.0 * x - y);
        let gy = x * (1.0 - x - 2.0 * y);
        let dr = -r * (-gx * sn + gy * cs) / (gx * cs + gy * sn);
        let dx = dr * cs - r * sn;
        let dy = dr * sn + r * cs;
        y * y * dx - x * x * dy
    };
    let mut n = 64usize;
    let trap = |n: usize| -> f64 {
        let step = 2.0 * PI / n as f64;
        (0..n).map(|k| integrand(k as f64 * step)).sum::<f64>() * step
    };
    let mut prev = trap(n);
    while n < 1 << 16 {
        n *= 2;
        let cur = trap(n);
        if (cur - prev).abs() <= opts.tol * cur.abs() {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Quadrature {
        estimate: prev,
        achieved: f64::NAN,
        requested: opts.tol,
    })
}

/// `(1/(3 h00)) ∮ x^3 y^3/(y - x) (dx + dy)`, parametrized by `s = x + y`.
/// On the oval `xy = h00/(1-s)`, which removes the apparent singularity at
/// the diagonal.
pub fn j4_line(h: EnergyLevel, opts: QuadOptions) -> Result<f64> {
    let c = geometry::level_to_h00(h.value());
    // s^2 (1 - s) = 4c: roots in (0, 2/3), (2/3, 1); third root is negative
    let q = |s: f64| (s * s * (1.0 - s) - 4.0 * c, s * (2.0 - 3.0 * s));
    let smin = newton_bisect(q, 0.0, 2.0 / 3.0);
    let smax = newton_bisect(q, 2.0 / 3.0, 1.0);
    let s3 = 1.0 - smin - smax;
    let ws = smax - smin;
    let ([v], _) = tanh_sinh(
        |n| {
            let sn = n.from_a.sin();
            let cs = n.to_b.sin();
            let s = if n.from_a <= n.to_b {
                smin + ws * sn * sn
            } else {
                smax - ws * cs * cs
            };
            [(1.0 - s).powf(-2.5) / (s - s3).sqrt()]
        },
        0.0,
        FRAC_PI_2,
        opts,
    )?;
    Ok(-4.0 * c * c / 3.0 * v)
}

/// Original definition of `J_k` at the oval level `h` (triangle level
/// `h00 = -h/108`): area forms for `J1..J3`, line form for `J4`.
pub fn original_j(k: JIndex, h: EnergyLevel, opts: QuadOptions) -> Result<f64> {
    match k {
        JIndex::J4 => j4_line(h, opts),
        _ => {
            let c = geometry::level_to_h00(h.value());
            region_integral(c, |x, y| j_area_integrand(k, x, y), opts)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lvl(h: f64) -> EnergyLevel {
        EnergyLevel::new(h).unwrap()
    }

    #[test]
    fn tanh_sinh_handles_endpoint_singularities() {
        let opts = QuadOptions::with_tol(1e-13);
        let ([v], _) = tanh_sinh(|n| [1.0 / n.from_a.sqrt()], 0.0, 1.0, opts).unwrap();
        assert!((v - 2.0).abs() < 1e-13);
        let ([v], _) = tanh_sinh(|n| [n.to_b.ln()], 0.0, 1.0, opts).unwrap();
        assert!((v + 1.0).abs() < 1e-13);
        let ([a, b], _) = tanh_sinh(|n| [n.x.exp(), n.x * n.x], -1.0, 2.0, opts).unwrap();
        assert!((a - (2f64.exp() - (-1f64).exp())).abs() < 1e-13);
        assert!((b - 3.0).abs() < 1e-13);
    }

    #[test]
    fn frame_matches_single_integrals() {
        let h = lvl(-1.3);
        let o = QuadOptions::default();
        let f = frame(h, o).unwrap();
        assert!((f.i0 - abelian_i(0, h, o).unwrap()).abs() < 1e-12);
        assert!((f.i2 - abelian_i(2, h, o).unwrap()).abs() < 1e-12);
        assert!((f.i_star - abelian_istar(h, o).unwrap()).abs() < 1e-12);
        let (d0, d2, ds) = abelian_di(h, o).unwrap();
        assert!((f.di0 - d0).abs() < 1e-12 && (f.di2 - d2).abs() < 1e-12 && (f.di_star - ds).abs() < 1e-12);
        assert!((abelian_di_index(0, h, o).unwrap() - d0).abs() < 1e-12);
    }

    #[test]
    fn region_integral_of_one_is_area() {
        // area of {H00 >= c} tends to the triangle area 1/2 as c -> 0
        let a = region_integral(1e-9, |_, _| 1.0, QuadOptions::with_tol(1e-9)).unwrap();
        assert!((a - 0.5).abs() < 1e-3, "{a}");
    }
}

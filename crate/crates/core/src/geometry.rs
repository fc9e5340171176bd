//! Ovals of `H(x, y) = x(y^2 - (x-3)^2)` and the affine map to the triangle
//! chart `H00(x, y) = xy(1 - x - y)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Energy of the oval `H = h`, restricted to the open annulus range.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct EnergyLevel(f64);

impl EnergyLevel {
    pub const CENTER: f64 = -4.0;
    pub const SEPARATRIX: f64 = 0.0;

    pub fn new(h: f64) -> Result<Self> {
        if h.is_finite() && h > Self::CENTER && h < Self::SEPARATRIX {
            Ok(Self(h))
        } else {
            Err(Error::EnergyOutOfRange(h))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// `h + 4`, the distance to the center level.
    #[inline]
    pub fn from_center(self) -> f64 {
        self.0 + 4.0
    }
}

impl TryFrom<f64> for EnergyLevel {
    type Error = Error;
    fn try_from(h: f64) -> Result<Self> {
        Self::new(h)
    }
}

impl From<EnergyLevel> for f64 {
    fn from(h: EnergyLevel) -> f64 {
        h.0
    }
}

/// Real roots of `p(x) = x(x-3)^2 + h`.
///
/// `x1 < x2` bound the oval on the x-axis; `x3 = 6 - x1 - x2` is the third
/// root beyond 3. The differences `x2 - x1` and `x3 - x2` are stored
/// separately because both tend to zero at one end of the range and lose all
/// relative accuracy if formed by subtraction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OvalExtent {
    pub x1: f64,
    pub x2: f64,
    x3: f64,
    width: f64,
    gap: f64,
}

impl OvalExtent {
    pub fn x3(&self) -> f64 {
        self.x3
    }

    /// `x2 - x1`.
    pub fn width(&self) -> f64 {
        self.width
    }

    /// `x3 - x2`.
    pub fn gap(&self) -> f64 {
        self.gap
    }
}

/// `p(x) = x(x-3)^2 + h`.
#[inline]
pub fn cubic(h: f64, x: f64) -> f64 {
    x * (x - 3.0) * (x - 3.0) + h
}

// p(c + t) expanded around c = 0, 1, 3 with exact coefficients.
#[derive(Clone, Copy)]
enum Chart {
    Origin,
    Center,
    Saddle,
}

impl Chart {
    fn shift(self) -> f64 {
        match self {
            Chart::Origin => 0.0,
            Chart::Center => 1.0,
            Chart::Saddle => 3.0,
        }
    }

    fn eval(self, h: f64, t: f64) -> (f64, f64) {
        match self {
            Chart::Origin => (((t - 6.0) * t + 9.0) * t + h, (3.0 * t - 12.0) * t + 9.0),
            Chart::Center => ((t - 3.0) * t * t + (h + 4.0), (3.0 * t - 6.0) * t),
            Chart::Saddle => ((t + 3.0) * t * t + h, (3.0 * t + 6.0) * t),
        }
    }
}

/// Bracketed Newton iteration with bisection fallback.
/// Requires `f(lo)` and `f(hi)` of opposite sign.
pub(crate) fn newton_bisect<F>(f: F, mut lo: f64, mut hi: f64) -> f64
where
    F: Fn(f64) -> (f64, f64),
{
    let (flo, _) = f(lo);
    let rising = flo < 0.0;
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let (fx, dfx) = f(x);
        if fx == 0.0 {
            return x;
        }
        if (fx < 0.0) == rising {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - fx / dfx;
        let next = if dfx != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        let step = (next - x).abs();
        x = next;
        if step <= 2.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE) || hi - lo <= f64::EPSILON * x.abs() {
            break;
        }
    }
    x
}

fn root_in(chart: Chart, h: f64, lo: f64, hi: f64) -> f64 {
    newton_bisect(|t| chart.eval(h, t), lo, hi)
}

/// Abscissae where the oval `H = h` meets the x-axis.
pub fn oval_extent(h: EnergyLevel) -> OvalExtent {
    let h = h.value();
    // x1 in (0, 1), x2 in (1, 3), x3 in (3, 4); each root is solved in the
    // chart centered at the nearest degenerate point.
    let (x1, t1) = if h >= -2.0 {
        let t = root_in(Chart::Origin, h, 0.0, 1.0);
        (t, None)
    } else {
        let t = root_in(Chart::Center, h, -1.0, 0.0);
        (Chart::Center.shift() + t, Some(t))
    };
    let (x2, t2c, t2s) = if h <= -2.0 {
        let t = root_in(Chart::Center, h, 0.0, 2.0);
        (Chart::Center.shift() + t, Some(t), None)
    } else {
        let t = root_in(Chart::Saddle, h, -2.0, 0.0);
        (Chart::Saddle.shift() + t, None, Some(t))
    };
    let t3 = root_in(Chart::Saddle, h, 0.0, 1.0);
    let x3 = Chart::Saddle.shift() + t3;
    let width = match (t1, t2c) {
        (Some(a), Some(b)) => b - a,
        _ => x2 - x1,
    };
    let gap = match t2s {
        Some(b) => t3 - b,
        None => x3 - x2,
    };
    OvalExtent {
        x1,
        x2,
        x3,
        width,
        gap,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    Upper,
    Lower,
}

/// Signed ordinate of the oval over `x`, `±sqrt((x-3)^2 + h/x)`.
pub fn oval_height(h: EnergyLevel, x: f64, branch: Branch) -> Result<f64> {
    let ext = oval_extent(h);
    let slack = 4.0 * f64::EPSILON * ext.x2;
    if !(x >= ext.x1 - slack && x <= ext.x2 + slack) {
        return Err(Error::OutsideOval {
            x,
            x1: ext.x1,
            x2: ext.x2,
        });
    }
    // factored form: p(x)/x = (x - x1)(x2 - x)(x3 - x)/x
    let prod = (x - ext.x1).max(0.0) * (ext.x2 - x).max(0.0) * (ext.x3 - x) / x;
    let y = prod.sqrt();
    Ok(match branch {
        Branch::Upper => y,
        Branch::Lower => -y,
    })
}

/// Point in the triangle chart of `H00 = xy(1-x-y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrianglePoint {
    pub x: f64,
    pub y: f64,
}

/// Point in the oval chart of `H = x(y^2 - (x-3)^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OvalPoint {
    pub x: f64,
    pub y: f64,
}

pub fn triangle_hamiltonian(p: TrianglePoint) -> f64 {
    p.x * p.y * (1.0 - p.x - p.y)
}

pub fn oval_hamiltonian(p: OvalPoint) -> f64 {
    p.x * (p.y * p.y - (p.x - 3.0) * (p.x - 3.0))
}

/// Inverse of [`to_triangle_chart`].
pub fn to_h_chart(p: TrianglePoint) -> OvalPoint {
    OvalPoint {
        x: 3.0 - 3.0 * (p.x + p.y),
        y: 3.0 * (p.x - p.y),
    }
}

/// `x = (3 - X + Y)/6`, `y = (3 - X - Y)/6`.
pub fn to_triangle_chart(p: OvalPoint) -> TrianglePoint {
    TrianglePoint {
        x: (3.0 - p.x + p.y) / 6.0,
        y: (3.0 - p.x - p.y) / 6.0,
    }
}

/// Triangle level `h00` to oval level: `h = -108 h00`.
#[inline]
pub fn level_to_h(h00: f64) -> f64 {
    -108.0 * h00
}

#[inline]
pub fn level_to_h00(h: f64) -> f64 {
    -h / 108.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lvl(h: f64) -> EnergyLevel {
        EnergyLevel::new(h).unwrap()
    }

    #[test]
    fn rejects_closed_endpoints() {
        for h in [-4.0, 0.0, -5.0, 0.5, f64::NAN] {
            assert!(EnergyLevel::new(h).is_err(), "{h}");
        }
    }

    #[test]
    fn exact_roots_at_minus_two() {
        // p(x) = (x - 2)(x^2 - 4x + 1) at h = -2
        let e = oval_extent(lvl(-2.0));
        assert!((e.x1 - (2.0 - 3f64.sqrt())).abs() < 1e-15);
        assert!((e.x2 - 2.0).abs() < 1e-15);
        assert!((e.x3() - (2.0 + 3f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn degenerate_limits() {
        let h = lvl(-4.0 + 1e-12);
        let e = oval_extent(h);
        assert!((e.x1 - 1.0).abs() < 1e-5 && (e.x2 - 1.0).abs() < 1e-5);
        // width ~ 2 sqrt((h+4)/3)
        let expect = 2.0 * (h.from_center() / 3.0).sqrt();
        assert!((e.width() / expect - 1.0).abs() < 1e-5);
        let e = oval_extent(lvl(-1e-12));
        assert!(e.x1 < 1e-12 && (e.x2 - 3.0).abs() < 1e-5);
        let expect = 2.0 * (1e-12f64 / 3.0).sqrt();
        assert!((e.gap() / expect - 1.0).abs() < 1e-5);
    }

    #[test]
    fn heights() {
        let h = lvl(-2.0);
        let y = oval_height(h, 1.0, Branch::Upper).unwrap();
        assert!((y - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(oval_height(h, 1.0, Branch::Lower).unwrap(), -y);
        let e = oval_extent(h);
        assert_eq!(oval_height(h, e.x1, Branch::Upper).unwrap(), 0.0);
        assert!(oval_height(h, 2.5, Branch::Upper).is_err());
        let y = oval_height(lvl(-4.0 + 1e-12), 1.0, Branch::Upper).unwrap();
        assert!(y < 1e-5);
    }

    #[test]
    fn chart_images() {
        let c = to_triangle_chart(OvalPoint { x: 1.0, y: 0.0 });
        assert!((c.x - 1.0 / 3.0).abs() < 1e-16 && (c.y - 1.0 / 3.0).abs() < 1e-16);
        let o = to_triangle_chart(OvalPoint { x: 3.0, y: 0.0 });
        assert_eq!((o.x, o.y), (0.0, 0.0));
        assert!((level_to_h00(-4.0) - 1.0 / 27.0).abs() < 1e-17);
        assert!((triangle_hamiltonian(c) - 1.0 / 27.0).abs() < 1e-17);
    }
}

//! Explicit Runge–Kutta integrator of order 8(5,3) (Dormand–Prince 853)
//! with 7th-order continuous extension and event location.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_max: f64,
    pub h0: Option<f64>,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-12,
            atol: 1e-14,
            h_max: f64::INFINITY,
            h0: None,
            max_steps: 200_000,
        }
    }
}

/// Coefficients of the continuous extension on one accepted step.
#[derive(Debug, Clone)]
pub struct DenseStep<const N: usize> {
    pub t0: f64,
    pub h: f64,
    cont: [[f64; N]; 8],
}

impl<const N: usize> DenseStep<N> {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    pub fn eval(&self, t: f64) -> [f64; N] {
        let s = (t - self.t0) / self.h;
        let s1 = 1.0 - s;
        let c = &self.cont;
        let mut out = [0.0; N];
        for i in 0..N {
            let conf = c[4][i] + s * (c[5][i] + s1 * (c[6][i] + s * c[7][i]));
            out[i] = c[0][i] + s * (c[1][i] + s1 * (c[2][i] + s * (c[3][i] + s1 * conf)));
        }
        out
    }

    pub fn y_start(&self) -> [f64; N] {
        self.cont[0]
    }
}

/// Integration state; each call to [`Stepper::step`] performs one accepted
/// step and refreshes the dense coefficients.
pub struct Stepper<const N: usize, F> {
    f: F,
    opts: OdeOptions,
    pub t: f64,
    pub y: [f64; N],
    k1: [f64; N],
    h: f64,
    facold: f64,
    last_rejected: bool,
    pub steps: usize,
    pub evals: usize,
    dense: Option<DenseStep<N>>,
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        out[i] += h * acc;
    }
    out
}

impl<const N: usize, F> Stepper<N, F>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    pub fn new(mut f: F, t0: f64, y0: [f64; N], direction: f64, opts: OdeOptions) -> Self {
        let k1 = f(t0, &y0);
        let mut s = Self {
            f,
            opts,
            t: t0,
            y: y0,
            k1,
            h: 0.0,
            facold: 1e-4,
            last_rejected: false,
            steps: 0,
            evals: 1,
            dense: None,
        };
        let dir = if direction < 0.0 { -1.0 } else { 1.0 };
        s.h = match opts.h0 {
            Some(h) => dir * h.abs(),
            None => s.initial_step(dir),
        };
        s
    }

    fn scale(&self, i: usize, y: &[f64; N]) -> f64 {
        self.opts.atol + self.opts.rtol * y[i].abs()
    }

    fn initial_step(&mut self, dir: f64) -> f64 {
        let n = N as f64;
        let (mut dnf, mut dny) = (0.0, 0.0);
        for i in 0..N {
            let sk = self.scale(i, &self.y);
            dnf += (self.k1[i] / sk).powi(2);
            dny += (self.y[i] / sk).powi(2);
        }
        let mut h = if dnf <= 1e-10 || dny <= 1e-10 {
            1e-6
        } else {
            (dny / dnf).sqrt() * 0.01
        };
        h = h.min(self.opts.h_max) * dir;
        let y1 = axpy(&self.y, h, &[(1.0, &self.k1)]);
        let f1 = (self.f)(self.t + h, &y1);
        self.evals += 1;
        let mut der2 = 0.0;
        for i in 0..N {
            let sk = self.scale(i, &self.y);
            der2 += ((f1[i] - self.k1[i]) / sk).powi(2);
        }
        let der2 = (der2 / n).sqrt() / h.abs();
        let der12 = der2.max((dnf / n).sqrt());
        let h1 = if der12 <= 1e-15 {
            (1e-6f64).max(h.abs() * 1e-3)
        } else {
            (0.01 / der12).powf(1.0 / 8.0)
        };
        dir * (100.0 * h.abs()).min(h1).min(self.opts.h_max)
    }

    pub fn dense(&self) -> Option<&DenseStep<N>> {
        self.dense.as_ref()
    }

    /// Cap the next step so that it does not pass `t_stop`.
    pub fn step_towards(&mut self, t_stop: f64) -> Result<()> {
        let remaining = t_stop - self.t;
        if remaining.abs() < self.h.abs() {
            self.h = remaining;
        }
        self.step()
    }

    pub fn step(&mut self) -> Result<()> {
        loop {
            if self.steps >= self.opts.max_steps {
                return Err(Error::Integration {
                    t: self.t,
                    reason: "maximum number of steps".into(),
                });
            }
            let h = self.h;
            if !h.is_finite() || h.abs() <= 16.0 * f64::EPSILON * self.t.abs().max(1e-300) {
                return Err(Error::Integration {
                    t: self.t,
                    reason: format!("step size collapsed to {h:e}"),
                });
            }
            if self.try_step(h)? {
                return Ok(());
            }
        }
    }

    fn try_step(&mut self, h: f64) -> Result<bool> {
        use coeffs::*;
        let t = self.t;
        let y = self.y;
        let k1 = self.k1;
        let f = &mut self.f;
        let k2 = f(t + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
        let k3 = f(t + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(t + C4 * h, &axpy(&y, h, &[(A41, &k1), (A43, &k3)]));
        let k5 = f(t + C5 * h, &axpy(&y, h, &[(A51, &k1), (A53, &k3), (A54, &k4)]));
        let k6 = f(t + C6 * h, &axpy(&y, h, &[(A61, &k1), (A64, &k4), (A65, &k5)]));
        let k7 = f(t + C7 * h, &axpy(&y, h, &[(A71, &k1), (A74, &k4), (A75, &k5), (A76, &k6)]));
        let k8 = f(
            t + C8 * h,
            &axpy(&y, h, &[(A81, &k1), (A84, &k4), (A85, &k5), (A86, &k6), (A87, &k7)]),
        );
        let k9 = f(
            t + C9 * h,
            &axpy(&y, h, &[(A91, &k1), (A94, &k4), (A95, &k5), (A96, &k6), (A97, &k7), (A98, &k8)]),
        );
        let k10 = f(
            t + C10 * h,
            &axpy(
                &y,
                h,
                &[(A101, &k1), (A104, &k4), (A105, &k5), (A106, &k6), (A107, &k7), (A108, &k8), (A109, &k9)],
            ),
        );
        let k11 = f(
            t + C11 * h,
            &axpy(
                &y,
                h,
                &[
                    (A111, &k1),
                    (A114, &k4),
                    (A115, &k5),
                    (A116, &k6),
                    (A117, &k7),
                    (A118, &k8),
                    (A119, &k9),
                    (A1110, &k10),
                ],
            ),
        );
        let t_new = t + h;
        let y12 = axpy(
            &y,
            h,
            &[
                (A121, &k1),
                (A124, &k4),
                (A125, &k5),
                (A126, &k6),
                (A127, &k7),
                (A128, &k8),
                (A129, &k9),
                (A1210, &k10),
                (A1211, &k11),
            ],
        );
        let k12 = f(t_new, &y12);
        self.evals += 11;

        let mut bsum = [0.0; N];
        for i in 0..N {
            bsum[i] = B1 * k1[i] + B6 * k6[i] + B7 * k7[i] + B8 * k8[i] + B9 * k9[i] + B10 * k10[i] + B11 * k11[i]
                + B12 * k12[i];
        }
        let y_new = axpy(&y, h, &[(1.0, &bsum)]);

        let (mut err, mut err2) = (0.0, 0.0);
        for i in 0..N {
            let sk = self.opts.atol + self.opts.rtol * y[i].abs().max(y_new[i].abs());
            let e2 = bsum[i] - BHH1 * k1[i] - BHH2 * k9[i] - BHH3 * k12[i];
            err2 += (e2 / sk).powi(2);
            let e = ER1 * k1[i] + ER6 * k6[i] + ER7 * k7[i] + ER8 * k8[i] + ER9 * k9[i] + ER10 * k10[i]
                + ER11 * k11[i]
                + ER12 * k12[i];
            err += (e / sk).powi(2);
        }
        let mut deno = err + 0.01 * err2;
        if deno <= 0.0 {
            deno = 1.0;
        }
        let err = h.abs() * err * (1.0 / (deno * N as f64)).sqrt();
        if !err.is_finite() {
            self.h *= 0.1;
            self.last_rejected = true;
            return Ok(false);
        }

        let fac11 = err.powf(1.0 / 8.0);
        let fac = (1.0 / 6.0f64).max((1.0 / 0.333f64).min(fac11 / 0.9));
        let mut h_new = h / fac;

        if err > 1.0 {
            self.h = h / (1.0 / 0.333f64).min(fac11 / 0.9);
            self.last_rejected = true;
            return Ok(false);
        }

        self.facold = err.max(1e-4);
        let k_new = f(t_new, &y_new);
        self.evals += 1;

        // continuous extension
        let mut cont = [[0.0; N]; 8];
        for i in 0..N {
            let ydiff = y_new[i] - y[i];
            let bspl = h * k1[i] - ydiff;
            cont[0][i] = y[i];
            cont[1][i] = ydiff;
            cont[2][i] = bspl;
            cont[3][i] = ydiff - h * k_new[i] - bspl;
            cont[4][i] = D41 * k1[i] + D46 * k6[i] + D47 * k7[i] + D48 * k8[i] + D49 * k9[i] + D410 * k10[i]
                + D411 * k11[i]
                + D412 * k12[i];
            cont[5][i] = D51 * k1[i] + D56 * k6[i] + D57 * k7[i] + D58 * k8[i] + D59 * k9[i] + D510 * k10[i]
                + D511 * k11[i]
                + D512 * k12[i];
            cont[6][i] = D61 * k1[i] + D66 * k6[i] + D67 * k7[i] + D68 * k8[i] + D69 * k9[i] + D610 * k10[i]
                + D611 * k11[i]
                + D612 * k12[i];
            cont[7][i] = D71 * k1[i] + D76 * k6[i] + D77 * k7[i] + D78 * k8[i] + D79 * k9[i] + D710 * k10[i]
                + D711 * k11[i]
                + D712 * k12[i];
        }
        let k14 = f(
            t + C14 * h,
            &axpy(
                &y,
                h,
                &[
                    (A141, &k1),
                    (A147, &k7),
                    (A148, &k8),
                    (A149, &k9),
                    (A1410, &k10),
                    (A1411, &k11),
                    (A1412, &k12),
                    (A1413, &k_new),
                ],
            ),
        );
        let k15 = f(
            t + C15 * h,
            &axpy(
                &y,
                h,
                &[
                    (A151, &k1),
                    (A156, &k6),
                    (A157, &k7),
                    (A158, &k8),
                    (A1511, &k11),
                    (A1512, &k12),
                    (A1513, &k_new),
                    (A1514, &k14),
                ],
            ),
        );
        let k16 = f(
            t + C16 * h,
            &axpy(
                &y,
                h,
                &[
                    (A161, &k1),
                    (A166, &k6),
                    (A167, &k7),
                    (A168, &k8),
                    (A169, &k9),
                    (A1613, &k_new),
                    (A1614, &k14),
                    (A1615, &k15),
                ],
            ),
        );
        self.evals += 3;
        for i in 0..N {
            cont[4][i] = h * (cont[4][i] + D413 * k_new[i] + D414 * k14[i] + D415 * k15[i] + D416 * k16[i]);
            cont[5][i] = h * (cont[5][i] + D513 * k_new[i] + D514 * k14[i] + D515 * k15[i] + D516 * k16[i]);
            cont[6][i] = h * (cont[6][i] + D613 * k_new[i] + D614 * k14[i] + D615 * k15[i] + D616 * k16[i]);
            cont[7][i] = h * (cont[7][i] + D713 * k_new[i] + D714 * k14[i] + D715 * k15[i] + D716 * k16[i]);
        }
        self.dense = Some(DenseStep { t0: t, h, cont });

        if self.last_rejected {
            h_new = if h > 0.0 { h_new.min(h) } else { h_new.max(h) };
        }
        self.last_rejected = false;
        let cap = self.opts.h_max;
        if h_new.abs() > cap {
            h_new = cap * h_new.signum();
        }
        self.t = t_new;
        self.y = y_new;
        self.k1 = k_new;
        self.h = h_new;
        self.steps += 1;
        Ok(true)
    }
}

/// Integrate from `t0` to `t1` and return the end state.
pub fn integrate<const N: usize, F>(f: F, t0: f64, y0: [f64; N], t1: f64, opts: OdeOptions) -> Result<[f64; N]>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    if t1 == t0 {
        return Ok(y0);
    }
    let mut st = Stepper::new(f, t0, y0, t1 - t0, opts);
    while (t1 - st.t) * (t1 - t0) > 0.0 {
        st.step_towards(t1)?;
    }
    Ok(st.y)
}

/// Piecewise dense solution over `[t0, t1]`.
#[derive(Debug, Clone)]
pub struct DenseSolution<const N: usize> {
    steps: Vec<DenseStep<N>>,
    t0: f64,
    y0: [f64; N],
}

impl<const N: usize> DenseSolution<N> {
    pub fn span(&self) -> (f64, f64) {
        (self.t0, self.steps.last().map_or(self.t0, |s| s.t1()))
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Step end points including the start.
    pub fn knots(&self) -> impl Iterator<Item = f64> + '_ {
        std::iter::once(self.t0).chain(self.steps.iter().map(|s| s.t1()))
    }

    /// Continuous extension at `t`; clamps to the span.
    pub fn eval(&self, t: f64) -> [f64; N] {
        if self.steps.is_empty() {
            return self.y0;
        }
        let forward = self.steps[0].h > 0.0;
        let idx = self.steps.partition_point(|s| if forward { s.t1() < t } else { s.t1() > t });
        let s = &self.steps[idx.min(self.steps.len() - 1)];
        s.eval(t)
    }
}

pub fn integrate_dense<const N: usize, F>(
    f: F,
    t0: f64,
    y0: [f64; N],
    t1: f64,
    opts: OdeOptions,
) -> Result<DenseSolution<N>>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let mut steps = Vec::new();
    if t1 != t0 {
        let mut st = Stepper::new(f, t0, y0, t1 - t0, opts);
        while (t1 - st.t) * (t1 - t0) > 0.0 {
            st.step_towards(t1)?;
            steps.push(st.dense().expect("accepted step").clone());
        }
    }
    Ok(DenseSolution { steps, t0, y0 })
}

/// Brent's method on a bracketing interval.
pub fn brent<F>(mut f: F, mut a: f64, mut b: f64, xtol: f64) -> f64
where
    F: FnMut(f64) -> f64,
{
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return a;
    }
    if fb == 0.0 {
        return b;
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return b;
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol * m.signum() };
        fb = f(b);
    }
    b
}

#[allow(clippy::excessive_precision, clippy::unreadable_literal)]
mod coeffs {
    pub const C2: f64 = 0.526001519587677318785587544488E-01;
    pub const C3: f64 = 0.789002279381515978178381316732E-01;
    pub const C4: f64 = 0.118350341907227396726757197510E+00;
    pub const C5: f64 = 0.281649658092772603273242802490E+00;
    pub const C6: f64 = 0.333333333333333333333333333333E+00;
    pub const C7: f64 = 0.25E+00;
    pub const C8: f64 = 0.307692307692307692307692307692E+00;
    pub const C9: f64 = 0.651282051282051282051282051282E+00;
    pub const C10: f64 = 0.6E+00;
    pub const C11: f64 = 0.857142857142857142857142857142E+00;
    pub const C14: f64 = 0.1E+00;
    pub const C15: f64 = 0.2E+00;
    pub const C16: f64 = 0.777777777777777777777777777778E+00;

    pub const A21: f64 = 5.26001519587677318785587544488E-2;
    pub const A31: f64 = 1.97250569845378994544595329183E-2;
    pub const A32: f64 = 5.91751709536136983633785987549E-2;
    pub const A41: f64 = 2.95875854768068491816892993775E-2;
    pub const A43: f64 = 8.87627564304205475450678981324E-2;
    pub const A51: f64 = 2.41365134159266685502369798665E-1;
    pub const A53: f64 = -8.84549479328286085344864962717E-1;
    pub const A54: f64 = 9.24834003261792003115737966543E-1;
    pub const A61: f64 = 3.7037037037037037037037037037E-2;
    pub const A64: f64 = 1.70828608729473871279604482173E-1;
    pub const A65: f64 = 1.25467687566822425016691814123E-1;
    pub const A71: f64 = 3.7109375E-2;
    pub const A74: f64 = 1.70252211019544039314978060272E-1;
    pub const A75: f64 = 6.02165389804559606850219397283E-2;
    pub const A76: f64 = -1.7578125E-2;
    pub const A81: f64 = 3.70920001185047927108779319836E-2;
    pub const A84: f64 = 1.70383925712239993810214054705E-1;
    pub const A85: f64 = 1.07262030446373284651809199168E-1;
    pub const A86: f64 = -1.53194377486244017527936158236E-2;
    pub const A87: f64 = 8.27378916381402288758473766002E-3;
    pub const A91: f64 = 6.24110958716075717114429577812E-1;
    pub const A94: f64 = -3.36089262944694129406857109825E0;
    pub const A95: f64 = -8.68219346841726006818189891453E-1;
    pub const A96: f64 = 2.75920996994467083049415600797E1;
    pub const A97: f64 = 2.01540675504778934086186788979E1;
    pub const A98: f64 = -4.34898841810699588477366255144E1;
    pub const A101: f64 = 4.77662536438264365890433908527E-1;
    pub const A104: f64 = -2.48811461997166764192642586468E0;
    pub const A105: f64 = -5.90290826836842996371446475743E-1;
    pub const A106: f64 = 2.12300514481811942347288949897E1;
    pub const A107: f64 = 1.52792336328824235832596922938E1;
    pub const A108: f64 = -3.32882109689848629194453265587E1;
    pub const A109: f64 = -2.03312017085086261358222928593E-2;
    pub const A111: f64 = -9.3714243008598732571704021658E-1;
    pub const A114: f64 = 5.18637242884406370830023853209E0;
    pub const A115: f64 = 1.09143734899672957818500254654E0;
    pub const A116: f64 = -8.14978701074692612513997267357E0;
    pub const A117: f64 = -1.85200656599969598641566180701E1;
    pub const A118: f64 = 2.27394870993505042818970056734E1;
    pub const A119: f64 = 2.49360555267965238987089396762E0;
    pub const A1110: f64 = -3.0467644718982195003823669022E0;
    pub const A121: f64 = 2.27331014751653820792359768449E0;
    pub const A124: f64 = -1.05344954667372501984066689879E1;
    pub const A125: f64 = -2.00087205822486249909675718444E0;
    pub const A126: f64 = -1.79589318631187989172765950534E1;
    pub const A127: f64 = 2.79488845294199600508499808837E1;
    pub const A128: f64 = -2.85899827713502369474065508674E0;
    pub const A129: f64 = -8.87285693353062954433549289258E0;
    pub const A1210: f64 = 1.23605671757943030647266201528E1;
    pub const A1211: f64 = 6.43392746015763530355970484046E-1;
    pub const A141: f64 = 5.61675022830479523392909219681E-2;
    pub const A147: f64 = 2.53500210216624811088794765333E-1;
    pub const A148: f64 = -2.46239037470802489917441475441E-1;
    pub const A149: f64 = -1.24191423263816360469010140626E-1;
    pub const A1410: f64 = 1.5329179827876569731206322685E-1;
    pub const A1411: f64 = 8.20105229563468988491666602057E-3;
    pub const A1412: f64 = 7.56789766054569976138603589584E-3;
    pub const A1413: f64 = -8.298E-3;
    pub const A151: f64 = 3.18346481635021405060768473261E-2;
    pub const A156: f64 = 2.83009096723667755288322961402E-2;
    pub const A157: f64 = 5.35419883074385676223797384372E-2;
    pub const A158: f64 = -5.49237485713909884646569340306E-2;
    pub const A1511: f64 = -1.08347328697249322858509316994E-4;
    pub const A1512: f64 = 3.82571090835658412954920192323E-4;
    pub const A1513: f64 = -3.40465008687404560802977114492E-4;
    pub const A1514: f64 = 1.41312443674632500278074618366E-1;
    pub const A161: f64 = -4.28896301583791923408573538692E-1;
    pub const A166: f64 = -4.69762141536116384314449447206E0;
    pub const A167: f64 = 7.68342119606259904184240953878E0;
    pub const A168: f64 = 4.06898981839711007970213554331E0;
    pub const A169: f64 = 3.56727187455281109270669543021E-1;
    pub const A1613: f64 = -1.39902416515901462129418009734E-3;
    pub const A1614: f64 = 2.9475147891527723389556272149E0;
    pub const A1615: f64 = -9.15095847217987001081870187138E0;

    pub const B1: f64 = 5.42937341165687622380535766363E-2;
    pub const B6: f64 = 4.45031289275240888144113950566E0;
    pub const B7: f64 = 1.89151789931450038304281599044E0;
    pub const B8: f64 = -5.8012039600105847814672114227E0;
    pub const B9: f64 = 3.1116436695781989440891606237E-1;
    pub const B10: f64 = -1.52160949662516078556178806805E-1;
    pub const B11: f64 = 2.01365400804030348374776537501E-1;
    pub const B12: f64 = 4.47106157277725905176885569043E-2;

    pub const BHH1: f64 = 0.244094488188976377952755905512E+00;
    pub const BHH2: f64 = 0.733846688281611857341361741547E+00;
    pub const BHH3: f64 = 0.220588235294117647058823529412E-01;

    pub const ER1: f64 = 0.1312004499419488073250102996E-01;
    pub const ER6: f64 = -0.1225156446376204440720569753E+01;
    pub const ER7: f64 = -0.4957589496572501915214079952E+00;
    pub const ER8: f64 = 0.1664377182454986536961530415E+01;
    pub const ER9: f64 = -0.3503288487499736816886487290E+00;
    pub const ER10: f64 = 0.3341791187130174790297318841E+00;
    pub const ER11: f64 = 0.8192320648511571246570742613E-01;
    pub const ER12: f64 = -0.2235530786388629525884427845E-01;

    pub const D41: f64 = -0.84289382761090128651353491142E+01;
    pub const D46: f64 = 0.56671495351937776962531783590E+00;
    pub const D47: f64 = -0.30689499459498916912797304727E+01;
    pub const D48: f64 = 0.23846676565120698287728149680E+01;
    pub const D49: f64 = 0.21170345824450282767155149946E+01;
    pub const D410: f64 = -0.87139158377797299206789907490E+00;
    pub const D411: f64 = 0.22404374302607882758541771650E+01;
    pub const D412: f64 = 0.63157877876946881815570249290E+00;
    pub const D413: f64 = -0.88990336451333310820698117400E-01;
    pub const D414: f64 = 0.18148505520854727256656404962E+02;
    pub const D415: f64 = -0.91946323924783554000451984436E+01;
    pub const D416: f64 = -0.44360363875948939664310572000E+01;
    pub const D51: f64 = 0.10427508642579134603413151009E+02;
    pub const D56: f64 = 0.24228349177525818288430175319E+03;
    pub const D57: f64 = 0.16520045171727028198505394887E+03;
    pub const D58: f64 = -0.37454675472269020279518312152E+03;
    pub const D59: f64 = -0.22113666853125306036270938578E+02;
    pub const D510: f64 = 0.77334326684722638389603898808E+01;
    pub const D511: f64 = -0.30674084731089398182061213626E+02;
    pub const D512: f64 = -0.93321305264302278729567221706E+01;
    pub const D513: f64 = 0.15697238121770843886131091075E+02;
    pub const D514: f64 = -0.31139403219565177677282850411E+02;
    pub const D515: f64 = -0.93529243588444783865713862664E+01;
    pub const D516: f64 = 0.35816841486394083752465898540E+02;
    pub const D61: f64 = 0.19985053242002433820987653617E+02;
    pub const D66: f64 = -0.38703730874935176555105901742E+03;
    pub const D67: f64 = -0.18917813819516756882830838328E+03;
    pub const D68: f64 = 0.52780815920542364900561016686E+03;
    pub const D69: f64 = -0.11573902539959630126141871134E+02;
    pub const D610: f64 = 0.68812326946963000169666922661E+01;
    pub const D611: f64 = -0.10006050966910838403183860980E+01;
    pub const D612: f64 = 0.77771377980534432092869265740E+00;
    pub const D613: f64 = -0.27782057523535084065932004339E+01;
    pub const D614: f64 = -0.60196695231264120758267380846E+02;
    pub const D615: f64 = 0.84320405506677161018159903784E+02;
    pub const D616: f64 = 0.11992291136182789328035130030E+02;
    pub const D71: f64 = -0.25693933462703749003312586129E+02;
    pub const D76: f64 = -0.15418974869023643374053993627E+03;
    pub const D77: f64 = -0.23152937917604549567536039109E+03;
    pub const D78: f64 = 0.35763911791061412378285349910E+03;
    pub const D79: f64 = 0.93405324183624310003907691704E+02;
    pub const D710: f64 = -0.37458323136451633156875139351E+02;
    pub const D711: f64 = 0.10409964950896230045147246184E+03;
    pub const D712: f64 = 0.29840293426660503123344363579E+02;
    pub const D713: f64 = -0.43533456590011143754432175058E+02;
    pub const D714: f64 = 0.96324553959188282948394950600E+02;
    pub const D715: f64 = -0.39177261675615439165231486172E+02;
    pub const D716: f64 = -0.14972683625798562581422125276E+03;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_period() {
        let opts = OdeOptions {
            rtol: 1e-13,
            atol: 1e-15,
            ..Default::default()
        };
        let y = integrate(|_, y: &[f64; 2]| [y[1], -y[0]], 0.0, [1.0, 0.0], 2.0 * std::f64::consts::PI, opts).unwrap();
        assert!((y[0] - 1.0).abs() < 1e-11 && y[1].abs() < 1e-11);
    }

    #[test]
    fn dense_output_is_accurate_between_steps() {
        let opts = OdeOptions {
            rtol: 1e-12,
            atol: 1e-14,
            ..Default::default()
        };
        let sol = integrate_dense(|_, y: &[f64; 1]| [y[0]], 0.0, [1.0], 3.0, opts).unwrap();
        for k in 0..=300 {
            let t = k as f64 * 0.01;
            assert!((sol.eval(t)[0] - t.exp()).abs() < 1e-10 * t.exp(), "{t}");
        }
        assert!(sol.len() > 1);
    }

    #[test]
    fn zero_length_interval_is_identity() {
        let y = integrate(|_, y: &[f64; 2]| [y[1], y[0]], 1.0, [3.0, 4.0], 1.0, OdeOptions::default()).unwrap();
        assert_eq!(y, [3.0, 4.0]);
    }

    #[test]
    fn backward_integration() {
        let y = integrate(|_, y: &[f64; 1]| [-2.0 * y[0]], 1.0, [1.0], 0.0, OdeOptions::default()).unwrap();
        assert!((y[0] - 2f64.exp()).abs() < 1e-10);
    }

    #[test]
    fn brent_finds_cubic_root() {
        let r = brent(|x| x * x * x - 2.0, 0.0, 2.0, 1e-15);
        assert!((r - 2f64.cbrt()).abs() < 1e-14);
    }
}

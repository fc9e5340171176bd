//! Exact multivariate polynomials over the rationals.
//!
//! Variables are identified by name and kept in sorted order, so polynomials
//! built independently combine without bookkeeping. Text form: a sum of
//! terms `c*x^a*y^b` with integer or `p/q` coefficients; the parser also
//! accepts parentheses, products and integer powers of subexpressions, so
//! factored forms such as `-12*(w-1)^2*(19 - 8*w + w^2)` parse directly.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactPoly {
    vars: Vec<String>,
    terms: BTreeMap<Vec<u32>, Rat>,
}

impl fmt::Debug for ExactPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExactPoly({self})")
    }
}

impl ExactPoly {
    pub fn zero() -> Self {
        Self {
            vars: Vec::new(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: Rat) -> Self {
        let mut p = Self::zero();
        if !c.is_zero() {
            p.terms.insert(Vec::new(), c);
        }
        p
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(int(n))
    }

    pub fn var(name: &str) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![1], Rat::one());
        Self {
            vars: vec![name.to_string()],
            terms,
        }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms as (exponents aligned with [`vars`](Self::vars), coefficient).
    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &Rat)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    // Re-express over a superset of variables (sorted).
    fn lift(&self, vars: &[String]) -> BTreeMap<Vec<u32>, Rat> {
        if self.vars == vars {
            return self.terms.clone();
        }
        let map: Vec<usize> = self
            .vars
            .iter()
            .map(|v| vars.iter().position(|w| w == v).expect("superset"))
            .collect();
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut ne = vec![0u32; vars.len()];
                for (i, &k) in e.iter().enumerate() {
                    ne[map[i]] = k;
                }
                (ne, c.clone())
            })
            .collect()
    }

    fn union_vars(a: &[String], b: &[String]) -> Vec<String> {
        let mut v: Vec<String> = a.iter().chain(b.iter()).cloned().collect();
        v.sort();
        v.dedup();
        v
    }

    // Drop variables that no longer occur.
    fn normalize(mut self) -> Self {
        self.terms.retain(|_, c| !c.is_zero());
        let used: Vec<bool> = (0..self.vars.len())
            .map(|i| self.terms.keys().any(|e| e[i] > 0))
            .collect();
        if used.iter().all(|&u| u) {
            return self;
        }
        let vars: Vec<String> = self
            .vars
            .iter()
            .zip(&used)
            .filter(|(_, &u)| u)
            .map(|(v, _)| v.clone())
            .collect();
        let terms = self
            .terms
            .into_iter()
            .map(|(e, c)| {
                let ne: Vec<u32> = e.iter().zip(&used).filter(|(_, &u)| u).map(|(&k, _)| k).collect();
                (ne, c)
            })
            .collect();
        Self { vars, terms }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::from_int(1);
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    pub fn degree_in(&self, var: &str) -> u32 {
        match self.var_index(var) {
            Some(i) => self.terms.keys().map(|e| e[i]).max().unwrap_or(0),
            None => 0,
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// Coefficients as polynomials in the remaining variables, lowest degree first.
    pub fn coeffs_in(&self, var: &str) -> Vec<ExactPoly> {
        let Some(i) = self.var_index(var) else {
            return vec![self.clone()];
        };
        let deg = self.degree_in(var) as usize;
        let mut out: Vec<BTreeMap<Vec<u32>, Rat>> = vec![BTreeMap::new(); deg + 1];
        for (e, c) in &self.terms {
            let mut ne = e.clone();
            let k = ne[i] as usize;
            ne[i] = 0;
            out[k].insert(ne, c.clone());
        }
        out.into_iter()
            .map(|terms| {
                Self {
                    vars: self.vars.clone(),
                    terms,
                }
                .normalize()
            })
            .collect()
    }

    pub fn derivative(&self, var: &str) -> Self {
        let Some(i) = self.var_index(var) else {
            return Self::zero();
        };
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e[i] > 0)
            .map(|(e, c)| {
                let mut ne = e.clone();
                let k = ne[i];
                ne[i] -= 1;
                (ne, c * int(k as i64))
            })
            .collect();
        Self {
            vars: self.vars.clone(),
            terms,
        }
        .normalize()
    }

    /// Replace `var` by `value` (Horner in the coefficients).
    pub fn substitute(&self, var: &str, value: &ExactPoly) -> Self {
        let coeffs = self.coeffs_in(var);
        let mut acc = Self::zero();
        for c in coeffs.iter().rev() {
            acc = &(&acc * value) + c;
        }
        acc
    }

    pub fn substitute_rat(&self, var: &str, value: &Rat) -> Self {
        self.substitute(var, &Self::constant(value.clone()))
    }

    /// Constant value, if no variables remain.
    pub fn as_constant(&self) -> Option<Rat> {
        if self.terms.is_empty() {
            return Some(Rat::zero());
        }
        if self.vars.is_empty() {
            return self.terms.get(&Vec::new()).cloned();
        }
        None
    }

    /// Exact evaluation at a full assignment.
    pub fn eval(&self, point: &[(&str, Rat)]) -> Result<Rat> {
        let mut p = self.clone();
        for (v, x) in point {
            p = p.substitute_rat(v, x);
        }
        p.as_constant()
            .ok_or_else(|| Error::DegeneratePoly(format!("unassigned variables in {:?}", p.vars)))
    }

    /// Floating-point evaluation; `point` maps variable name to value.
    pub fn eval_f64(&self, point: &[(&str, f64)]) -> f64 {
        let vals: Vec<f64> = self
            .vars
            .iter()
            .map(|v| {
                point
                    .iter()
                    .find(|(n, _)| n == v)
                    .map(|(_, x)| *x)
                    .unwrap_or_else(|| panic!("no value for variable {v}"))
            })
            .collect();
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut t = c.to_f64().unwrap_or(f64::NAN);
                for (k, &p) in e.iter().enumerate() {
                    t *= vals[k].powi(p as i32);
                }
                t
            })
            .sum()
    }

    // lex-leading term with respect to the sorted variable order
    fn leading(&self) -> Option<(&Vec<u32>, &Rat)> {
        self.terms.iter().next_back()
    }

    /// Exact quotient `self / d`; fails when the division leaves a remainder.
    pub fn div_exact(&self, d: &ExactPoly) -> Result<ExactPoly> {
        if d.is_zero() {
            return Err(Error::DegeneratePoly("division by zero polynomial".into()));
        }
        let vars = Self::union_vars(&self.vars, &d.vars);
        let dterms = d.lift(&vars);
        let den = ExactPoly {
            vars: vars.clone(),
            terms: dterms,
        };
        let (dlead_e, dlead_c) = {
            let (e, c) = den.leading().expect("nonzero");
            (e.clone(), c.clone())
        };
        let mut rem = ExactPoly {
            vars: vars.clone(),
            terms: self.lift(&vars),
        };
        let mut quot: BTreeMap<Vec<u32>, Rat> = BTreeMap::new();
        while let Some((e, c)) = rem.leading() {
            if e.iter().zip(&dlead_e).any(|(a, b)| a < b) {
                return Err(Error::DegeneratePoly("inexact polynomial division".into()));
            }
            let qe: Vec<u32> = e.iter().zip(&dlead_e).map(|(a, b)| a - b).collect();
            let qc = c / &dlead_c;
            for (de, dc) in &den.terms {
                let te: Vec<u32> = de.iter().zip(&qe).map(|(a, b)| a + b).collect();
                let entry = rem.terms.entry(te).or_insert_with(Rat::zero);
                *entry -= dc * &qc;
                if entry.is_zero() {
                    let key: Vec<u32> = de.iter().zip(&qe).map(|(a, b)| a + b).collect();
                    rem.terms.remove(&key);
                }
            }
            quot.insert(qe, qc);
        }
        Ok(ExactPoly { vars, terms: quot }.normalize())
    }

    /// Rational content: gcd of numerators over lcm of denominators, sign of
    /// the leading coefficient.
    pub fn content(&self) -> Rat {
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for c in self.terms.values() {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
        }
        if num.is_zero() {
            return Rat::zero();
        }
        let r = Rat::new(num, den);
        match self.leading() {
            Some((_, c)) if c.is_negative() => -r,
            _ => r,
        }
    }

    pub fn primitive(&self) -> ExactPoly {
        let c = self.content();
        if c.is_zero() {
            return self.clone();
        }
        self.scale(&(Rat::one() / c))
    }

    /// Parse with the grammar described at the module level.
    pub fn parse(text: &str) -> Result<ExactPoly> {
        let mut p = Parser {
            src: text.as_bytes(),
            pos: 0,
        };
        let out = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.err("trailing input"));
        }
        Ok(out)
    }
}

fn binop(a: &ExactPoly, b: &ExactPoly, sign: i64) -> ExactPoly {
    let vars = ExactPoly::union_vars(&a.vars, &b.vars);
    let mut terms = a.lift(&vars);
    for (e, c) in b.lift(&vars) {
        let entry = terms.entry(e).or_insert_with(Rat::zero);
        if sign > 0 {
            *entry += c;
        } else {
            *entry -= c;
        }
    }
    ExactPoly { vars, terms }.normalize()
}

impl Add for &ExactPoly {
    type Output = ExactPoly;
    fn add(self, rhs: &ExactPoly) -> ExactPoly {
        binop(self, rhs, 1)
    }
}

impl Sub for &ExactPoly {
    type Output = ExactPoly;
    fn sub(self, rhs: &ExactPoly) -> ExactPoly {
        binop(self, rhs, -1)
    }
}

impl Mul for &ExactPoly {
    type Output = ExactPoly;
    fn mul(self, rhs: &ExactPoly) -> ExactPoly {
        if self.is_zero() || rhs.is_zero() {
            return ExactPoly::zero();
        }
        let vars = ExactPoly::union_vars(&self.vars, &rhs.vars);
        let a = self.lift(&vars);
        let b = rhs.lift(&vars);
        let mut terms: BTreeMap<Vec<u32>, Rat> = BTreeMap::new();
        for (ea, ca) in &a {
            for (eb, cb) in &b {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                *terms.entry(e).or_insert_with(Rat::zero) += ca * cb;
            }
        }
        ExactPoly { vars, terms }.normalize()
    }
}

impl Neg for &ExactPoly {
    type Output = ExactPoly;
    fn neg(self) -> ExactPoly {
        self.scale(&int(-1))
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for ExactPoly {
            type Output = ExactPoly;
            fn $m(self, rhs: ExactPoly) -> ExactPoly { (&self).$m(&rhs) }
        }
        impl $tr<&ExactPoly> for ExactPoly {
            type Output = ExactPoly;
            fn $m(self, rhs: &ExactPoly) -> ExactPoly { (&self).$m(rhs) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl Neg for ExactPoly {
    type Output = ExactPoly;
    fn neg(self) -> ExactPoly {
        -(&self)
    }
}

fn fmt_rat(c: &Rat) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for ExactPoly {
    /// Canonical expanded form, terms in descending lexicographic order of
    /// the exponent vector over the sorted variables.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if n == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| {
                    if k == 1 {
                        self.vars[i].clone()
                    } else {
                        format!("{}^{}", self.vars[i], k)
                    }
                })
                .collect();
            if mono.is_empty() {
                write!(f, "{}", fmt_rat(&mag))?;
            } else if mag.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{}*{}", fmt_rat(&mag), mono.join("*"))?;
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<ExactPoly> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -self.term()?
            }
            Some(b'+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc + self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc - self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<ExactPoly> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc * self.factor()?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    let d = self.factor()?;
                    let c = d.as_constant().filter(|c| !c.is_zero()).ok_or_else(|| self.err("division by a non-constant or zero"))?;
                    acc = acc.scale(&(Rat::one() / c));
                }
                Some(c) if c == b'(' || c.is_ascii_alphabetic() => {
                    acc = acc * self.factor()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<ExactPoly> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(-self.factor()?);
        }
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let n: u32 = std::str::from_utf8(&self.src[start..self.pos])
                .ok()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| self.err("expected exponent"))?;
            return Ok(base.pow(n));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<ExactPoly> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                let n: BigInt = s.parse().map_err(|_| self.err("bad integer"))?;
                Ok(ExactPoly::constant(Rat::from_integer(n)))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                Ok(ExactPoly::var(s))
            }
            _ => Err(self.err("expected number, variable or `(`")),
        }
    }
}

/// Determinant by fraction-free (Bareiss) elimination with row pivoting.
pub fn bareiss_det(mut m: Vec<Vec<ExactPoly>>) -> Result<ExactPoly> {
    let n = m.len();
    if n == 0 {
        return Ok(ExactPoly::from_int(1));
    }
    let mut sign = 1i64;
    let mut prev = ExactPoly::from_int(1);
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(i, k);
                    sign = -sign;
                }
                None => return Ok(ExactPoly::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&m[k][k] * &m[i][j]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = num.div_exact(&prev)?;
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    Ok(if sign < 0 { -d } else { d })
}

/// Sylvester resultant of `p` and `q` with respect to `var`; rows of `p`
/// come first.
pub fn resultant(p: &ExactPoly, q: &ExactPoly, var: &str) -> Result<ExactPoly> {
    let m = p.degree_in(var) as usize;
    let n = q.degree_in(var) as usize;
    if p.is_zero() || q.is_zero() {
        return Err(Error::DegeneratePoly("zero polynomial in resultant".into()));
    }
    if m == 0 && n == 0 {
        return Err(Error::DegeneratePoly(format!("neither polynomial involves {var}")));
    }
    let pc: Vec<ExactPoly> = p.coeffs_in(var).into_iter().rev().collect();
    let qc: Vec<ExactPoly> = q.coeffs_in(var).into_iter().rev().collect();
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for r in 0..n {
        let mut row = vec![ExactPoly::zero(); size];
        for (j, c) in pc.iter().enumerate() {
            row[r + j] = c.clone();
        }
        rows.push(row);
    }
    for r in 0..m {
        let mut row = vec![ExactPoly::zero(); size];
        for (j, c) in qc.iter().enumerate() {
            row[r + j] = c.clone();
        }
        rows.push(row);
    }
    bareiss_det(rows)
}

/// Dense univariate polynomial, lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniPoly(pub Vec<Rat>);

impl UniPoly {
    pub fn from_poly(p: &ExactPoly, var: &str) -> Result<Self> {
        if p.vars().iter().any(|v| v != var) {
            return Err(Error::DegeneratePoly(format!("not univariate in {var}: {p}")));
        }
        let c = p
            .coeffs_in(var)
            .into_iter()
            .map(|c| c.as_constant().expect("constant coefficient"))
            .collect();
        Ok(Self(c).trimmed())
    }

    fn trimmed(mut self) -> Self {
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        self.0.iter().rev().fold(Rat::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        Self(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * int(k as i64))
                .collect(),
        )
        .trimmed()
    }

    /// Quotient and remainder.
    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        let mut r = self.0.clone();
        let dl = d.0.last().expect("nonzero divisor").clone();
        let dd = d.degree();
        if r.len() < d.0.len() {
            return (Self(Vec::new()), self.clone());
        }
        let mut q = vec![Rat::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] / &dl;
            if !c.is_zero() {
                for (j, dc) in d.0.iter().enumerate() {
                    r[k + j] -= &c * dc;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (Self(q).trimmed(), Self(r).trimmed())
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        match a.0.last().cloned() {
            Some(l) => Self(a.0.iter().map(|c| c / &l).collect()),
            None => a,
        }
    }

    pub fn square_free(&self) -> Self {
        let g = self.gcd(&self.derivative());
        self.divrem(&g).0
    }

    fn neg(&self) -> Self {
        Self(self.0.iter().map(|c| -c).collect())
    }
}

/// Sturm chain of the square-free part of a polynomial.
#[derive(Debug, Clone)]
pub struct SturmChain {
    pub chain: Vec<UniPoly>,
}

impl SturmChain {
    pub fn new(p: &UniPoly) -> Result<Self> {
        if p.is_zero() {
            return Err(Error::DegeneratePoly("Sturm chain of the zero polynomial".into()));
        }
        let p0 = p.square_free();
        let mut chain = vec![p0.clone(), p0.derivative()];
        while !chain.last().expect("nonempty").is_zero() {
            let n = chain.len();
            let (_, r) = chain[n - 2].divrem(&chain[n - 1]);
            chain.push(r.neg());
        }
        chain.pop();
        Ok(Self { chain })
    }

    // Sign variations with zero entries dropped.
    fn variations(&self, x: &Rat) -> usize {
        let signs: Vec<i8> = self
            .chain
            .iter()
            .map(|p| {
                let v = p.eval(x);
                if v.is_zero() {
                    0
                } else if v.is_positive() {
                    1
                } else {
                    -1
                }
            })
            .filter(|&s| s != 0)
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// Distinct real roots in the open interval `(a, b)`. Roots at the
    /// endpoints are excluded exactly: for a square-free chain the count on
    /// `(a, b]` is `V(a+) - V(b)`, and `V(a+)` drops the vanishing leading entry.
    pub fn count(&self, a: &Rat, b: &Rat) -> usize {
        assert!(a < b, "empty interval");
        let va = self.variations(a);
        let vb = self.variations(b);
        let at_b = self.chain[0].eval(b).is_zero() as usize;
        (va - vb).saturating_sub(at_b)
    }
}

pub fn sturm_count(p: &ExactPoly, var: &str, a: &Rat, b: &Rat) -> Result<usize> {
    let u = UniPoly::from_poly(p, var)?;
    Ok(SturmChain::new(&u)?.count(a, b))
}

pub fn parse(text: &str) -> ExactPoly {
    ExactPoly::parse(text).unwrap_or_else(|e| panic!("built-in polynomial `{text}`: {e}"))
}

/// Polynomials named in the monotonicity and convexity arguments for
/// `w = I2'/I0'`.
pub mod named {
    use super::{parse, ExactPoly};
    use crate::error::{Error, Result};

    pub const NAMES: &[&str] = &[
        "zeta", "psi1", "psi2", "psi", "chi1", "chi2", "l1", "l2", "f", "riccati", "wpp_num",
    ];

    /// Right-hand side of `3h(h+4) w' = R(h, w)`.
    pub fn riccati() -> ExactPoly {
        parse("-2*w^2 + 2*(h+6)*w - 2*(2*h+9)")
    }

    /// Numerator of `w''` over `(3h(h+4))^2`.
    pub fn wpp_num() -> ExactPoly {
        parse("-2*(6 + h - 2*w)*(-2*h - 6*w + h*w + 2*w^2)")
    }

    pub fn zeta() -> ExactPoly {
        parse(
            "-324 - 108*h - 37*h^2 - 4*h^3 + 2*(108 - 42*h + 4*h^2 + h^3)*w \
             + (-144 + 76*h + h^2)*w^2 - 12*(h-6)*w^3 - 12*w^4",
        )
    }

    pub fn psi1() -> ExactPoly {
        parse("2*(h^3+13*h^2+108*h+324) - (h^3-2*h^2+48*h+432)*w - 2*(h^2+4*h-36)*w^2")
    }

    pub fn psi2() -> ExactPoly {
        parse(
            "-2*(5*h^3+47*h^2-324) + (5*h^3+62*h^2-228*h-1080)*w \
             - 8*(h^2-23*h-63)*w^2 - 36*(h+2)*w^3",
        )
    }

    pub fn psi() -> ExactPoly {
        parse(
            "2*(11*h^4+119*h^3+714*h^2+2592*h+3888) - (11*h^4+16*h^3+32*h^2+2304*h+7776)*w \
             - 6*(3*h^3+26*h^2-16*h-432)*w^2 + 8*(h^2+4*h-36)*w^3",
        )
    }

    pub fn chi1() -> ExactPoly {
        parse("-21975 + 14660*w - 1841*w^2 - 912*w^3 + 114*w^4")
    }

    pub fn chi2() -> ExactPoly {
        parse("-170856 - 4036*h - 401*h^2 + 304*h^3 + 38*h^4")
    }

    /// Lower envelope of `w`: tangent line at the center level.
    pub fn l1() -> ExactPoly {
        parse("1 + (h+4)/6")
    }

    /// Upper envelope of `w`: chord between the two endpoint values.
    pub fn l2() -> ExactPoly {
        parse("3 + h/2")
    }

    /// `f(h)` with the ratio `w` and the four parameters as variables.
    pub fn f() -> ExactPoly {
        parse(
            "-16*lambda - 16*sigma*h + (lambda - 4*sigma + 2*gamma - 8*kappa)*h^2 \
             - 32*(gamma + kappa*h)*w",
        )
    }

    pub fn by_name(name: &str) -> Result<ExactPoly> {
        Ok(match name {
            "zeta" => zeta(),
            "psi1" => psi1(),
            "psi2" => psi2(),
            "psi" => psi(),
            "chi1" => chi1(),
            "chi2" => chi2(),
            "l1" => l1(),
            "l2" => l2(),
            "f" => f(),
            "riccati" => riccati(),
            "wpp_num" => wpp_num(),
            other => return Err(Error::UnknownPoly(other.to_string())),
        })
    }
}

/// Exact evaluation of a named polynomial at a point.
pub fn named_value(name: &str, point: &[(&str, Rat)]) -> Result<Rat> {
    named::by_name(name)?.eval(point)
}

/// Parse a decimal or `p/q` rational literal.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let err = || Error::Parse {
        pos: 0,
        msg: format!("not a rational number: {s}"),
    };
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| err())?;
        let d: BigInt = d.trim().parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(Rat::new(n, d));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, s),
    };
    let (ip, fp) = body.split_once('.').unwrap_or((body, ""));
    if ip.is_empty() && fp.is_empty() {
        return Err(err());
    }
    let digits = format!("{ip}{fp}");
    let n: BigInt = digits.parse().map_err(|_| err())?;
    let d = num_traits::pow(BigInt::from(10), fp.len());
    let r = Rat::new(n, d);
    Ok(if neg { -r } else { r })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        let p = parse("(x - 1)*(x + 1)");
        assert_eq!(p.to_string(), "x^2 - 1");
        let q = parse("3/4*h^2*w - w + 1/2");
        assert_eq!(q.to_string(), "3/4*h^2*w - w + 1/2");
        assert_eq!(ExactPoly::parse(&q.to_string()).unwrap(), q);
        assert!(ExactPoly::parse("x +* 2").is_err());
        assert!(ExactPoly::parse("x/y").is_err());
    }

    #[test]
    fn division_and_content() {
        let a = parse("(x + y)^3*(x - 2*y)");
        let b = parse("(x + y)^2");
        assert_eq!(a.div_exact(&b).unwrap(), parse("(x + y)*(x - 2*y)"));
        assert!(a.div_exact(&parse("x + 3")).is_err());
        let c = parse("6*x^2 - 4/3*x");
        assert_eq!(c.content(), rat(2, 3));
        assert_eq!(c.primitive(), parse("9*x^2 - 2*x"));
    }

    #[test]
    fn resultant_basics() {
        let p = parse("x^2 - 3*x + 2");
        assert!(resultant(&p, &p, "x").unwrap().is_zero());
        // Res(x - a, x - b) = b - a... with p rows first: det [[1, -a],[1, -b]] = a - b
        let r = resultant(&parse("x - a"), &parse("x - b"), "x").unwrap();
        assert_eq!(r, parse("a - b"));
        assert!(resultant(&ExactPoly::zero(), &p, "x").is_err());
    }

    #[test]
    fn sturm_counts() {
        let p = parse("(x - 1)*(x - 2)");
        assert_eq!(sturm_count(&p, "x", &int(0), &int(3)).unwrap(), 2);
        assert_eq!(sturm_count(&p, "x", &int(1), &int(2)).unwrap(), 0);
        assert_eq!(sturm_count(&p, "x", &int(1), &int(3)).unwrap(), 1);
        let sq = parse("(x - 1)^3*(x + 5)");
        assert_eq!(sturm_count(&sq, "x", &int(-10), &int(10)).unwrap(), 2);
    }

    #[test]
    fn decimal_rationals() {
        assert_eq!(parse_rat("-2.5").unwrap(), rat(-5, 2));
        assert_eq!(parse_rat("4/3").unwrap(), rat(4, 3));
        assert!(parse_rat("1/0").is_err());
    }
}

/// Outcome of one exact identity or root-count check.
#[derive(Debug, Clone, serde::Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub statement: String,
    pub holds: bool,
    /// Expanded difference `lhs - rhs` when the identity fails.
    pub residual: Option<String>,
}

fn check_eq(name: &str, statement: &str, lhs: Result<ExactPoly>, rhs: ExactPoly) -> IdentityCheck {
    let (holds, residual) = match lhs {
        Ok(l) => {
            let d = &l - &rhs;
            (d.is_zero(), (!d.is_zero()).then(|| d.to_string()))
        }
        Err(e) => (false, Some(e.to_string())),
    };
    IdentityCheck {
        name: name.into(),
        statement: statement.into(),
        holds,
        residual,
    }
}

fn check_count(name: &str, statement: &str, got: Result<usize>, want: usize) -> IdentityCheck {
    let (holds, residual) = match got {
        Ok(n) => (n == want, (n != want).then(|| format!("counted {n}, expected {want}"))),
        Err(e) => (false, Some(e.to_string())),
    };
    IdentityCheck {
        name: name.into(),
        statement: statement.into(),
        holds,
        residual,
    }
}

// along the flow: d/dh (P / D^k) = (P_h D - k D' P + P_w R) / D^{k+1}
fn flow_derivative(p: &ExactPoly, k: i64) -> ExactPoly {
    let d = parse("3*h*(h+4)");
    let dp = parse("6*h + 12");
    let r = named::riccati();
    &(&(&p.derivative("h") * &d) - &(&dp * p).scale(&int(k))) + &(&p.derivative("w") * &r)
}

/// Every exact identity used by the ratio and cyclicity arguments.
pub fn identity_catalogue() -> Vec<IdentityCheck> {
    use named::*;
    let z = zeta();
    let zh = z.derivative("h");
    let zw = z.derivative("w");
    let p1 = psi1();
    let p2 = psi2();
    let d = parse("3*h*(h+4)");
    let r = riccati();
    let n2 = wpp_num();
    let at = |p: &ExactPoly, v: &str, e: &str| p.substitute(v, &parse(e));
    let mut out = vec![
        check_eq(
            "pf_determinant",
            "det M(h) = 9/8 h^2 (h+4)",
            bareiss_det(pf_matrix_poly()),
            parse("9/8*h^2*(h+4)"),
        ),
        check_eq(
            "wpp",
            "d/dh R/D = -2(6+h-2w)(-2h-6w+hw+2w^2)/D^2",
            Ok(flow_derivative(&r, 1)),
            n2.clone(),
        ),
        check_eq("wppp", "d/dh N2/D^2 = 4 zeta/D^3", Ok(flow_derivative(&n2, 2)), z.scale(&int(4))),
        check_eq(
            "res_zeta_h",
            "Res_h(zeta_h, zeta_w) = -1024 (w-3)^2 (w-2) (w-1)^2 chi1",
            resultant(&zh, &zw, "h"),
            parse("-1024*(w-3)^2*(w-2)*(w-1)^2") * chi1(),
        ),
        check_eq(
            "res_zeta_w",
            "Res_w(zeta_h, zeta_w) = -6144 h^2 (h+2) (h+4)^2 chi2",
            resultant(&zh, &zw, "w"),
            parse("-6144*h^2*(h+2)*(h+4)^2") * chi2(),
        ),
        check_eq(
            "chi1_prime",
            "chi1' = 2(w-2)(228w^2 - 912w - 3665)",
            Ok(chi1().derivative("w")),
            parse("2*(w-2)*(228*w^2 - 912*w - 3665)"),
        ),
        check_eq(
            "chi2_prime",
            "chi2' = 2(h+2)(76h^2 + 304h - 1009)",
            Ok(chi2().derivative("h")),
            parse("2*(h+2)*(76*h^2 + 304*h - 1009)"),
        ),
        check_eq("zeta_center", "zeta(-4, w) = -12(w-1)^2(19-8w+w^2)", Ok(at(&z, "h", "-4")), parse("-12*(w-1)^2*(19-8*w+w^2)")),
        check_eq("zeta_separatrix", "zeta(0, w) = -12(w-3)^2(w^2+3)", Ok(at(&z, "h", "0")), parse("-12*(w-3)^2*(w^2+3)")),
        check_eq("zeta_w1", "zeta(h, 1) = -2(4+h)^2(6+h)", Ok(at(&z, "w", "1")), parse("-2*(4+h)^2*(6+h)")),
        check_eq("zeta_w3", "zeta(h, 3) = 2h^2(h-2)", Ok(at(&z, "w", "3")), parse("2*h^2*(h-2)")),
        check_eq("zeta_critical_value", "zeta(-2, 2) = -16", Ok(at(&at(&z, "h", "-2"), "w", "2")), parse("-16")),
        check_eq("zeta_h_critical", "zeta_h(-2, 2) = 0", Ok(at(&at(&zh, "h", "-2"), "w", "2")), ExactPoly::zero()),
        check_eq("zeta_w_critical", "zeta_w(-2, 2) = 0", Ok(at(&at(&zw, "h", "-2"), "w", "2")), ExactPoly::zero()),
        check_eq(
            "res_psi1",
            "Res_h(Psi1, Psi1_w) = -746496 (w-3)^2 (w-1)^2 (69-20w+5w^2)",
            resultant(&p1, &p1.derivative("w"), "h"),
            parse("-746496*(w-3)^2*(w-1)^2*(69-20*w+5*w^2)"),
        ),
        check_eq(
            "psi_def",
            "R Psi1_w + D Psi1_h = psi",
            Ok(&(&r * &p1.derivative("w")) + &(&d * &p1.derivative("h"))),
            psi(),
        ),
        check_eq(
            "res_psi_psi1",
            "Res_w(psi, Psi1) = -466560 h^5 (h+4)^5 (h^2+4h-36)",
            resultant(&psi(), &p1, "w"),
            parse("-466560*h^5*(h+4)^5*(h^2+4*h-36)"),
        ),
        check_eq("psi1_l1", "Psi1(h, l1) = -2(h-9)(4+h)^3/9", Ok(p1.substitute("w", &l1())), parse("-2*(h-9)*(4+h)^3/9")),
        check_eq("psi1_l2", "Psi1(h, l2) = -h^2(4+h)^2", Ok(p1.substitute("w", &l2())), parse("-h^2*(4+h)^2")),
        check_eq("psi2_w1", "Psi2(h, 1) = -5h(h+4)^2", Ok(at(&p2, "w", "1")), parse("-5*h*(h+4)^2")),
        check_eq("psi2_l1", "Psi2(h, l1) = 4/9 (h-3)(h+4)^3", Ok(p2.substitute("w", &l1())), parse("4/9*(h-3)*(h+4)^3")),
        check_eq("psi2_l2", "Psi2(h, l2) = -4h^2(h+4)^2", Ok(p2.substitute("w", &l2())), parse("-4*h^2*(h+4)^2")),
        check_eq("psi2_w3", "Psi2(h, 3) = 5h^2(h+4)", Ok(at(&p2, "w", "3")), parse("5*h^2*(h+4)")),
        check_eq("psi2_mid", "Psi2(-2, w) = 8(44-52w+13w^2)", Ok(at(&p2, "h", "-2")), parse("8*(44-52*w+13*w^2)")),
    ];
    // rho' along the flow = Psi1 Psi2 / (3 zeta^2), with A = N2 D
    let a = &n2 * &d;
    let num = &(&(&(&a.derivative("h") * &z) - &(&a * &zh)) * &d).scale(&int(3))
        + &(&(&z * &z) * &d).scale(&int(4))
        + (&(&(&a.derivative("w") * &z) - &(&a * &zw)) * &r).scale(&int(3));
    out.push(check_eq("rho_prime", "rho' = Psi1 Psi2 / (3 zeta^2)", Ok(num), (&p1 * &p2 * &d).scale(&int(4))));
    // f''' = -96 w''' rho for kappa = 1
    let f1 = f().substitute_rat("kappa", &int(1));
    let f3 = flow_derivative(&flow_derivative(&flow_derivative(&f1, 0), 1), 2);
    let rhs = (&n2 * &d).scale(&int(-96)) - (&z * &parse("h + gamma")).scale(&int(128));
    out.push(check_eq("f_third", "f''' = -96 w''' rho (kappa = 1)", Ok(f3), rhs));

    let q = |s: &str| parse_rat(s).expect("literal");
    let res_h = resultant(&zh, &zw, "h");
    let res_w = resultant(&zh, &zw, "w");
    out.push(check_count("chi1_roots", "chi1 has no root in (1, 3)", sturm_count(&chi1(), "w", &q("1"), &q("3")), 0));
    out.push(check_count("chi2_roots", "chi2 has no root in (-4, 0)", sturm_count(&chi2(), "h", &q("-4"), &q("0")), 0));
    out.push(check_count(
        "psi2_mid_roots",
        "Psi2(-2, w) has no root in (4/3, 2)",
        sturm_count(&at(&p2, "h", "-2"), "w", &q("4/3"), &q("2")),
        0,
    ));
    out.push(check_count(
        "critical_w_unique",
        "Res_h(zeta_h, zeta_w) has one distinct root in (1, 3)",
        res_h.and_then(|p| sturm_count(&p, "w", &q("1"), &q("3"))),
        1,
    ));
    out.push(check_count(
        "critical_h_unique",
        "Res_w(zeta_h, zeta_w) has one distinct root in (-4, 0)",
        res_w.and_then(|p| sturm_count(&p, "h", &q("-4"), &q("0"))),
        1,
    ));
    out
}

/// Picard–Fuchs matrix with `(I*, I2, I0) = M(h) (I*', I2', I0')`.
pub fn pf_matrix_poly() -> Vec<Vec<ExactPoly>> {
    [
        ["h", "-2", "h + 6"],
        ["0", "3/4*(h - 6)", "3/2*(h + 9)"],
        ["0", "-3", "3/2*(h + 6)"],
    ]
    .iter()
    .map(|row| row.iter().map(|s| parse(s)).collect())
    .collect()
}

//! Exact multivariate polynomials in z_1..z_n and their conjugates, with
//! Gaussian-rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational number.
pub type Rational = BigRational;
/// Exact Gaussian rational `a + b i`.
pub type Gaussian = Complex<BigRational>;

pub fn rat(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn gauss(re: Rational, im: Rational) -> Gaussian {
    Complex::new(re, im)
}

pub fn gauss_int(re: i64, im: i64) -> Gaussian {
    Complex::new(rat(re, 1), rat(im, 1))
}

pub fn gauss_i() -> Gaussian {
    gauss_int(0, 1)
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Very large numerators/denominators: fall back to a scaled division.
        let n = r.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = r.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

pub fn gaussian_to_c64(g: &Gaussian) -> Complex64 {
    Complex64::new(rational_to_f64(&g.re), rational_to_f64(&g.im))
}

/// A coordinate symbol: `z_i` or its conjugate `zbar_i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    Z(usize),
    Zbar(usize),
}

impl Var {
    /// Position in an exponent vector of length `2n` (holomorphic first).
    pub fn slot(self, n: usize) -> usize {
        match self {
            Var::Z(i) => i,
            Var::Zbar(i) => n + i,
        }
    }

    pub fn from_slot(slot: usize, n: usize) -> Var {
        if slot < n {
            Var::Z(slot)
        } else {
            Var::Zbar(slot - n)
        }
    }

    pub fn conjugate(self) -> Var {
        match self {
            Var::Z(i) => Var::Zbar(i),
            Var::Zbar(i) => Var::Z(i),
        }
    }
}

/// Exponent vector: entries `0..n` for `z`, `n..2n` for `zbar`.
pub type Exponents = Vec<u32>;

/// Polynomial over the Gaussian rationals in the symbols `z_i, zbar_i`,
/// treated as independent variables.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ComplexPolynomial {
    nvars: usize,
    terms: BTreeMap<Exponents, Gaussian>,
}

impl ComplexPolynomial {
    pub fn zero(nvars: usize) -> Self {
        ComplexPolynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Gaussian::one())
    }

    pub fn constant(nvars: usize, c: Gaussian) -> Self {
        Self::monomial(nvars, vec![0; 2 * nvars], c)
    }

    pub fn var(nvars: usize, v: Var) -> Self {
        let mut e = vec![0; 2 * nvars];
        e[v.slot(nvars)] = 1;
        Self::monomial(nvars, e, Gaussian::one())
    }

    pub fn monomial(nvars: usize, exps: Exponents, c: Gaussian) -> Self {
        assert_eq!(exps.len(), 2 * nvars, "exponent vector length must be 2n");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        ComplexPolynomial { nvars, terms }
    }

    /// Build from arbitrary (possibly repeated, possibly zero) terms.
    pub fn from_terms<I: IntoIterator<Item = (Exponents, Gaussian)>>(nvars: usize, it: I) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in it {
            assert_eq!(e.len(), 2 * nvars, "exponent vector length must be 2n");
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: Exponents, c: Gaussian) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Exponents, Gaussian> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Constant term value if the polynomial has no non-constant terms.
    pub fn as_constant(&self) -> Option<Gaussian> {
        match self.terms.len() {
            0 => Some(Gaussian::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&k| k == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &Gaussian) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        ComplexPolynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn scale_rational(&self, r: &Rational) -> Self {
        self.scale(&Complex::new(r.clone(), Rational::zero()))
    }

    /// Swap `z`/`zbar` exponents and conjugate every coefficient.
    pub fn conjugate(&self) -> Self {
        let n = self.nvars;
        ComplexPolynomial {
            nvars: n,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut f = Vec::with_capacity(2 * n);
                    f.extend_from_slice(&e[n..]);
                    f.extend_from_slice(&e[..n]);
                    (f, c.conj())
                })
                .collect(),
        }
    }

    /// Real-valued as a function of the real coordinates.
    pub fn is_real(&self) -> bool {
        *self == self.conjugate()
    }

    /// No `zbar` dependence.
    pub fn is_holomorphic(&self) -> bool {
        let n = self.nvars;
        self.terms.keys().all(|e| e[n..].iter().all(|&k| k == 0))
    }

    /// Wirtinger derivative with respect to `v`.
    pub fn differentiate(&self, v: Var) -> Self {
        self.differentiate_slot(v.slot(self.nvars))
    }

    pub fn differentiate_slot(&self, slot: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let k = e[slot];
            if k == 0 {
                continue;
            }
            let mut f = e.clone();
            f[slot] = k - 1;
            out.add_term(
                f,
                c * Complex::new(Rational::from_integer(BigInt::from(k)), Rational::zero()),
            );
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Evaluate at complex coordinates `z` (conjugates taken internally).
    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        assert_eq!(z.len(), self.nvars, "point dimension mismatch");
        let zb: Vec<Complex64> = z.iter().map(|w| w.conj()).collect();
        let mut total = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut t = gaussian_to_c64(c);
            for i in 0..self.nvars {
                if e[i] > 0 {
                    t *= z[i].powu(e[i]);
                }
                if e[self.nvars + i] > 0 {
                    t *= zb[i].powu(e[self.nvars + i]);
                }
            }
            total += t;
        }
        total
    }

    /// Exact evaluation at a Gaussian-rational point.
    pub fn eval_exact(&self, z: &[Gaussian]) -> Gaussian {
        assert_eq!(z.len(), self.nvars, "point dimension mismatch");
        let mut total = Gaussian::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for i in 0..self.nvars {
                for _ in 0..e[i] {
                    t = t * z[i].clone();
                }
                for _ in 0..e[self.nvars + i] {
                    t = t * z[i].conj();
                }
            }
            total += t;
        }
        total
    }

    /// Substitute `z = A w` (and `zbar = conj(A) wbar`).
    pub fn linear_substitute(&self, a: &[Vec<Gaussian>]) -> Self {
        let n = self.nvars;
        assert_eq!(a.len(), n);
        let zs: Vec<ComplexPolynomial> = (0..n)
            .map(|i| {
                let mut p = Self::zero(n);
                for j in 0..n {
                    p = p + Self::var(n, Var::Z(j)).scale(&a[i][j]);
                }
                p
            })
            .collect();
        let zbs: Vec<ComplexPolynomial> = zs.iter().map(|p| p.conjugate()).collect();
        let mut out = Self::zero(n);
        for (e, c) in &self.terms {
            let mut t = Self::constant(n, c.clone());
            for i in 0..n {
                if e[i] > 0 {
                    t = &t * &zs[i].pow(e[i]);
                }
                if e[n + i] > 0 {
                    t = &t * &zbs[i].pow(e[n + i]);
                }
            }
            out += t;
        }
        out
    }

    /// Re-embed into a larger variable set, mapping old variable `i` to `map[i]`.
    pub fn relabel(&self, new_nvars: usize, map: &[usize]) -> Self {
        assert_eq!(map.len(), self.nvars);
        let n = self.nvars;
        ComplexPolynomial::from_terms(
            new_nvars,
            self.terms.iter().map(|(e, c)| {
                let mut f = vec![0; 2 * new_nvars];
                for i in 0..n {
                    f[map[i]] += e[i];
                    f[new_nvars + map[i]] += e[n + i];
                }
                (f, c.clone())
            }),
        )
    }
}

impl fmt::Debug for ComplexPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn fmt_gaussian(c: &Gaussian) -> String {
    match (c.re.is_zero(), c.im.is_zero()) {
        (_, true) => fmt_rational(&c.re),
        (true, false) => format!("{}i", fmt_rational(&c.im)),
        (false, false) => {
            let sign = if c.im.is_negative() { "-" } else { "+" };
            format!(
                "({}{}{}i)",
                fmt_rational(&c.re),
                sign,
                fmt_rational(&c.im.abs())
            )
        }
    }
}

impl fmt::Display for ComplexPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let n = self.nvars;
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", fmt_gaussian(c))?;
            for i in 0..n {
                match e[i] {
                    0 => {}
                    1 => write!(f, "*z{}", i)?,
                    k => write!(f, "*z{}^{}", i, k)?,
                }
            }
            for i in 0..n {
                match e[n + i] {
                    0 => {}
                    1 => write!(f, "*zb{}", i)?,
                    k => write!(f, "*zb{}^{}", i, k)?,
                }
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a ComplexPolynomial> for &'a ComplexPolynomial {
    type Output = ComplexPolynomial;
    fn add(self, rhs: &ComplexPolynomial) -> ComplexPolynomial {
        let mut out = self.clone();
        out += rhs.clone();
        out
    }
}

impl Add for ComplexPolynomial {
    type Output = ComplexPolynomial;
    fn add(mut self, rhs: ComplexPolynomial) -> ComplexPolynomial {
        self += rhs;
        self
    }
}

impl AddAssign for ComplexPolynomial {
    fn add_assign(&mut self, rhs: ComplexPolynomial) {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        for (e, c) in rhs.terms {
            self.add_term(e, c);
        }
    }
}

impl SubAssign for ComplexPolynomial {
    fn sub_assign(&mut self, rhs: ComplexPolynomial) {
        *self += -rhs;
    }
}

impl<'a> Sub<&'a ComplexPolynomial> for &'a ComplexPolynomial {
    type Output = ComplexPolynomial;
    fn sub(self, rhs: &ComplexPolynomial) -> ComplexPolynomial {
        let mut out = self.clone();
        out -= rhs.clone();
        out
    }
}

impl Sub for ComplexPolynomial {
    type Output = ComplexPolynomial;
    fn sub(mut self, rhs: ComplexPolynomial) -> ComplexPolynomial {
        self -= rhs;
        self
    }
}

impl Neg for ComplexPolynomial {
    type Output = ComplexPolynomial;
    fn neg(self) -> ComplexPolynomial {
        ComplexPolynomial {
            nvars: self.nvars,
            terms: self.terms.into_iter().map(|(e, c)| (e, -c)).collect(),
        }
    }
}

impl<'a> Mul<&'a ComplexPolynomial> for &'a ComplexPolynomial {
    type Output = ComplexPolynomial;
    fn mul(self, rhs: &ComplexPolynomial) -> ComplexPolynomial {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = ComplexPolynomial::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e: Exponents = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }
}

impl Mul for ComplexPolynomial {
    type Output = ComplexPolynomial;
    fn mul(self, rhs: ComplexPolynomial) -> ComplexPolynomial {
        &self * &rhs
    }
}

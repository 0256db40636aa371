//! Exact sparse multivariate polynomial arithmetic over rationals.
//!
//! Coefficients are arbitrary-precision rationals ([`Rational`]) so that all
//! identity checks (homogeneous reconstruction, the Euler identity relating a
//! radial derivative to the jet sums, the worked-example factorizations) are
//! exact, never tolerance-based. Floating-point evaluation exists only for
//! sampling and dynamics and is always an explicit, separate entry point.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// Exact rational coefficient: arbitrary-precision integers, always reduced,
/// denominator always positive.
pub type Rational = num_rational::BigRational;

/// Shorthand for the rational `n/d`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Shorthand for the integer rational `n`.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `base^exp` by binary exponentiation.
pub fn rat_pow(base: &Rational, exp: u32) -> Rational {
    let mut result = Rational::one();
    let mut b = base.clone();
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            result *= &b;
        }
        e >>= 1;
        if e > 0 {
            b = &b * &b;
        }
    }
    result
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("curve substitution needs one univariate polynomial per variable ({expected}), got {found}")]
    CurveArity { expected: usize, found: usize },
    #[error("direction vector must be nonzero")]
    ZeroDirection,
    #[error("substitution curves must be univariate, curve {index} has dimension {found}")]
    CurveNotUnivariate { index: usize, found: usize },
}

/// Exponent vector of one term; its length is the ambient dimension.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    exponents: Vec<u32>,
}

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial { exponents }
    }

    /// The constant monomial (all exponents zero).
    pub fn unit(dim: usize) -> Self {
        Monomial { exponents: vec![0; dim] }
    }

    /// The monomial `x_i`.
    pub fn var(dim: usize, i: usize) -> Self {
        let mut exponents = vec![0; dim];
        exponents[i] = 1;
        Monomial { exponents }
    }

    pub fn dim(&self) -> usize {
        self.exponents.len()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    /// Total degree (sum of exponents).
    pub fn degree(&self) -> u32 {
        self.exponents.iter().sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial {
            exponents: self
                .exponents
                .iter()
                .zip(&other.exponents)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// Invariants: no stored zero coefficients (purged eagerly, so equality is
/// plain map equality) and every monomial has an exponent vector of length
/// `dim`. Values are immutable after construction; all operations allocate
/// fresh results.
#[derive(Clone, PartialEq, Eq)]
pub struct Polynomial {
    dim: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero(dim: usize) -> Self {
        Polynomial { dim, terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: Rational) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(Monomial::unit(dim), c);
        p
    }

    /// The coordinate polynomial `x_i`.
    pub fn var(dim: usize, i: usize) -> Self {
        assert!(i < dim, "variable index {i} out of range for dimension {dim}");
        let mut p = Self::zero(dim);
        p.add_term(Monomial::var(dim, i), Rational::one());
        p
    }

    /// Single term `c * x^exponents`.
    pub fn term(dim: usize, exponents: &[u32], c: Rational) -> Self {
        assert_eq!(exponents.len(), dim, "exponent vector length must equal dimension");
        let mut p = Self::zero(dim);
        p.add_term(Monomial::new(exponents.to_vec()), c);
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, merging
    /// duplicates and purging zeros.
    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = (Vec<u32>, Rational)>,
    {
        let mut p = Self::zero(dim);
        for (exps, c) in terms {
            if exps.len() != dim {
                return Err(PolyError::DimensionMismatch { expected: dim, found: exps.len() });
            }
            p.add_term(Monomial::new(exps), c);
        }
        Ok(p)
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(m.dim(), self.dim);
        let remove = {
            let entry = self.terms.entry(m.clone()).or_insert_with(Rational::zero);
            *entry += c;
            entry.is_zero()
        };
        if remove {
            self.terms.remove(&m);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Lowest total degree among the stored terms; `None` for zero.
    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).min()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    fn check_dim(&self, other: &Polynomial) -> Result<(), PolyError> {
        if self.dim != other.dim {
            return Err(PolyError::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.try_add(&other.neg())
    }

    pub fn try_mul(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_dim(other)?;
        let mut out = Polynomial::zero(self.dim);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial {
            dim: self.dim,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.dim);
        }
        Polynomial {
            dim: self.dim,
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Polynomial {
        let mut result = Polynomial::constant(self.dim, Rational::one());
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = result.try_mul(&base).expect("same dimension");
            }
            e >>= 1;
            if e > 0 {
                base = base.try_mul(&base).expect("same dimension");
            }
        }
        result
    }

    /// Exact partial derivative with respect to variable `i`.
    pub fn partial(&self, i: usize) -> Polynomial {
        assert!(i < self.dim);
        let mut out = Polynomial::zero(self.dim);
        for (m, c) in &self.terms {
            let e = m.exponents[i];
            if e == 0 {
                continue;
            }
            let mut exps = m.exponents.clone();
            exps[i] = e - 1;
            out.add_term(Monomial::new(exps), c * int(e as i64));
        }
        out
    }

    /// Exact gradient: component `i` is `∂p/∂q_i`.
    pub fn gradient(&self) -> Vec<Polynomial> {
        (0..self.dim).map(|i| self.partial(i)).collect()
    }

    /// The degree-`l` homogeneous part.
    pub fn homogeneous_part(&self, l: u32) -> Polynomial {
        Polynomial {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == l)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Splits the truncation to order `s` into homogeneous parts; terms of
    /// degree above `s` are discarded.
    pub fn homogeneous_parts(&self, s: u32) -> JetDecomposition {
        JetDecomposition::of(self, s)
    }

    /// The jet of order `l`: the sum of all parts of degree at most `l`.
    pub fn jet(&self, l: u32) -> Polynomial {
        Polynomial {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() <= l)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Radial derivative `R_p(q) = <∇p(q), q>`, computed exactly.
    ///
    /// Equivalently, by Euler's theorem for homogeneous functions, each
    /// degree-`l` part gets multiplied by `l`.
    pub fn radial_derivative(&self) -> Polynomial {
        Polynomial {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() > 0)
                .map(|(m, c)| (m.clone(), c * int(m.degree() as i64)))
                .collect(),
        }
    }

    /// Restriction to the ray through `u`: the univariate polynomial
    /// `t ↦ p(t·u)`, exact.
    pub fn restrict_to_ray(&self, u: &[Rational]) -> Result<Polynomial, PolyError> {
        if u.len() != self.dim {
            return Err(PolyError::DimensionMismatch { expected: self.dim, found: u.len() });
        }
        if u.iter().all(Zero::is_zero) {
            return Err(PolyError::ZeroDirection);
        }
        let mut out = Polynomial::zero(1);
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            for (i, &e) in m.exponents.iter().enumerate() {
                if e > 0 {
                    coeff *= rat_pow(&u[i], e);
                }
            }
            out.add_term(Monomial::new(vec![m.degree()]), coeff);
        }
        Ok(out)
    }

    /// Composition with a curve given by one univariate polynomial per
    /// variable: returns the exact univariate `x ↦ p(c_1(x), …, c_n(x))`.
    pub fn substitute_curve(&self, curve: &[Polynomial]) -> Result<Polynomial, PolyError> {
        if curve.len() != self.dim {
            return Err(PolyError::CurveArity { expected: self.dim, found: curve.len() });
        }
        for (i, c) in curve.iter().enumerate() {
            if c.dim() != 1 {
                return Err(PolyError::CurveNotUnivariate { index: i, found: c.dim() });
            }
        }
        let mut out = Polynomial::zero(1);
        for (m, c) in &self.terms {
            let mut term = Polynomial::constant(1, c.clone());
            for (i, &e) in m.exponents.iter().enumerate() {
                if e > 0 {
                    term = term.try_mul(&curve[i].pow(e)).expect("univariate");
                }
            }
            out = out.try_add(&term).expect("univariate");
        }
        Ok(out)
    }

    /// Exact evaluation at a rational point.
    pub fn eval_exact(&self, q: &[Rational]) -> Result<Rational, PolyError> {
        if q.len() != self.dim {
            return Err(PolyError::DimensionMismatch { expected: self.dim, found: q.len() });
        }
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.exponents.iter().enumerate() {
                if e > 0 {
                    t *= rat_pow(&q[i], e);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Exact sign at a floating-point sample point (the coordinates convert
    /// to rationals exactly). Returns `None` if a coordinate is not finite.
    pub fn sign_at_f64(&self, q: &[f64]) -> Option<i8> {
        let qr: Option<Vec<Rational>> = q.iter().map(|&x| Rational::from_float(x)).collect();
        let v = self.eval_exact(&qr?).ok()?;
        Some(if v.is_zero() {
            0
        } else if v.is_positive() {
            1
        } else {
            -1
        })
    }

    /// Double-precision evaluation (term-by-term in deterministic order).
    pub fn eval_f64(&self, q: &[f64]) -> Result<f64, PolyError> {
        Ok(self.eval_f64_with_bound(q)?.0)
    }

    /// Double-precision evaluation together with a crude rounding-noise bound
    /// (the sum of term magnitudes scaled by a generous machine-epsilon
    /// multiple). Values inside the bound have an unreliable sign and should
    /// be escalated to exact evaluation when a backing polynomial exists.
    pub fn eval_f64_with_bound(&self, q: &[f64]) -> Result<(f64, f64), PolyError> {
        if q.len() != self.dim {
            return Err(PolyError::DimensionMismatch { expected: self.dim, found: q.len() });
        }
        let mut acc = 0.0;
        let mut mag = 0.0;
        for (m, c) in &self.terms {
            let mut t = c.to_f64().unwrap_or(f64::NAN);
            for (i, &e) in m.exponents.iter().enumerate() {
                if e > 0 {
                    t *= q[i].powi(e as i32);
                }
            }
            acc += t;
            mag += t.abs();
        }
        Ok((acc, mag * 1e-13))
    }

    /// Human-readable rendering with explicit variable names.
    pub fn to_string_named(&self, names: &[&str]) -> String {
        assert_eq!(names.len(), self.dim);
        if self.is_zero() {
            return "0".to_string();
        }
        // Descending by (degree, exponents) reads like hand-written math.
        let mut terms: Vec<(&Monomial, &Rational)> = self.terms.iter().collect();
        terms.sort_by(|(ma, _), (mb, _)| {
            (mb.degree(), mb.exponents()).cmp(&(ma.degree(), ma.exponents()))
        });
        let mut out = String::new();
        for (k, (m, c)) in terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            if !abs.is_one() || m.degree() == 0 {
                factors.push(abs.to_string());
            }
            for (i, &e) in m.exponents().iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(names[i].to_string()),
                    _ => factors.push(format!("{}^{}", names[i], e)),
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }

    fn default_names(dim: usize) -> Vec<String> {
        match dim {
            1 => vec!["x".into()],
            2 => vec!["x".into(), "y".into()],
            3 => vec!["x".into(), "y".into(), "z".into()],
            n => (1..=n).map(|i| format!("q{i}")).collect(),
        }
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = Self::default_names(self.dim);
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        f.write_str(&self.to_string_named(&refs))
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial[{}]({})", self.dim, self)
    }
}

impl std::ops::Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.try_add(rhs).expect("polynomial dimension mismatch")
    }
}

impl std::ops::Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.try_sub(rhs).expect("polynomial dimension mismatch")
    }
}

impl std::ops::Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.try_mul(rhs).expect("polynomial dimension mismatch")
    }
}

impl std::ops::Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::neg(self)
    }
}

/// Ordered list of homogeneous parts `Π_0 … Π_s` of a jet.
///
/// Degree-0 and degree-1 parts are retained: the analyzer checks rather than
/// assumes that the origin is a critical point with zero potential.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetDecomposition {
    order: u32,
    parts: Vec<Polynomial>,
}

impl JetDecomposition {
    /// Decomposes the truncation of `p` to order `s`; each entry `parts[l]`
    /// is homogeneous of degree `l` or identically zero.
    pub fn of(p: &Polynomial, s: u32) -> Self {
        let parts = (0..=s).map(|l| p.homogeneous_part(l)).collect();
        JetDecomposition { order: s, parts }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.parts[0].dim()
    }

    /// The degree-`l` part (zero polynomial when `l` exceeds the order).
    pub fn part(&self, l: u32) -> &Polynomial {
        &self.parts[l as usize]
    }

    pub fn parts(&self) -> &[Polynomial] {
        &self.parts
    }

    /// `j^l`: the sum of all parts of degree at most `l ≤ order`.
    pub fn jet(&self, l: u32) -> Polynomial {
        assert!(l <= self.order, "jet order {l} exceeds decomposition order {}", self.order);
        let mut out = Polynomial::zero(self.dim());
        for part in &self.parts[..=l as usize] {
            out = out.try_add(part).expect("same dimension");
        }
        out
    }

    /// Exact sum of all parts (the order-`s` truncation itself).
    pub fn sum(&self) -> Polynomial {
        self.jet(self.order)
    }

    /// The combination `(s−1)·j^s − Σ_{l=2}^{s−2} j^l + Π_s`.
    ///
    /// By Euler's theorem on homogeneous functions this equals the radial
    /// derivative of `j^s` exactly whenever the degree-0 and degree-1 parts
    /// vanish, which holds for every admissible potential.
    pub fn euler_identity_rhs(&self, s: u32) -> Polynomial {
        assert!(s >= 2, "needs order at least 2");
        assert!(s <= self.order, "decomposition order too small");
        let mut out = self.jet(s).scale(&int(s as i64 - 1));
        for l in 2..=s.saturating_sub(2) {
            out = out.try_sub(&self.jet(l)).expect("same dimension");
        }
        out.try_add(self.part(s)).expect("same dimension")
    }
}

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Dense univariate polynomial, constant term first.
///
/// The coefficient vector is kept trimmed: the last entry is nonzero unless
/// the polynomial is zero, in which case the vector is empty.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

impl<T: Clone + Zero> Poly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: T) -> Self {
        Poly::new(vec![c])
    }

    /// `c · X^n`
    pub fn monomial(c: T, n: usize) -> Self {
        let mut v = vec![T::zero(); n + 1];
        v[n] = c;
        Poly::new(v)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    /// Coefficient of `X^i`, zero past the degree.
    pub fn coeff(&self, i: usize) -> T {
        self.coeffs.get(i).cloned().unwrap_or_else(T::zero)
    }

    pub fn leading(&self) -> T {
        self.coeffs.last().cloned().unwrap_or_else(T::zero)
    }

    pub fn map<U: Clone + Zero>(&self, f: impl Fn(&T) -> U) -> Poly<U> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }
}

impl<T> Poly<T>
where
    T: Clone + Zero + One + Add<Output = T> + Mul<Output = T>,
{
    pub fn x() -> Self {
        Poly::new(vec![T::zero(), T::one()])
    }

    /// Horner evaluation at a point of any type the coefficients embed into.
    pub fn eval<U>(&self, at: &U) -> U
    where
        U: Clone + Zero + Add<Output = U> + Mul<Output = U> + From<T>,
    {
        self.coeffs
            .iter()
            .rev()
            .fold(U::zero(), |acc, c| acc * at.clone() + U::from(c.clone()))
    }

    /// Same as [`Poly::eval`] with an explicit coefficient embedding.
    pub fn eval_with<U>(&self, at: &U, embed: impl Fn(&T) -> U) -> U
    where
        U: Clone + Zero + Add<Output = U> + Mul<Output = U>,
    {
        self.coeffs
            .iter()
            .rev()
            .fold(U::zero(), |acc, c| acc * at.clone() + embed(c))
    }

    pub fn derivative(&self) -> Self {
        let mut out = Vec::with_capacity(self.coeffs.len().saturating_sub(1));
        let mut k = T::zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                out.push(c.clone() * k.clone());
            }
            k = k + T::one();
        }
        Poly::new(out)
    }

    pub fn scale(&self, s: &T) -> Self {
        Poly::new(self.coeffs.iter().map(|c| c.clone() * s.clone()).collect())
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Poly::constant(T::one());
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// `f(g(X))`
    pub fn compose(&self, g: &Self) -> Self {
        self.coeffs
            .iter()
            .rev()
            .fold(Poly::zero(), |acc, c| &(&acc * g) + &Poly::constant(c.clone()))
    }
}

impl<'a, T> Add<&'a Poly<T>> for &'a Poly<T>
where
    T: Clone + Zero + Add<Output = T>,
{
    type Output = Poly<T>;
    fn add(self, rhs: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut v = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.coeffs.get(i).cloned().unwrap_or_else(T::zero);
            let b = rhs.coeffs.get(i).cloned().unwrap_or_else(T::zero);
            v.push(a + b);
        }
        Poly::new(v)
    }
}

impl<'a, T> Sub<&'a Poly<T>> for &'a Poly<T>
where
    T: Clone + Zero + Sub<Output = T>,
{
    type Output = Poly<T>;
    fn sub(self, rhs: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut v = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.coeffs.get(i).cloned().unwrap_or_else(T::zero);
            let b = rhs.coeffs.get(i).cloned().unwrap_or_else(T::zero);
            v.push(a - b);
        }
        Poly::new(v)
    }
}

impl<'a, T> Mul<&'a Poly<T>> for &'a Poly<T>
where
    T: Clone + Zero + Add<Output = T> + Mul<Output = T>,
{
    type Output = Poly<T>;
    fn mul(self, rhs: &Poly<T>) -> Poly<T> {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                v[i + j] = v[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(v)
    }
}

impl<T> Neg for &Poly<T>
where
    T: Clone + Zero + Neg<Output = T>,
{
    type Output = Poly<T>;
    fn neg(self) -> Poly<T> {
        Poly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

impl Poly<BigRational> {
    /// Euclidean division over ℚ. Panics on a zero divisor.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let dl = d.leading();
        let dd = d.degree();
        let mut rem = self.coeffs.clone();
        if rem.len() < d.coeffs.len() {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![BigRational::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] / &dl;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    rem[k + j] = &rem[k + j] - &c * dc;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Poly::new(quot), Poly::new(rem))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.div_rem(d).1
    }

    /// Multiply by the common denominator and divide by the content: the
    /// primitive integer polynomial with positive leading coefficient.
    pub fn to_primitive_int(&self) -> Poly<BigInt> {
        let lcm = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints = Poly::new(
            self.coeffs
                .iter()
                .map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer())
                .collect(),
        );
        ints.primitive_part()
    }

    /// Resultant by the Euclidean remainder sequence.
    pub fn resultant(&self, g: &Self) -> BigRational {
        if self.is_zero() || g.is_zero() {
            return BigRational::zero();
        }
        let (mut f, mut g) = (self.clone(), g.clone());
        let mut acc = BigRational::one();
        loop {
            let (df, dg) = (f.degree(), g.degree());
            if dg == 0 {
                return acc * num_traits::pow(g.leading(), df);
            }
            if df < dg {
                if (df * dg) % 2 == 1 {
                    acc = -acc;
                }
                std::mem::swap(&mut f, &mut g);
                continue;
            }
            let r = f.rem(&g);
            if r.is_zero() {
                return BigRational::zero();
            }
            // res(f, g) = (-1)^{df·dg} lc(g)^{df - dr} res(g, r)
            let dr = r.degree();
            if (df * dg) % 2 == 1 {
                acc = -acc;
            }
            acc *= num_traits::pow(g.leading(), df - dr);
            f = g;
            g = r;
        }
    }

    pub fn monic(&self) -> Self {
        let l = self.leading();
        Poly::new(self.coeffs.iter().map(|c| c / &l).collect())
    }
}

impl Poly<BigInt> {
    pub fn content(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::zero(), |acc, c| acc.gcd(c))
    }

    /// Divide out the content and normalise the sign of the leading coefficient.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = self.content();
        if self.leading().is_negative() {
            g = -g;
        }
        Poly::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    pub fn to_rational(&self) -> Poly<BigRational> {
        self.map(|c| BigRational::from_integer(c.clone()))
    }

    /// `X^n - c`
    pub fn x_pow_minus(n: usize, c: BigInt) -> Self {
        let mut v = vec![BigInt::zero(); n + 1];
        v[0] = -c;
        v[n] = BigInt::one();
        Poly::new(v)
    }

    /// Whether `self` divides `other` in ℚ[X].
    pub fn divides(&self, other: &Self) -> bool {
        other.to_rational().rem(&self.to_rational()).is_zero()
    }
}

impl<T: fmt::Display + Zero + PartialEq + Clone> fmt::Display for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})*X")?,
                _ => write!(f, "({c})*X^{i}")?,
            }
        }
        Ok(())
    }
}

impl<T: fmt::Debug> fmt::Debug for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Poly").field(&self.coeffs).finish()
    }
}

/// Cyclotomic polynomial `Φ_n`, by dividing `X^n - 1` by `Φ_d` for proper divisors `d`.
pub fn cyclotomic(n: u64) -> Poly<BigInt> {
    assert!(n >= 1);
    let mut num = Poly::<BigInt>::x_pow_minus(n as usize, BigInt::one()).to_rational();
    for d in 1..n {
        if n.is_multiple_of(d) {
            num = num.div_rem(&cyclotomic(d).to_rational()).0;
        }
    }
    num.to_primitive_int()
}

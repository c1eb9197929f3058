use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::rational::{parse_rational, rat_to_string, Rational};

/// Univariate polynomial over Q, coefficients lowest degree first.
/// The coefficient vector never ends in a zero.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Poly::new(vec![Rational::zero(), Rational::one()])
    }

    pub fn constant(c: Rational) -> Self {
        Poly::new(vec![c])
    }

    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Poly::new(c.iter().map(|&v| Rational::from_integer(BigInt::from(v))).collect())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn scale(&self, k: &Rational) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.lead().recip();
        self.scale(&l)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + crate::rational::rat_to_f64(c);
        }
        acc
    }

    /// Enclosure of the range of the polynomial over `[lo, hi]` by Horner
    /// interval arithmetic.
    pub fn eval_interval(&self, lo: &Rational, hi: &Rational) -> (Rational, Rational) {
        let mut a = Rational::zero();
        let mut b = Rational::zero();
        for c in self.coeffs.iter().rev() {
            let ps = [&a * lo, &a * hi, &b * lo, &b * hi];
            let mut mn = ps[0].clone();
            let mut mx = ps[0].clone();
            for p in &ps[1..] {
                if p < &mn {
                    mn = p.clone();
                }
                if p > &mx {
                    mx = p.clone();
                }
            }
            a = mn + c;
            b = mx + c;
        }
        (a, b)
    }

    /// Euclidean division: `self = q * d + r` with `deg r < deg d`.
    pub fn divrem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.degree().unwrap();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let inv = d.lead().recip();
        let mut q = vec![Rational::zero(); r.len() - dd];
        for i in (dd..r.len()).rev() {
            let k = &r[i] * &inv;
            if k.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                let t = &k * dc;
                r[i - dd + j] -= t;
            }
            q[i - dd] = k;
        }
        r.truncate(dd);
        (Poly::new(q), Poly::new(r))
    }

    pub fn rem(&self, d: &Poly) -> Poly {
        self.divrem(d).1
    }

    /// Monic greatest common divisor (zero only if both inputs are zero).
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Extended gcd: returns `(g, s, t)` with `s*self + t*other = g`, `g` monic.
    pub fn xgcd(&self, other: &Poly) -> (Poly, Poly, Poly) {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Poly::one(), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            let s2 = &s0 - &(&q * &s1);
            let t2 = &t0 - &(&q * &t1);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
            t0 = t1;
            t1 = t2;
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let k = r0.lead().recip();
        (r0.scale(&k), s0.scale(&k), t0.scale(&k))
    }

    pub fn is_squarefree(&self) -> bool {
        !self.is_zero() && self.gcd(&self.derivative()).is_constant()
    }

    /// `self / gcd(self, self')`: same roots, all simple.
    pub fn squarefree_part(&self) -> Poly {
        let g = self.gcd(&self.derivative());
        self.divrem(&g).0.monic()
    }

    /// Sturm chain of `self`.
    pub fn sturm_chain(&self) -> Vec<Poly> {
        let mut chain = vec![self.clone(), self.derivative()];
        loop {
            let n = chain.len();
            if chain[n - 1].is_zero() {
                chain.pop();
                break;
            }
            let r = chain[n - 2].rem(&chain[n - 1]);
            if r.is_zero() {
                break;
            }
            chain.push(-r);
        }
        chain
    }

    /// Number of distinct real roots in the half-open interval `(lo, hi]`.
    pub fn count_roots(&self, lo: &Rational, hi: &Rational) -> usize {
        let chain = self.sturm_chain();
        let v = |x: &Rational| sign_changes(chain.iter().map(|p| p.eval(x)));
        v(lo).saturating_sub(v(hi))
    }

    /// Strict bound on the absolute value of every complex root.
    pub fn root_bound(&self) -> Rational {
        let l = self.lead().abs();
        let m = self
            .coeffs
            .iter()
            .take(self.coeffs.len().saturating_sub(1))
            .map(|c| c.abs() / &l)
            .max()
            .unwrap_or_else(Rational::zero);
        m + Rational::one()
    }

    /// Rational roots by the rational root theorem.
    pub fn rational_roots(&self) -> Vec<Rational> {
        if self.is_zero() {
            return Vec::new();
        }
        // clear denominators
        let den = self.coeffs.iter().fold(BigInt::one(), |acc, c| num_integer::lcm(acc, c.denom().clone()));
        let ints: Vec<BigInt> = self.coeffs.iter().map(|c| (c * Rational::from_integer(den.clone())).to_integer()).collect();
        let mut roots = Vec::new();
        if ints[0].is_zero() {
            roots.push(Rational::zero());
        }
        let k = ints.iter().position(|c| !c.is_zero()).unwrap();
        let a0 = ints[k].abs();
        let an = ints.last().unwrap().abs();
        let small = |n: &BigInt| n.bits() <= 40;
        if !small(&a0) || !small(&an) {
            return roots;
        }
        let divisors = |n: &BigInt| -> Vec<BigInt> {
            let n: u64 = n.try_into().unwrap();
            let mut out = Vec::new();
            let mut i = 1u64;
            while i * i <= n {
                if n % i == 0 {
                    out.push(BigInt::from(i));
                    if i * i != n {
                        out.push(BigInt::from(n / i));
                    }
                }
                i += 1;
            }
            out
        };
        for p in divisors(&a0) {
            for q in divisors(&an) {
                for s in [1, -1] {
                    let r = Rational::new(BigInt::from(s) * &p, q.clone());
                    if self.eval(&r).is_zero() && !roots.contains(&r) {
                        roots.push(r);
                    }
                }
            }
        }
        roots.sort();
        roots
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut r = Poly::one();
        for _ in 0..e {
            r = &r * self;
        }
        r
    }
}

fn sign_changes<I: Iterator<Item = Rational>>(vals: I) -> usize {
    let mut last = 0i8;
    let mut n = 0;
    for v in vals {
        let s = if v.is_positive() {
            1
        } else if v.is_negative() {
            -1
        } else {
            0
        };
        if s != 0 {
            if last != 0 && s != last {
                n += 1;
            }
            last = s;
        }
    }
    n
}

/// Disjoint closed rational intervals, one around each distinct real root,
/// in increasing order. Endpoints are never roots.
pub fn isolate_real_roots(p: &Poly) -> Vec<(Rational, Rational)> {
    assert!(!p.is_zero(), "isolate_real_roots of the zero polynomial");
    if p.is_constant() {
        return Vec::new();
    }
    let q = p.squarefree_part();
    let b = q.root_bound();
    let chain = q.sturm_chain();
    let v = |x: &Rational| sign_changes(chain.iter().map(|p| p.eval(x)));
    let mut out = Vec::new();
    let mut stack = vec![(-b.clone(), b, None::<usize>)];
    while let Some((lo, hi, known)) = stack.pop() {
        let n = known.unwrap_or_else(|| v(&lo) - v(&hi));
        match n {
            0 => {}
            1 => out.push((lo, hi)),
            _ => {
                let two = Rational::from_integer(BigInt::from(2));
                let mut m = (&lo + &hi) / &two;
                // keep split points off the roots so every piece is open at both ends
                while q.eval(&m).is_zero() {
                    m = (&lo + &m) / &two;
                }
                let nl = v(&lo) - v(&m);
                stack.push((m.clone(), hi, Some(n - nl)));
                stack.push((lo, m, Some(nl)));
            }
        }
    }
    out.sort();
    out
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            first = false;
            let cs = rat_to_string(&a);
            match (i, a.is_one()) {
                (0, _) => write!(f, "{}", cs)?,
                (1, true) => write!(f, "x")?,
                (1, false) => write!(f, "{}*x", cs)?,
                (_, true) => write!(f, "x^{}", i)?,
                (_, false) => write!(f, "{}*x^{}", cs, i)?,
            }
        }
        Ok(())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![Rational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::new(c)
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.into_iter().map(|c| -c).collect())
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -(self.clone())
    }
}

macro_rules! owned_binop {
    ($tr:ident, $f:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $f(self, o: Poly) -> Poly {
                (&self).$f(&o)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<String> = self.coeffs.iter().map(rat_to_string).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        let c = v
            .iter()
            .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Poly::new(c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    #[test]
    fn divrem_reconstructs() {
        let a = Poly::from_ints(&[-1, 5, -4, -1, 1]);
        let b = Poly::from_ints(&[1, -4, 0, 1]);
        let (q, r) = a.divrem(&b);
        assert_eq!(&(&q * &b) + &r, a);
        assert!(r.degree().unwrap_or(0) < 3);
    }

    #[test]
    fn quartic_has_linear_factor() {
        // x^4 - x^3 - 4x^2 + 5x - 1 = (x - 1)(x^3 - 4x + 1)
        let q = Poly::from_ints(&[-1, 5, -4, -1, 1]);
        assert_eq!(q.rational_roots(), vec![rat(1, 1)]);
        let (cub, r) = q.divrem(&Poly::from_ints(&[-1, 1]));
        assert!(r.is_zero());
        assert_eq!(cub, Poly::from_ints(&[1, -4, 0, 1]));
    }

    #[test]
    fn sturm_counts() {
        let p = Poly::from_ints(&[-1, 0, 1]);
        assert_eq!(p.count_roots(&rat(-2, 1), &rat(2, 1)), 2);
        assert_eq!(p.count_roots(&rat(0, 1), &rat(2, 1)), 1);
        // half-open: the root 1 is counted in (0,1] but not in (1,2]
        assert_eq!(p.count_roots(&rat(0, 1), &rat(1, 1)), 1);
        assert_eq!(p.count_roots(&rat(1, 1), &rat(2, 1)), 0);
    }

    #[test]
    fn isolation_of_x2_minus_1() {
        let iv = isolate_real_roots(&Poly::from_ints(&[-1, 0, 1]));
        assert_eq!(iv.len(), 2);
        assert!(iv[0].0 < rat(-1, 1) && rat(-1, 1) < iv[0].1);
        assert!(iv[1].0 < rat(1, 1) && rat(1, 1) < iv[1].1);
        assert!(iv[0].1 <= iv[1].0);
    }

    #[test]
    fn isolation_handles_repeated_and_rational_roots() {
        // (x-1)^2 (x+2) x
        let p = &(&Poly::from_ints(&[-1, 1]).pow(2) * &Poly::from_ints(&[2, 1])) * &Poly::x();
        let iv = isolate_real_roots(&p);
        assert_eq!(iv.len(), 3);
        for (r, (lo, hi)) in [rat(-2, 1), rat(0, 1), rat(1, 1)].iter().zip(&iv) {
            assert!(lo < r && r < hi);
        }
    }

    #[test]
    fn no_real_roots() {
        assert!(isolate_real_roots(&Poly::from_ints(&[1, 0, 1])).is_empty());
    }

    #[test]
    fn xgcd_bezout() {
        let a = Poly::from_ints(&[3, 0, 1]);
        let m = Poly::from_ints(&[1, -4, 0, 1]);
        let (g, s, t) = a.xgcd(&m);
        assert_eq!(g, Poly::one());
        assert_eq!(&(&s * &a) + &(&t * &m), g);
    }

    #[test]
    fn interval_eval_encloses() {
        let p = Poly::from_ints(&[1, -4, 0, 1]);
        let (lo, hi) = p.eval_interval(&rat(1, 5), &rat(3, 10));
        for x in [rat(1, 5), rat(1, 4), rat(3, 10)] {
            let v = p.eval(&x);
            assert!(lo <= v && v <= hi);
        }
    }

    #[test]
    fn display_and_json() {
        let p = Poly::new(vec![rat(-1, 2), rat(0, 1), rat(3, 1)]);
        assert_eq!(p.to_string(), "3*x^2 - 1/2");
        let j = serde_json::to_string(&p).unwrap();
        assert_eq!(j, r#"["-1/2","0","3"]"#);
        let back: Poly = serde_json::from_str(&j).unwrap();
        assert_eq!(back, p);
    }
}

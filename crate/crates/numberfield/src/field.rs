use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::poly::Poly;
use crate::rational::{parse_rational, rat_to_f64, rat_to_string, Rational};
use crate::FieldError;

/// Bisection budget for a single sign decision.
const REFINE_LIMIT: usize = 1_000_000;
/// Bits of precision the stored root interval is refined to on construction.
const INITIAL_BITS: usize = 160;

/// `Q(lambda)` for the unique root `lambda` of `modulus` inside `root_interval`.
#[derive(Debug)]
pub struct NumberField {
    modulus: Poly,
    given: Poly,
    lo: Rational,
    hi: Rational,
    lo_sign: i8,
    approx: f64,
}

fn sgn(r: &Rational) -> i8 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}

fn half(a: &Rational, b: &Rational) -> Rational {
    (a + b) / Rational::from_integer(BigInt::from(2))
}

impl NumberField {
    /// Builds the field of the root of `modulus` isolated by `[lo, hi]`.
    ///
    /// Rational linear factors of the modulus whose root lies outside the
    /// interval are divided out, so a reducible input such as
    /// `(x - 1)(x^3 - 4x + 1)` yields the cubic. The original polynomial is
    /// kept and reported by [`NumberField::given_modulus`].
    pub fn new(modulus: &Poly, lo: Rational, hi: Rational) -> Result<Arc<NumberField>, FieldError> {
        if modulus.is_zero() || modulus.is_constant() || !modulus.is_squarefree() {
            return Err(FieldError::NotSquarefree);
        }
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        let at_lo = usize::from(modulus.eval(&lo).is_zero());
        let n = modulus.count_roots(&lo, &hi) + at_lo;
        if n != 1 {
            return Err(FieldError::NotIsolating(n));
        }
        let mut m = modulus.monic();
        for r in modulus.rational_roots() {
            let lin = Poly::new(vec![-r.clone(), Rational::one()]);
            if r >= lo && r <= hi {
                m = lin;
                break;
            }
            m = m.divrem(&lin).0;
        }
        let (mut lo, mut hi) = (lo, hi);
        if m.eval(&lo).is_zero() {
            hi = lo.clone();
        } else if m.eval(&hi).is_zero() {
            lo = hi.clone();
        }
        let mut lo_sign = sgn(&m.eval(&lo));
        for _ in 0..INITIAL_BITS {
            if lo == hi {
                break;
            }
            let mid = half(&lo, &hi);
            let s = sgn(&m.eval(&mid));
            if s == 0 {
                lo = mid.clone();
                hi = mid;
                lo_sign = 0;
            } else if s == lo_sign {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let approx = rat_to_f64(&half(&lo, &hi));
        Ok(Arc::new(NumberField { modulus: m, given: modulus.clone(), lo, hi, lo_sign, approx }))
    }

    /// The polynomial actually used for reduction (monic, root inside the interval).
    pub fn modulus(&self) -> &Poly {
        &self.modulus
    }

    /// The polynomial passed to [`NumberField::new`].
    pub fn given_modulus(&self) -> &Poly {
        &self.given
    }

    pub fn degree(&self) -> usize {
        self.modulus.degree().unwrap_or(0)
    }

    pub fn root_interval(&self) -> (&Rational, &Rational) {
        (&self.lo, &self.hi)
    }

    /// Double-precision value of the generator.
    pub fn approx(&self) -> f64 {
        self.approx
    }

    pub fn same(&self, other: &NumberField) -> bool {
        std::ptr::eq(self, other)
            || (self.modulus == other.modulus && self.lo <= other.hi && other.lo <= self.hi)
    }

    fn refine(&self, lo: &mut Rational, hi: &mut Rational) {
        if lo == hi {
            return;
        }
        let mid = half(lo, hi);
        let s = sgn(&self.modulus.eval(&mid));
        if s == 0 {
            *lo = mid.clone();
            *hi = mid;
        } else if s == self.lo_sign {
            *lo = mid;
        } else {
            *hi = mid;
        }
    }
}

/// Element of `Q(lambda)`: a polynomial residue of degree below the modulus.
#[derive(Clone)]
pub struct FieldElement {
    field: Arc<NumberField>,
    poly: Poly,
}

pub trait FieldHandle {
    fn element(&self, p: Poly) -> FieldElement;
    fn gen(&self) -> FieldElement;
    fn from_rational(&self, r: Rational) -> FieldElement;
    fn from_int(&self, n: i64) -> FieldElement;
    fn zero(&self) -> FieldElement;
    fn one(&self) -> FieldElement;
}

impl FieldHandle for Arc<NumberField> {
    fn element(&self, p: Poly) -> FieldElement {
        FieldElement { field: self.clone(), poly: p.rem(&self.modulus) }
    }
    fn gen(&self) -> FieldElement {
        self.element(Poly::x())
    }
    fn from_rational(&self, r: Rational) -> FieldElement {
        self.element(Poly::constant(r))
    }
    fn from_int(&self, n: i64) -> FieldElement {
        self.from_rational(Rational::from_integer(BigInt::from(n)))
    }
    fn zero(&self) -> FieldElement {
        self.element(Poly::zero())
    }
    fn one(&self) -> FieldElement {
        self.from_int(1)
    }
}

impl FieldElement {
    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    /// The value as a rational, if the residue is constant.
    pub fn to_rational(&self) -> Option<Rational> {
        if self.poly.is_constant() {
            Some(self.poly.coeff(0))
        } else {
            None
        }
    }

    pub fn is_integer(&self) -> bool {
        self.to_rational().is_some_and(|r| r.is_integer())
    }

    fn check(&self, o: &FieldElement) -> Result<(), FieldError> {
        if self.field.same(&o.field) {
            Ok(())
        } else {
            Err(FieldError::FieldMismatch)
        }
    }

    pub fn checked_add(&self, o: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check(o)?;
        Ok(FieldElement { field: self.field.clone(), poly: &self.poly + &o.poly })
    }

    pub fn checked_sub(&self, o: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check(o)?;
        Ok(FieldElement { field: self.field.clone(), poly: &self.poly - &o.poly })
    }

    pub fn checked_mul(&self, o: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check(o)?;
        Ok(self.field.element(&self.poly * &o.poly))
    }

    pub fn checked_div(&self, o: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check(o)?;
        let inv = o.inverse()?;
        Ok(self.field.element(&self.poly * &inv.poly))
    }

    /// Multiplicative inverse via the extended gcd with the modulus.
    pub fn inverse(&self) -> Result<FieldElement, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let (g, s, _) = self.poly.xgcd(&self.field.modulus);
        if !g.is_constant() {
            // only reachable for a reducible modulus
            return Err(FieldError::DivisionByZero);
        }
        Ok(self.field.element(s))
    }

    pub fn scale(&self, k: &Rational) -> FieldElement {
        FieldElement { field: self.field.clone(), poly: self.poly.scale(k) }
    }

    pub fn pow(&self, e: u32) -> FieldElement {
        let mut r = self.field.one();
        for _ in 0..e {
            r = &r * self;
        }
        r
    }

    /// Exact sign, with the refinement budget surfaced as an error.
    pub fn try_sign(&self) -> Result<i8, FieldError> {
        if self.poly.is_constant() {
            return Ok(sgn(&self.poly.coeff(0)));
        }
        if let Some(s) = self.f64_sign() {
            return Ok(s);
        }
        let f = &self.field;
        let (mut lo, mut hi) = (f.lo.clone(), f.hi.clone());
        for it in 0..REFINE_LIMIT {
            let (a, b) = self.poly.eval_interval(&lo, &hi);
            if a.is_positive() {
                return Ok(1);
            }
            if b.is_negative() {
                return Ok(-1);
            }
            if lo == hi {
                return Ok(0);
            }
            if it == 0 {
                // a nonzero residue can only vanish at lambda through a common factor
                let g = self.poly.gcd(&f.modulus);
                if !g.is_constant() {
                    let at = usize::from(g.eval(&lo).is_zero());
                    if g.count_roots(&lo, &hi) + at > 0 {
                        return Ok(0);
                    }
                }
            }
            f.refine(&mut lo, &mut hi);
        }
        Err(FieldError::RefinementExhausted)
    }

    /// Sign from double Horner evaluation, when it clears a rigorous error bound.
    fn f64_sign(&self) -> Option<i8> {
        let x = self.field.approx;
        let ax = x.abs();
        // |x - lambda| is a few ulps; take a generous bound
        let dx = (ax + 1.0) * f64::EPSILON * 8.0;
        let n = self.poly.coeffs().len() as f64;
        let (mut v, mut mag, mut wide, mut der) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for c in self.poly.coeffs().iter().rev() {
            let cf = crate::rational::rat_to_f64(c);
            if !cf.is_finite() {
                return None;
            }
            // bound on |p'| near lambda
            der = der * (ax + 1.0) + wide;
            wide = wide * (ax + 1.0) + cf.abs();
            v = v * x + cf;
            mag = mag * ax + cf.abs();
        }
        let err = mag * (4.0 * n + 4.0) * f64::EPSILON + der * dx;
        if !err.is_finite() || v.abs() <= 2.0 * err {
            return None;
        }
        Some(if v > 0.0 { 1 } else { -1 })
    }

    /// Sign in {-1, 0, 1}.
    pub fn sign(&self) -> i8 {
        self.try_sign().expect("audit: sign refinement exhausted for an element of the field")
    }

    pub fn is_positive(&self) -> bool {
        self.sign() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.sign() < 0
    }

    pub fn abs(&self) -> FieldElement {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// A rational within `eps` of the element, certified by interval evaluation.
    pub fn approximate(&self, eps: &Rational) -> Rational {
        assert!(eps.is_positive(), "approximate needs eps > 0");
        if self.poly.is_constant() {
            return self.poly.coeff(0);
        }
        let f = &self.field;
        let (mut lo, mut hi) = (f.lo.clone(), f.hi.clone());
        loop {
            let (a, b) = self.poly.eval_interval(&lo, &hi);
            if &b - &a < *eps {
                return half(&a, &b);
            }
            f.refine(&mut lo, &mut hi);
        }
    }

    /// Certified enclosure of width below `eps`.
    pub fn enclose(&self, eps: &Rational) -> (Rational, Rational) {
        let f = &self.field;
        let (mut lo, mut hi) = (f.lo.clone(), f.hi.clone());
        loop {
            let (a, b) = self.poly.eval_interval(&lo, &hi);
            if &b - &a < *eps || lo == hi {
                return (a, b);
            }
            f.refine(&mut lo, &mut hi);
        }
    }

    /// Accurate double value (certified to about 1e-30 before rounding).
    pub fn to_f64(&self) -> f64 {
        rat_to_f64(&self.approximate(&Rational::new(BigInt::one(), num_traits::pow(BigInt::from(10), 30))))
    }

    /// Fast double value by Horner evaluation at the double generator.
    pub fn approx_f64(&self) -> f64 {
        self.poly.eval_f64(self.field.approx)
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, o: &Self) -> bool {
        self.field.same(&o.field) && self.poly == o.poly
    }
}

impl Eq for FieldElement {}

impl Hash for FieldElement {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.poly.hash(h)
    }
}

impl PartialOrd for FieldElement {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for FieldElement {
    fn cmp(&self, o: &Self) -> Ordering {
        if self.poly == o.poly {
            return Ordering::Equal;
        }
        match (self - o).sign() {
            1 => Ordering::Greater,
            -1 => Ordering::Less,
            _ => Ordering::Equal,
        }
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.poly.to_string().replace('x', "l");
        write!(f, "{} (~{:.6})", p, self.approx_f64())
    }
}

macro_rules! field_binop {
    ($tr:ident, $f:ident, $checked:ident) => {
        impl $tr<&FieldElement> for &FieldElement {
            type Output = FieldElement;
            fn $f(self, o: &FieldElement) -> FieldElement {
                self.$checked(o).unwrap_or_else(|e| panic!("{}", e))
            }
        }
        impl $tr<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $f(self, o: FieldElement) -> FieldElement {
                (&self).$f(&o)
            }
        }
        impl $tr<&FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $f(self, o: &FieldElement) -> FieldElement {
                (&self).$f(o)
            }
        }
        impl $tr<FieldElement> for &FieldElement {
            type Output = FieldElement;
            fn $f(self, o: FieldElement) -> FieldElement {
                self.$f(&o)
            }
        }
        impl $tr<i64> for &FieldElement {
            type Output = FieldElement;
            fn $f(self, o: i64) -> FieldElement {
                self.$f(&self.field.from_int(o))
            }
        }
        impl $tr<i64> for FieldElement {
            type Output = FieldElement;
            fn $f(self, o: i64) -> FieldElement {
                (&self).$f(o)
            }
        }
    };
}
field_binop!(Add, add, checked_add);
field_binop!(Sub, sub, checked_sub);
field_binop!(Mul, mul, checked_mul);
field_binop!(Div, div, checked_div);

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement { field: self.field.clone(), poly: -&self.poly }
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

#[derive(Serialize, Deserialize)]
struct FieldElementRepr {
    modulus: Poly,
    root_interval: [String; 2],
    poly: Poly,
}

impl Serialize for FieldElement {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        FieldElementRepr {
            modulus: self.field.modulus.clone(),
            root_interval: [rat_to_string(&self.field.lo), rat_to_string(&self.field.hi)],
            poly: self.poly.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FieldElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = FieldElementRepr::deserialize(d)?;
        let lo = parse_rational(&r.root_interval[0]).map_err(serde::de::Error::custom)?;
        let hi = parse_rational(&r.root_interval[1]).map_err(serde::de::Error::custom)?;
        let f = NumberField::new(&r.modulus, lo, hi).map_err(serde::de::Error::custom)?;
        Ok(f.element(r.poly))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    fn lambda1() -> Arc<NumberField> {
        NumberField::new(&Poly::from_ints(&[-1, 5, -4, -1, 1]), rat(1, 5), rat(3, 10)).unwrap()
    }

    #[test]
    fn quartic_reduces_to_cubic() {
        let f = lambda1();
        assert_eq!(f.modulus(), &Poly::from_ints(&[1, -4, 0, 1]));
        assert_eq!(f.degree(), 3);
        assert!((f.approx() - 0.2541016883650524).abs() < 1e-15);
    }

    #[test]
    fn defining_relation_vanishes() {
        let f = lambda1();
        let l = f.gen();
        let q = l.pow(4) - l.pow(3) - &l.pow(2) * 4 + &l * 5 - 1;
        assert!(q.is_zero());
        assert_eq!(q.sign(), 0);
    }

    #[test]
    fn lambda_fourth_reduces() {
        let f = lambda1();
        let l = f.gen();
        let l4 = &l * &l.pow(3);
        assert_eq!(l4, l.pow(3) + &l.pow(2) * 4 - &l * 5 + 1);
    }

    #[test]
    fn sqrt2_field() {
        let f = NumberField::new(&Poly::from_ints(&[-2, 0, 1]), rat(1, 1), rat(2, 1)).unwrap();
        let l = f.gen();
        assert_eq!((&l * &l - 2).sign(), 0);
        assert_eq!((&l - &f.from_rational(rat(141, 100))).sign(), 1);
        assert_eq!((&l - &f.from_rational(rat(142, 100))).sign(), -1);
    }

    #[test]
    fn a_greater_than_b() {
        let f = lambda1();
        let l = f.gen();
        let a = &l * 2 - &l * &l;
        assert_eq!((&a - &l).sign(), 1);
    }

    #[test]
    fn errors() {
        let sq = Poly::from_ints(&[1, -2, 1]);
        assert_eq!(NumberField::new(&sq, rat(0, 1), rat(2, 1)).unwrap_err(), FieldError::NotSquarefree);
        let p = Poly::from_ints(&[-1, 0, 1]);
        assert_eq!(NumberField::new(&p, rat(-2, 1), rat(2, 1)).unwrap_err(), FieldError::NotIsolating(2));
        assert_eq!(NumberField::new(&p, rat(2, 1), rat(3, 1)).unwrap_err(), FieldError::NotIsolating(0));
        let f = lambda1();
        assert_eq!(f.one().checked_div(&f.zero()).unwrap_err(), FieldError::DivisionByZero);
        let g = NumberField::new(&p, rat(0, 1), rat(2, 1)).unwrap();
        assert_eq!(f.one().checked_add(&g.one()).unwrap_err(), FieldError::FieldMismatch);
    }

    #[test]
    fn rational_generator() {
        // the root of x^2 - 1 in [1/2, 2] is rational, the field collapses to Q
        let f = NumberField::new(&Poly::from_ints(&[-1, 0, 1]), rat(1, 2), rat(2, 1)).unwrap();
        assert_eq!(f.degree(), 1);
        assert_eq!(f.gen().to_rational(), Some(rat(1, 1)));
    }

    #[test]
    fn approximate_is_certified() {
        let f = lambda1();
        let eps = rat(1, 1_000_000);
        let r = f.gen().approximate(&eps);
        assert!((rat_to_f64(&r) - 0.2541016883650524).abs() < 1e-6);
        assert_eq!(f.zero().approximate(&eps), rat(0, 1));
    }

    #[test]
    fn json_round_trip() {
        let f = lambda1();
        let x = &f.gen() * &f.gen() - 3;
        let s = serde_json::to_string(&x).unwrap();
        let back: FieldElement = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
    }
}

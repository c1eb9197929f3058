use std::sync::Arc;

use numberfield::{rat, FieldElement, FieldHandle, NumberField, Poly, RatMatrix, Rational};
use proptest::prelude::*;

fn lambda1() -> Arc<NumberField> {
    NumberField::new(&Poly::from_ints(&[-1, 5, -4, -1, 1]), rat(1, 5), rat(3, 10)).unwrap()
}

fn lambda2() -> Arc<NumberField> {
    NumberField::new(&Poly::from_ints(&[-1, 12, 8, 1]), rat(0, 1), rat(1, 2)).unwrap()
}

fn elem(f: &Arc<NumberField>, c: &[(i64, i64)]) -> FieldElement {
    f.element(Poly::new(c.iter().map(|&(n, d)| rat(n, d)).collect()))
}

fn coeffs() -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((-50i64..=50, 1i64..=12), 0..=4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn ring_axioms(x in coeffs(), y in coeffs(), z in coeffs()) {
        let f = lambda1();
        let (x, y, z) = (elem(&f, &x), elem(&f, &y), elem(&f, &z));
        prop_assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
        prop_assert!((&x + &(-&x)).is_zero());
    }

    #[test]
    fn division_inverts_multiplication(x in coeffs(), y in coeffs()) {
        let f = lambda2();
        let (x, y) = (elem(&f, &x), elem(&f, &y));
        prop_assume!(!y.is_zero());
        prop_assert_eq!(&(&x * &y) / &y, x);
    }

    #[test]
    fn order_is_compatible(x in coeffs(), y in coeffs()) {
        let f = lambda1();
        let (x, y) = (elem(&f, &x), elem(&f, &y));
        if x.sign() > 0 && y.sign() > 0 {
            prop_assert!((&x * &y).sign() > 0);
            prop_assert!((&x + &y).sign() > 0);
        }
        // the exact sign agrees with a double evaluation whenever the latter is clear
        let v = x.to_f64();
        if v.abs() > 1e-9 {
            prop_assert_eq!(x.sign(), if v > 0.0 { 1 } else { -1 });
        }
    }

    #[test]
    fn approximations_nest(x in coeffs(), k in 1u32..12) {
        let f = lambda1();
        let x = elem(&f, &x);
        let eps = Rational::new(1.into(), num_traits::pow(num_bigint::BigInt::from(10), k as usize));
        let a = x.approximate(&eps);
        let b = x.approximate(&(&eps / rat(10, 1)));
        let d = if a > b { &a - &b } else { &b - &a };
        prop_assert!(d < &eps + &eps / rat(10, 1));
    }

    #[test]
    fn cayley_hamilton(n in 1usize..=5, seed in prop::collection::vec(-6i64..=6, 25)) {
        let rows: Vec<Vec<i64>> = (0..n).map(|i| seed[i * n..i * n + n].to_vec()).collect();
        let m = RatMatrix::from_i64(&rows);
        let p = m.char_poly().unwrap();
        prop_assert_eq!(p.degree(), Some(n));
        prop_assert!(m.eval_poly(&p).unwrap().is_zero());
    }
}

#[test]
fn isolating_the_defining_polynomials() {
    let q = Poly::from_ints(&[-1, 5, -4, -1, 1]);
    let roots = numberfield::isolate_real_roots(&q);
    let around = |lo: &Rational, hi: &Rational, x: f64| numberfield::rat_to_f64(lo) <= x && x <= numberfield::rat_to_f64(hi);
    assert!(roots.iter().any(|(lo, hi)| around(lo, hi, 0.2541)));
    let c = Poly::from_ints(&[-1, 12, 8, 1]);
    let pos: Vec<_> = numberfield::isolate_real_roots(&c).into_iter().filter(|(_, hi)| *hi > rat(0, 1)).collect();
    assert_eq!(pos.len(), 1);
    let root = lambda2().gen().to_f64();
    assert!(around(&pos[0].0, &pos[0].1, root));
}

#[test]
fn eigenvector_of_n1() {
    let f = lambda1();
    let n1 = RatMatrix::from_i64(&[[3, 1, -1, -4], [-1, 2, 0, 0], [-2, -2, 1, 4], [3, 2, -1, -5]]);
    let ev = n1.eigen_kernel(&f.gen(), Some(3)).unwrap();
    assert_eq!(ev.kernel_dim, 1);
    let v = &ev.vector;
    let nv = n1.apply(v).unwrap();
    for (a, b) in nv.iter().zip(v) {
        assert!((a - &(b * &f.gen())).is_zero());
        assert_eq!(b.sign(), 1);
    }
    for (x, want) in v.iter().zip([0.444, 0.254, 0.302]) {
        assert!((x.to_f64() - want).abs() < 5e-4, "{x} vs {want}");
    }
    // the stated 0.292 is truncated; an independent 80-digit evaluation gives 0.2925040
    assert!((v[3].to_f64() - 0.2925040).abs() < 1e-6);
}

#[test]
fn eigenvector_of_n2() {
    let f = lambda2();
    let n2 = RatMatrix::from_i64(&[
        [-2, 2, 1, 0, 1],
        [2, -5, -2, 3, -2],
        [1, 0, 0, -1, 0],
        [1, -2, -1, 1, 0],
        [0, -2, -2, 3, -2],
    ]);
    let ev = n2.eigen_kernel(&f.gen(), Some(3)).unwrap();
    let nv = n2.apply(&ev.vector).unwrap();
    for (a, b) in nv.iter().zip(&ev.vector) {
        assert!((a - &(b * &f.gen())).is_zero());
    }
    for (x, want) in ev.vector.iter().zip([0.4495, 0.2943, 0.2562, 0.4292, 0.0898]) {
        assert!((x.to_f64() - want).abs() < 5e-4, "{x} vs {want}");
    }
}

#[test]
fn char_poly_of_n2_factors() {
    let n2 = RatMatrix::from_i64(&[
        [-2, 2, 1, 0, 1],
        [2, -5, -2, 3, -2],
        [1, 0, 0, -1, 0],
        [1, -2, -1, 1, 0],
        [0, -2, -2, 3, -2],
    ]);
    let p = n2.char_poly().unwrap();
    let d = &(&Poly::from_ints(&[-1, 1]) * &Poly::from_ints(&[1, 1])) * &Poly::from_ints(&[-1, 12, 8, 1]);
    let (_, r) = p.divrem(&d);
    assert!(r.is_zero());
}

#[test]
fn perron_roots_of_reference_length_matrices() {
    // the matrices exactly as stated; their Perron roots are the stated mu values
    let l1 = RatMatrix::from_i64(&[[0, 2, 1, 2], [0, 1, 0, 0], [2, 0, 4, 1], [1, 2, 4, 2]]);
    let l2 = RatMatrix::from_i64(&[[5, 3, 0], [4, 3, 1], [4, 2, 1]]);
    let mu1 = numberfield::rat_to_f64(&l1.perron_root(&rat(1, 10_000)).unwrap());
    let mu2 = numberfield::rat_to_f64(&l2.perron_root(&rat(1, 10_000)).unwrap());
    assert!((mu1 - 6.1329).abs() < 1e-3, "{mu1}");
    assert!((mu2 - 7.95).abs() < 1e-2, "{mu2}");
}

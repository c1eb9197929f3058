//! The two thin systems: their number fields, transition matrices and
//! eigenvector parameters.

use std::sync::{Arc, OnceLock};

use numberfield::{rat, FieldElement, FieldHandle, NumberField, Poly, RatMatrix};

use crate::{Iis, IisError, Interval, IntervalPair};

/// `Q(lambda_1)`, from `x^4 - x^3 - 4x^2 + 5x - 1` and the hint `[1/5, 3/10]`.
/// The quartic has the factor `x - 1`; the field works modulo the cubic.
pub fn field_lambda1() -> Arc<NumberField> {
    static F: OnceLock<Arc<NumberField>> = OnceLock::new();
    F.get_or_init(|| NumberField::new(&Poly::from_ints(&[-1, 5, -4, -1, 1]), rat(1, 5), rat(3, 10)).expect("lambda1 field"))
        .clone()
}

/// `Q(lambda_2)`, from `x^3 + 8x^2 + 12x - 1` and the hint `[0, 1/2]`.
pub fn field_lambda2() -> Arc<NumberField> {
    static F: OnceLock<Arc<NumberField>> = OnceLock::new();
    F.get_or_init(|| NumberField::new(&Poly::from_ints(&[-1, 12, 8, 1]), rat(0, 1), rat(1, 2)).expect("lambda2 field"))
        .clone()
}

pub fn n1() -> RatMatrix {
    RatMatrix::from_i64(&[[3, 1, -1, -4], [-1, 2, 0, 0], [-2, -2, 1, 4], [3, 2, -1, -5]])
}

pub fn n2() -> RatMatrix {
    RatMatrix::from_i64(&[
        [-2, 2, 1, 0, 1],
        [2, -5, -2, 3, -2],
        [1, 0, 0, -1, 0],
        [1, -2, -1, 1, 0],
        [0, -2, -2, 3, -2],
    ])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SystemId {
    S1,
    S2,
}

impl SystemId {
    pub fn parse(s: &str) -> Option<SystemId> {
        match s.to_ascii_lowercase().as_str() {
            "s1" | "1" => Some(SystemId::S1),
            "s2" | "2" => Some(SystemId::S2),
            _ => None,
        }
    }

    pub fn field(self) -> Arc<NumberField> {
        match self {
            SystemId::S1 => field_lambda1(),
            SystemId::S2 => field_lambda2(),
        }
    }

    pub fn matrix(self) -> RatMatrix {
        match self {
            SystemId::S1 => n1(),
            SystemId::S2 => n2(),
        }
    }

    /// Eigenvector of the transition matrix for the field generator,
    /// normalized so the first three coordinates sum to one:
    /// `(a, b, c, u)` for S1 and `(a, b, c, d, e)` for S2.
    pub fn params(self) -> Vec<FieldElement> {
        let f = self.field();
        self.matrix().eigen_kernel(&f.gen(), Some(3)).expect("generator is an eigenvalue").vector
    }
}

/// The exact system for S1 or S2.
///
/// Both share the first two pairs `[0,a] <-> [b+c,a+b+c]`, `[0,b] <-> [a+c,a+b+c]`;
/// the third is `[u,u+c] <-> [a+b-u,a+b+c-u]` for S1 and `[d,d+c] <-> [e,e+c]` for S2.
pub fn build_system(id: SystemId) -> Iis {
    let p = id.params();
    let (a, b, c) = (&p[0], &p[1], &p[2]);
    let f = id.field();
    let zero = f.zero();
    let total = &(a + b) + c;
    let iv = |lo: FieldElement, hi: FieldElement| Interval::new(lo, hi);
    let mut pairs = vec![
        IntervalPair::new(iv(zero.clone(), a.clone()), iv(b + c, total.clone())),
        IntervalPair::new(iv(zero.clone(), b.clone()), iv(a + c, total.clone())),
    ];
    match id {
        SystemId::S1 => {
            let u = &p[3];
            pairs.push(IntervalPair::new(iv(u.clone(), u + c), iv(&(a + b) - u, &total - u)));
        }
        SystemId::S2 => {
            let (d, e) = (&p[3], &p[4]);
            pairs.push(IntervalPair::new(iv(d.clone(), d + c), iv(e.clone(), e + c)));
        }
    }
    Iis::new(iv(zero, total), pairs).expect("reference systems are valid")
}

/// Builds `([0, a+b+c]; [0,a]<->[b+c,a+b+c], [0,b]<->[a+c,a+b+c], [p,p+c]<->[q,q+c])`
/// from explicit parameters, checking all invariants.
pub fn three_pair_system(
    a: &FieldElement,
    b: &FieldElement,
    c: &FieldElement,
    p: &FieldElement,
    q: &FieldElement,
) -> Result<Iis, IisError> {
    let zero = a.field().zero();
    let total = &(a + b) + c;
    Iis::new(
        Interval::new(zero.clone(), total.clone()),
        vec![
            IntervalPair::new(Interval::new(zero.clone(), a.clone()), Interval::new(b + c, total.clone())),
            IntervalPair::new(Interval::new(zero, b.clone()), Interval::new(a + c, total)),
            IntervalPair::new(Interval::new(p.clone(), p + c), Interval::new(q.clone(), q + c)),
        ],
    )
}

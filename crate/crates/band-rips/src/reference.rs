//! Named charts and reference data for the complexes of the two example
//! systems S1 and S2.

use std::sync::Arc;

use iis_core::systems::{field_lambda1, field_lambda2, SystemId};
use numberfield::{rat, FieldElement, FieldHandle, NumberField, Poly, RatMatrix};

use crate::cycle::{BandSelector, Chart, Functional};

/// Element `sum c_i lambda^i` from `(num, den)` coefficients, lowest degree first.
pub fn poly_in(f: &Arc<NumberField>, coeffs: &[(i64, i64)]) -> FieldElement {
    f.element(Poly::new(coeffs.iter().map(|&(n, d)| rat(n, d)).collect()))
}

fn width(w: &FieldElement) -> BandSelector {
    BandSelector::Width(w.clone())
}

fn chart(labels: &[&str], functionals: Vec<Functional>, length_labels: &[&str], length_bands: Vec<BandSelector>) -> Chart {
    Chart {
        labels: labels.iter().map(|s| s.to_string()).collect(),
        functionals,
        length_labels: length_labels.iter().map(|s| s.to_string()).collect(),
        length_bands,
    }
}

/// `(r1, r2, h, g, n)` on the two-arc complex Y of S1.
pub fn s1_y_values() -> Vec<FieldElement> {
    let f = field_lambda1();
    vec![
        poly_in(&f, &[(0, 1), (0, 1), (0, 1), (1, 1)]),
        poly_in(&f, &[(1, 1), (-5, 1), (5, 1), (-2, 1)]),
        poly_in(&f, &[(-1, 4), (3, 2), (-3, 2), (1, 4)]),
        poly_in(&f, &[(0, 1), (0, 1), (1, 1)]),
        poly_in(&f, &[(1, 2), (-2, 1), (1, 1), (-1, 2)]),
    ]
}

/// The same five parameters after one cycle, as stated: each is the old one times `lambda^2`.
pub fn s1_y_values_after_cycle() -> Vec<FieldElement> {
    let f = field_lambda1();
    vec![
        poly_in(&f, &[(1, 1), (-4, 1), (-1, 1), (5, 1)]),
        poly_in(&f, &[(3, 1), (-17, 1), (23, 1), (-10, 1)]),
        poly_in(&f, &[(-5, 4), (13, 2), (-13, 2), (5, 4)]),
        poly_in(&f, &[(1, 1), (-5, 1), (4, 1), (1, 1)]),
        poly_in(&f, &[(1, 2), (-3, 1), (5, 1), (-7, 2)]),
    ]
}

/// `(a, b, c, u, a+b-u)` on the initial complex of S1: three widths and the
/// offsets of the two bases of the `c` band.
pub fn s1_initial_chart() -> Chart {
    let p = SystemId::S1.params();
    let c = width(&p[2]);
    chart(
        &["a", "b", "c", "u", "a+b-u"],
        vec![
            Functional::Width(width(&p[0])),
            Functional::Width(width(&p[1])),
            Functional::Width(c.clone()),
            Functional::Offset(c.clone(), 0),
            Functional::Offset(c, 1),
        ],
        &["la", "lb", "lc"],
        vec![width(&p[0]), width(&p[1]), width(&p[2])],
    )
}

/// `(a', b', c', u', .)` on the three-band complex reached by S1: widths by
/// decreasing size and the offsets of the narrowest band's bases.
pub fn s1_three_band_chart() -> Chart {
    let c = BandSelector::Rank(2);
    chart(
        &["a'", "b'", "c'", "u'", "v'"],
        vec![
            Functional::Width(BandSelector::Rank(0)),
            Functional::Width(BandSelector::Rank(1)),
            Functional::Width(c.clone()),
            Functional::Offset(c.clone(), 0),
            Functional::Offset(c, 1),
        ],
        &["la'", "lb'", "lc'"],
        vec![BandSelector::Rank(0), BandSelector::Rank(1), BandSelector::Rank(2)],
    )
}

/// `(r1, r2, h, g, n)` on Y; lengths in the order `(r1, r2, g, n)`.
pub fn s1_y_chart() -> Chart {
    let v = s1_y_values();
    let (r1, r2, g, n) = (width(&v[0]), width(&v[1]), width(&v[3]), width(&v[4]));
    chart(
        &["r1", "r2", "h", "g", "n"],
        vec![
            Functional::Width(r1.clone()),
            Functional::Width(r2.clone()),
            Functional::Gap(r1.clone(), r2.clone()),
            Functional::Width(g.clone()),
            Functional::Width(n.clone()),
        ],
        &["l1", "l2", "l3", "l4"],
        vec![r1, r2, g, n],
    )
}

/// `(a, b, c, d, e)` of S2: widths and the offsets of the `c` bases, larger first.
pub fn s2_initial_chart() -> Chart {
    let p = SystemId::S2.params();
    let c = width(&p[2]);
    chart(
        &["a", "b", "c", "d", "e"],
        vec![
            Functional::Width(width(&p[0])),
            Functional::Width(width(&p[1])),
            Functional::Width(c.clone()),
            Functional::Offset(c.clone(), 1),
            Functional::Offset(c, 0),
        ],
        &["la", "lb", "lc"],
        vec![width(&p[0]), width(&p[1]), width(&p[2])],
    )
}

/// `(a', b', c', d', e')` of the one-arc complex Z' of S2.
pub fn s2_z_values() -> Vec<FieldElement> {
    let f = field_lambda2();
    vec![
        poly_in(&f, &[(10, 3), (-124, 3), (-23, 3)]),
        poly_in(&f, &[(5, 3), (-62, 3), (-10, 3)]),
        poly_in(&f, &[(-17, 3), (212, 3), (37, 3)]),
        poly_in(&f, &[(19, 3), (-236, 3), (-14, 1)]),
        poly_in(&f, &[(-10, 3), (125, 3), (7, 1)]),
    ]
}

/// The stated values after one cycle; the first constant is `-23/3` (stated as `+23/3`).
pub fn s2_z_values_after_cycle() -> Vec<FieldElement> {
    let f = field_lambda2();
    vec![
        poly_in(&f, &[(-23, 3), (286, 3), (20, 1)]),
        poly_in(&f, &[(-10, 3), (125, 3), (6, 1)]),
        poly_in(&f, &[(37, 3), (-461, 3), (-28, 1)]),
        poly_in(&f, &[(-14, 1), (523, 3), (100, 3)]),
        poly_in(&f, &[(7, 1), (-262, 3), (-43, 3)]),
    ]
}

pub fn s2_z_chart() -> Chart {
    let v = s2_z_values();
    let c = width(&v[2]);
    chart(
        &["a'", "b'", "c'", "d'", "e'"],
        vec![
            Functional::Width(width(&v[0])),
            Functional::Width(width(&v[1])),
            Functional::Width(c.clone()),
            Functional::Offset(c.clone(), 1),
            Functional::Offset(c, 0),
        ],
        &["l1", "l2", "l3"],
        vec![width(&v[0]), width(&v[1]), width(&v[2])],
    )
}

/// From `(a,b,c,u)` to the five-parameter chart of the initial S1 complex (`a+b-u` last).
pub fn s1_symmetric_embedding() -> RatMatrix {
    RatMatrix::from_i64(&[[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1], [1, 1, 0, -1]])
}

pub fn s1_prefix_4x4() -> RatMatrix {
    RatMatrix::from_i64(&[[-4, 4, 1, 2], [-1, 2, 0, 0], [2, 0, -1, -2], [-1, 3, 0, -1]])
}

pub fn s1_prefix_5x4() -> RatMatrix {
    RatMatrix::from_i64(&[[1, -1, -1, 0], [-1, 0, 2, 2], [0, 1, 0, -1], [0, 1, 0, 0], [0, 0, 1, 0]])
}

pub fn r1() -> RatMatrix {
    RatMatrix::from_i64(&[
        [8, 2, 4, -5, 0],
        [-2, 5, 0, 2, -4],
        [-2, -2, -1, 1, 1],
        [4, 2, 2, -2, -1],
        [-3, 0, -2, 2, 0],
    ])
}

pub fn l1() -> RatMatrix {
    RatMatrix::from_i64(&[[0, 2, 1, 2], [0, 1, 0, 0], [2, 0, 4, 1], [1, 2, 4, 2]])
}

pub fn s2_prefix_5x5() -> RatMatrix {
    RatMatrix::from_i64(&[
        [5, -9, -5, 5, -5],
        [-1, 3, 1, -2, 2],
        [-3, 4, 2, -1, 1],
        [5, -9, -4, 4, -3],
        [0, -2, -2, 3, -2],
    ])
}

pub fn r2() -> RatMatrix {
    RatMatrix::from_i64(&[
        [-5, 5, 1, 1, 0],
        [1, -2, 0, 0, 1],
        [2, -2, -1, 0, -1],
        [-4, 5, 1, 0, 1],
        [-2, 1, -1, 1, 0],
    ])
}

pub fn l2() -> RatMatrix {
    RatMatrix::from_i64(&[[5, 3, 0], [4, 3, 1], [4, 2, 1]])
}

/// A permutation `p` with `b[i][j] = a[p[i]][p[j]]` for all `i, j`, if any.
pub fn find_conjugating_permutation(a: &RatMatrix, b: &RatMatrix) -> Option<Vec<usize>> {
    let n = a.rows();
    if !a.is_square() || b.rows() != n || b.cols() != n {
        return None;
    }
    fn go(a: &RatMatrix, b: &RatMatrix, p: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
        let k = p.len();
        let n = a.rows();
        if k == n {
            return true;
        }
        for c in 0..n {
            if used[c] {
                continue;
            }
            p.push(c);
            let ok = (0..=k).all(|i| a.get(p[i], p[k]) == b.get(i, k) && a.get(p[k], p[i]) == b.get(k, i));
            if ok {
                used[c] = true;
                if go(a, b, p, used) {
                    return true;
                }
                used[c] = false;
            }
            p.pop();
        }
        false
    }
    let mut p = Vec::new();
    go(a, b, &mut p, &mut vec![false; n]).then_some(p)
}

use std::sync::Arc;

use iis_core::systems::SystemId;
use numberfield::{rat, FieldElement, FieldHandle, NumberField, RatMatrix, Rational};
use serde::Serialize;

use crate::SurfaceError;

/// `[x1_lo, x1_hi] x [x2_lo, x2_hi]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Rect {
    pub x1: [FieldElement; 2],
    pub x2: [FieldElement; 2],
}

impl Rect {
    pub fn new(x1: [FieldElement; 2], x2: [FieldElement; 2]) -> Result<Rect, SurfaceError> {
        if x1[0] >= x1[1] || x2[0] >= x2[1] {
            return Err(SurfaceError::InvalidGeometry("rectangle with an empty side".into()));
        }
        Ok(Rect { x1, x2 })
    }

    fn size(&self) -> (FieldElement, FieldElement) {
        (&self.x1[1] - &self.x1[0], &self.x2[1] - &self.x2[0])
    }

    fn same_size(&self, o: &Rect) -> bool {
        self.size() == o.size()
    }

    /// Image under `(x1, x2) -> (2 c1 - x1, 2 c2 - x2)`.
    fn reflect(&self, c1: &FieldElement, c2: &FieldElement) -> Rect {
        let (t1, t2) = (c1 + c1, c2 + c2);
        Rect { x1: [&t1 - &self.x1[1], &t1 - &self.x1[0]], x2: [&t2 - &self.x2[1], &t2 - &self.x2[0]] }
    }

    fn contains_rect(&self, o: &Rect) -> bool {
        self.x1[0] <= o.x1[0] && o.x1[1] <= self.x1[1] && self.x2[0] <= o.x2[0] && o.x2[1] <= self.x2[1]
    }

    fn interior_contains_rect(&self, o: &Rect) -> bool {
        self.x1[0] < o.x1[0] && o.x1[1] < self.x1[1] && self.x2[0] < o.x2[0] && o.x2[1] < self.x2[1]
    }

    fn disjoint(&self, o: &Rect) -> bool {
        self.x1[1] <= o.x1[0] || o.x1[1] <= self.x1[0] || self.x2[1] <= o.x2[0] || o.x2[1] <= self.x2[0]
    }

    pub fn to_f64(&self) -> [[f64; 2]; 2] {
        [[self.x1[0].to_f64(), self.x1[1].to_f64()], [self.x2[0].to_f64(), self.x2[1].to_f64()]]
    }
}

/// `(T1 \ holes) x {level}`.
#[derive(Clone, Debug)]
pub struct HorizontalPiece {
    pub level: Rational,
    /// Indices into [`PLSurface::rects`].
    pub holes: Vec<usize>,
}

/// `boundary(rect) x [x3_lo, x3_hi]`.
#[derive(Clone, Debug)]
pub struct WallPiece {
    pub rect: usize,
    pub x3: [Rational; 2],
}

impl WallPiece {
    /// The four edges of the rectangle as `((x1, x2), (x1, x2))` segments.
    pub fn edges(&self, s: &PLSurface) -> [[(FieldElement, FieldElement); 2]; 4] {
        let r = &s.rects[self.rect];
        let p = |i: usize, j: usize| (r.x1[i].clone(), r.x2[j].clone());
        [[p(0, 0), p(1, 0)], [p(1, 0), p(1, 1)], [p(1, 1), p(0, 1)], [p(0, 1), p(0, 0)]]
    }
}

/// The periodic surface: a fundamental piece plus the translation lattice.
/// `rects[0]` is `T1`, a fundamental domain of the lattice in the plane; the
/// others are the holes `T2, T3, T4`.
#[derive(Clone, Debug)]
pub struct PLSurface {
    pub example: u8,
    pub field: Arc<NumberField>,
    pub rects: Vec<Rect>,
    pub horizontals: Vec<HorizontalPiece>,
    pub walls: Vec<WallPiece>,
    /// Rows `e1, e2, e3` as `(x1, x2, x3)`.
    pub lattice: [[FieldElement; 3]; 3],
    pub h: [i64; 3],
}

fn q(f: &Arc<NumberField>, n: i64, d: i64) -> FieldElement {
    f.from_rational(rat(n, d))
}

/// Surface of example 1 (from S1) or 2 (from S2; same template with `d, e`
/// in place of `u, a + b - u`).
pub fn build_surface(example: u8) -> Result<PLSurface, SurfaceError> {
    let id = match example {
        1 => SystemId::S1,
        2 => SystemId::S2,
        _ => return Err(SurfaceError::UnknownExample(example)),
    };
    let f = id.field();
    let p = id.params();
    let (a, b, c) = (&p[0], &p[1], &p[2]);
    let (lo2, lo4) = match id {
        SystemId::S1 => (p[3].clone(), &(a + b) - &p[3]),
        SystemId::S2 => (p[3].clone(), p[4].clone()),
    };
    let x = |n: i64| q(&f, n, 5);
    let zero = f.zero();
    let one = f.one();
    let big = &(a + b) + &(c + c);
    let rects = [
        Rect::new([zero.clone(), one.clone()], [zero.clone(), big])?,
        Rect::new([x(1), x(2)], [lo2.clone(), &lo2 + c])?,
        Rect::new([x(3), x(4)], [a.clone(), a + c])?,
        Rect::new([x(1), x(2)], [lo4.clone(), &lo4 + c])?,
    ];
    let lattice = [
        [one.clone(), -&(b + c), zero.clone()],
        [one.clone(), a + c, zero.clone()],
        [zero, &lo4 - &lo2, one],
    ];
    PLSurface::new(example, rects, lattice)
}

/// Exact x2-levels of the horizontal edges of the holes.
#[derive(Clone, Debug, Serialize)]
pub struct SaddleLevels {
    pub values: Vec<FieldElement>,
    /// Pure x2-period of the lattice (the lattice vector with zero x1 and x3).
    pub period: FieldElement,
    /// No two values differ by a multiple of the period.
    pub distinct_mod_period: bool,
    /// No two values differ by the x2-component of any lattice vector.
    pub distinct_mod_lattice: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SymmetryReport {
    pub holds: bool,
    /// Pieces (or parts of pieces) whose image is not a lattice translate of the surface.
    pub unmatched: Vec<String>,
}

/// Center of a point reflection; x1 and x3 are rational.
#[derive(Clone, Debug)]
pub struct Center {
    pub x1: Rational,
    pub x2: FieldElement,
    pub x3: Rational,
}

#[derive(Clone, Debug, Serialize)]
pub struct Topology {
    /// Every boundary circle of a piece is glued to exactly one other.
    pub closed: bool,
    pub connected: bool,
    pub euler: i64,
    pub genus: Option<i64>,
}

impl PLSurface {
    /// Builds the pieces `(T1 \ (T2 u T3)) x 1/4`, `(T1 \ (T3 u T4)) x 3/4` and the
    /// walls `dT2 x [0, 1/4]`, `dT3 x [1/4, 3/4]`, `dT4 x [3/4, 1]`.
    pub fn new(example: u8, rects: [Rect; 4], lattice: [[FieldElement; 3]; 3]) -> Result<PLSurface, SurfaceError> {
        let f = rects[0].x1[0].field().clone();
        let s = PLSurface {
            example,
            field: f,
            rects: rects.to_vec(),
            horizontals: vec![
                HorizontalPiece { level: rat(1, 4), holes: vec![1, 2] },
                HorizontalPiece { level: rat(3, 4), holes: vec![2, 3] },
            ],
            walls: vec![
                WallPiece { rect: 1, x3: [rat(0, 1), rat(1, 4)] },
                WallPiece { rect: 2, x3: [rat(1, 4), rat(3, 4)] },
                WallPiece { rect: 3, x3: [rat(3, 4), rat(1, 1)] },
            ],
            lattice,
            h: [0, 1, 0],
        };
        let e = &s.lattice;
        let (zero, one) = (s.field.zero(), s.field.one());
        if e[0][0] != one || e[1][0] != one || e[2][0] != zero || e[0][2] != zero || e[1][2] != zero || e[2][2] != one {
            return Err(SurfaceError::InvalidGeometry("lattice must have the form (1,*,0), (1,*,0), (0,*,1)".into()));
        }
        if !s.period().is_positive() {
            return Err(SurfaceError::InvalidGeometry("lattice x2-period must be positive".into()));
        }
        if s.rects[0].x1 != [zero.clone(), one.clone()] || s.rects[0].x2[0] != zero || s.rects[0].x2[1] != s.period() {
            return Err(SurfaceError::InvalidGeometry("T1 must be [0,1] x [0, period]".into()));
        }
        Ok(s)
    }

    /// The lattice vector `e2 - e1 = (0, period, 0)`.
    pub fn period(&self) -> FieldElement {
        &self.lattice[1][1] - &self.lattice[0][1]
    }

    /// `T2, T3, T4` inside `[0,1] x [0,1]`.
    pub fn holes_in_unit_square(&self) -> bool {
        let f = &self.field;
        let unit = Rect { x1: [f.zero(), f.one()], x2: [f.zero(), f.one()] };
        self.rects[1..].iter().all(|r| unit.contains_rect(r))
    }

    /// `(d1, d2, d3)` is `k1 e1 + k2 e2 + k3 e3` for integers `k`.
    pub fn is_lattice_vector(&self, d: [&FieldElement; 3]) -> bool {
        let e = &self.lattice;
        if !d[2].is_integer() || !d[0].is_integer() {
            return false;
        }
        // k3 = d3, k1 + k2 = d1, and k2 from the x2 component
        let k3 = d[2];
        let n = d[0];
        let rest = &(d[1] - &(k3 * &e[2][1])) - &(n * &e[0][1]);
        (&rest / &self.period()).is_integer()
    }

    /// Is `t` the translate of `s` by a lattice vector with x3-component `dz`?
    fn translate_of(&self, t: &Rect, s: &Rect, dz: &FieldElement) -> bool {
        t.same_size(s) && self.is_lattice_vector([&(&t.x1[0] - &s.x1[0]), &(&t.x2[0] - &s.x2[0]), dz])
    }

    pub fn saddle_levels(&self) -> SaddleLevels {
        let values: Vec<FieldElement> = self.rects[1..].iter().flat_map(|r| r.x2.clone()).collect();
        let period = self.period();
        let mut mod_period = true;
        let mut mod_lattice = true;
        for i in 0..values.len() {
            for j in i + 1..values.len() {
                let d = &values[i] - &values[j];
                if (&d / &period).is_integer() {
                    mod_period = false;
                }
                if self.in_x2_group(&d) {
                    mod_lattice = false;
                }
            }
        }
        SaddleLevels { values, period, distinct_mod_period: mod_period, distinct_mod_lattice: mod_lattice }
    }

    /// `d` in `Z e1.x2 + Z e2.x2 + Z e3.x2`, decided on rational coordinates.
    fn in_x2_group(&self, d: &FieldElement) -> bool {
        let deg = self.field.degree();
        let coords = |x: &FieldElement| -> Vec<Rational> {
            let mut v = x.poly().coeffs().to_vec();
            v.resize(deg, rat(0, 1));
            v
        };
        let gens: Vec<Vec<Rational>> = self.lattice.iter().map(|e| coords(&e[1])).collect();
        let a = RatMatrix::from_rows((0..deg).map(|i| gens.iter().map(|g| g[i].clone()).collect()).collect())
            .expect("rectangular");
        let rhs = RatMatrix::from_rows(coords(d).into_iter().map(|x| vec![x]).collect()).expect("column");
        match a.solve_exact(&rhs) {
            Some(k) => (0..k.rows()).all(|i| k.get(i, 0).is_integer()),
            // inconsistent: not even in the rational span
            None if a.rank() == gens.len() => false,
            None => panic!("x2-components of the lattice are rationally dependent"),
        }
    }

    /// The point stated for example 1: `(3/10, (2a + c + b - u)/2, 1/4)`.
    pub fn stated_center(&self) -> Center {
        let (t3, t4) = (&self.rects[2], &self.rects[3]);
        // 2a + b + c - u = a + (a + b - u) + c = T3.lo + T4.lo + c
        let c = &t3.x2[1] - &t3.x2[0];
        Center { x1: rat(3, 10), x2: (&(&t3.x2[0] + &t4.x2[0]) + &c).scale(&rat(1, 2)), x3: rat(1, 4) }
    }

    /// Centers swapping `T2` with `T3` about level 1/4 and `T3` with `T4` about level 3/4.
    pub fn candidate_centers(&self) -> [Center; 2] {
        let (t2, t3, t4) = (&self.rects[1], &self.rects[2], &self.rects[3]);
        let half = rat(1, 2);
        [
            Center { x1: half.clone(), x2: (&t2.x2[1] + &t3.x2[0]).scale(&half), x3: rat(1, 4) },
            Center { x1: half.clone(), x2: (&t3.x2[1] + &t4.x2[0]).scale(&half), x3: rat(3, 4) },
        ]
    }

    /// Exact check that `x -> 2p - x` maps the surface onto itself modulo the
    /// lattice. Walls are cut at every x3-breakpoint and its mirror image so the
    /// comparison is between equal pieces.
    pub fn check_central_symmetry(&self, p: &Center) -> SymmetryReport {
        let f = &self.field;
        let c1 = f.from_rational(p.x1.clone());
        let two_p3 = &p.x3 + &p.x3;
        let mut unmatched = Vec::new();

        for (i, h) in self.horizontals.iter().enumerate() {
            let img_level = &two_p3 - &h.level;
            let target = self.horizontals.iter().find(|g| (&img_level - &g.level).is_integer());
            let Some(g) = target else {
                unmatched.push(format!("horizontal piece {i}: no piece at level {img_level} mod 1"));
                continue;
            };
            let dz = f.from_rational(&img_level - &g.level);
            let mut ok = g.holes.len() == h.holes.len();
            for &k in &h.holes {
                let img = self.rects[k].reflect(&c1, &p.x2);
                if !g.holes.iter().any(|&m| self.translate_of(&img, &self.rects[m], &dz)) {
                    ok = false;
                    unmatched.push(format!("horizontal piece {i}: hole T{} has no image hole", k + 1));
                }
            }
            if !ok && unmatched.is_empty() {
                unmatched.push(format!("horizontal piece {i}: hole counts differ"));
            }
        }

        // common refinement of x3 in [0, 1)
        let mut cuts: Vec<Rational> = vec![rat(0, 1)];
        for w in &self.walls {
            for z in &w.x3 {
                cuts.push(z.clone());
                cuts.push(&two_p3 - z);
            }
        }
        let mut cuts: Vec<Rational> = cuts.into_iter().map(|z| &z - z.floor()).collect();
        cuts.sort();
        cuts.dedup();
        let cells = |w: &WallPiece| -> Vec<[Rational; 2]> {
            let mut pts: Vec<Rational> = Vec::new();
            let base = w.x3[0].floor();
            for k in [-1i64, 0, 1] {
                for c in &cuts {
                    let z = c + &base + rat(k, 1);
                    if w.x3[0] < z && z < w.x3[1] {
                        pts.push(z);
                    }
                }
            }
            pts.push(w.x3[0].clone());
            pts.push(w.x3[1].clone());
            pts.sort();
            pts.dedup();
            pts.windows(2).map(|p| [p[0].clone(), p[1].clone()]).collect()
        };
        let all: Vec<(usize, [Rational; 2])> =
            self.walls.iter().flat_map(|w| cells(w).into_iter().map(move |c| (w.rect, c))).collect();
        for (rect, z) in &all {
            let img = self.rects[*rect].reflect(&c1, &p.x2);
            let iz = [&two_p3 - &z[1], &two_p3 - &z[0]];
            let hit = all.iter().any(|(r2, w)| {
                let dz = &iz[0] - &w[0];
                &iz[1] - &iz[0] == &w[1] - &w[0] && self.translate_of(&img, &self.rects[*r2], &f.from_rational(dz))
            });
            if !hit {
                unmatched.push(format!("wall of T{} on x3 in [{}, {}]", rect + 1, z[0], z[1]));
            }
        }
        SymmetryReport { holds: unmatched.is_empty(), unmatched }
    }

    /// Euler characteristic and genus from the pieces and their gluing
    /// along boundary circles.
    pub fn topology(&self) -> Topology {
        // pieces: horizontals then walls; circles: (piece, rect, x3)
        let nh = self.horizontals.len();
        let mut circles: Vec<(usize, usize, Rational)> = Vec::new();
        let mut euler = 0i64;
        for (i, h) in self.horizontals.iter().enumerate() {
            // a torus with disjoint open discs removed
            euler -= h.holes.len() as i64;
            for &k in &h.holes {
                circles.push((i, k, h.level.clone()));
            }
        }
        for (j, w) in self.walls.iter().enumerate() {
            circles.push((nh + j, w.rect, w.x3[0].clone()));
            circles.push((nh + j, w.rect, w.x3[1].clone()));
        }
        let holes_ok = self.horizontals.iter().all(|h| {
            h.holes.iter().all(|&k| self.rects[0].interior_contains_rect(&self.rects[k]))
                && h.holes.iter().enumerate().all(|(i, &k)| h.holes[i + 1..].iter().all(|&m| self.rects[k].disjoint(&self.rects[m])))
        });
        let n = nh + self.walls.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            let mut x = x;
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut closed = holes_ok;
        for (i, (pi, ri, zi)) in circles.iter().enumerate() {
            let partners: Vec<usize> = circles
                .iter()
                .enumerate()
                .filter(|&(j, (_, rj, zj))| {
                    j != i && self.translate_of(&self.rects[*ri], &self.rects[*rj], &self.field.from_rational(zi - zj))
                })
                .map(|(_, c)| c.0)
                .collect();
            if partners.len() != 1 {
                closed = false;
            }
            for pj in partners {
                let (a, b) = (find(&mut parent, *pi), find(&mut parent, pj));
                parent[a] = b;
            }
        }
        let root = find(&mut parent, 0);
        let connected = (0..n).all(|i| find(&mut parent, i) == root);
        let genus = (closed && connected && euler % 2 == 0).then(|| 1 - euler / 2);
        Topology { closed, connected, euler, genus }
    }
}

//! Plane sections `x2 = level` of the periodic surface inside a square window
//! of the `(x1, x3)` plane. Everything here is f64; the exact data is
//! converted once in [`FloatSurface::new`].

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::surface::PLSurface;
use crate::SurfaceError;

/// Default joining tolerance; `THINSECTIONS_PRECISION` overrides it in the CLI.
pub const DEFAULT_EPS: f64 = 1e-9;

/// `|x1 - c1| <= r`, `|x3 - c3| <= r`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Window {
    pub c1: f64,
    pub c3: f64,
    pub r: f64,
}

impl Window {
    pub fn centered(r: f64) -> Window {
        Window { c1: 0.0, c3: 0.0, r }
    }

    fn x1(&self) -> [f64; 2] {
        [self.c1 - self.r, self.c1 + self.r]
    }

    fn x3(&self) -> [f64; 2] {
        [self.c3 - self.r, self.c3 + self.r]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WindowClass {
    Spanning,
    BoundaryClipped,
    Closed,
}

/// Connected piece of the section inside the window. Points are `(x1, x3)`.
#[derive(Clone, Debug, Serialize)]
pub struct SectionComponent {
    pub polylines: Vec<Vec<[f64; 2]>>,
    pub window_class: WindowClass,
    /// Window edges touched: x1 low, x1 high, x3 low, x3 high.
    pub touches: [bool; 4],
    pub diameter: f64,
    pub segments: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Census {
    pub spanning: usize,
    pub clipped: usize,
    pub closed: usize,
    /// Components with diameter at least the radius, whatever their class.
    pub wide: usize,
}

/// A segment `[p, q]`, horizontal (`p[1] == q[1]`) or vertical (`p[0] == q[0]`).
pub type Segment = [[f64; 2]; 2];

/// f64 copy of a [`PLSurface`].
#[derive(Clone, Debug)]
pub struct FloatSurface {
    rects: Vec<[[f64; 2]; 2]>,
    horizontals: Vec<(f64, Vec<usize>)>,
    walls: Vec<(usize, [f64; 2])>,
    /// x2-components of `e1` and `e3`, and the pure x2-period.
    t1: f64,
    t3: f64,
    period: f64,
    saddles: Vec<f64>,
}

impl FloatSurface {
    pub fn new(s: &PLSurface) -> FloatSurface {
        FloatSurface {
            rects: s.rects.iter().map(|r| r.to_f64()).collect(),
            horizontals: s.horizontals.iter().map(|h| (numberfield::rat_to_f64(&h.level), h.holes.clone())).collect(),
            walls: s.walls.iter().map(|w| (w.rect, [numberfield::rat_to_f64(&w.x3[0]), numberfield::rat_to_f64(&w.x3[1])])).collect(),
            t1: s.lattice[0][1].to_f64(),
            t3: s.lattice[2][1].to_f64(),
            period: s.period().to_f64(),
            saddles: s.saddle_levels().values.iter().map(|v| v.to_f64()).collect(),
        }
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// The level seen by the translate shifted by `k` in x1 and `n3` in x3, in `[0, period)`.
    fn local_level(&self, level: f64, k: i64, n3: i64) -> f64 {
        (level - k as f64 * self.t1 - n3 as f64 * self.t3).rem_euclid(self.period)
    }

    fn cell_range(lo: f64, hi: f64) -> std::ops::RangeInclusive<i64> {
        (lo.floor() as i64 - 1)..=(hi.ceil() as i64 + 1)
    }

    /// A saddle within `tol` of the level seen by some translate meeting the window.
    pub fn near_saddle(&self, level: f64, w: &Window, tol: f64) -> Option<f64> {
        let [a1, b1] = w.x1();
        let [a3, b3] = w.x3();
        for k in Self::cell_range(a1, b1) {
            for n3 in Self::cell_range(a3, b3) {
                let y = self.local_level(level, k, n3);
                for &s in &self.saddles {
                    let d = (y - s).rem_euclid(self.period);
                    if d.min(self.period - d) < tol {
                        return Some(s);
                    }
                }
            }
        }
        None
    }

    /// Section segments in the window, unjoined.
    pub fn segments(&self, level: f64, w: &Window, eps: f64) -> Result<Vec<Segment>, SurfaceError> {
        if !(w.r > 0.0 && w.r.is_finite() && w.c1.is_finite() && w.c3.is_finite()) {
            return Err(SurfaceError::EmptyWindow(w.r));
        }
        if let Some(s) = self.near_saddle(level, w, eps) {
            return Err(SurfaceError::NearSaddle { level, saddle: s, eps });
        }
        let [a1, b1] = w.x1();
        let [a3, b3] = w.x3();
        let mut out = Vec::new();
        let mut push_h = |z: f64, x0: f64, x1: f64| {
            if a3 <= z && z <= b3 {
                let (lo, hi) = (x0.max(a1), x1.min(b1));
                if lo < hi {
                    out.push([[lo, z], [hi, z]]);
                }
            }
        };
        let mut verticals = Vec::new();
        for k in Self::cell_range(a1, b1) {
            for n3 in Self::cell_range(a3, b3) {
                let y = self.local_level(level, k, n3);
                let inside = |r: usize| self.rects[r][1][0] < y && y < self.rects[r][1][1];
                let kf = k as f64;
                for (z, holes) in &self.horizontals {
                    let mut xs = vec![0.0];
                    for &r in holes {
                        if inside(r) {
                            xs.extend_from_slice(&self.rects[r][0]);
                        }
                    }
                    xs.push(1.0);
                    xs.sort_by(f64::total_cmp);
                    for p in xs.chunks(2) {
                        push_h(n3 as f64 + z, kf + p[0], kf + p[1]);
                    }
                }
                for &(r, [z0, z1]) in &self.walls {
                    if inside(r) {
                        for x in self.rects[r][0] {
                            verticals.push((kf + x, n3 as f64 + z0, n3 as f64 + z1));
                        }
                    }
                }
            }
        }
        for (x, z0, z1) in verticals {
            if a1 <= x && x <= b1 {
                let (lo, hi) = (z0.max(a3), z1.min(b3));
                if lo < hi {
                    out.push([[x, lo], [x, hi]]);
                }
            }
        }
        Ok(out)
    }
}

fn key(p: [f64; 2], eps: f64) -> (i64, i64) {
    ((p[0] / eps).round() as i64, (p[1] / eps).round() as i64)
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }
    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        self.0[a] = b;
    }
}

/// Joins segments sharing endpoints (within `eps`) and returns the groups.
pub fn join_segments(segs: &[Segment], eps: f64) -> Vec<Vec<Segment>> {
    let mut ids: HashMap<(i64, i64), usize> = HashMap::new();
    let mut ends = Vec::with_capacity(segs.len());
    for s in segs {
        let n = ids.len();
        let a = *ids.entry(key(s[0], eps)).or_insert(n);
        let n = ids.len();
        let b = *ids.entry(key(s[1], eps)).or_insert(n);
        ends.push((a, b));
    }
    let mut uf = UnionFind::new(ids.len());
    for &(a, b) in &ends {
        uf.union(a, b);
    }
    let mut groups: HashMap<usize, Vec<Segment>> = HashMap::new();
    let mut order = Vec::new();
    for (s, &(a, _)) in segs.iter().zip(&ends) {
        let r = uf.find(a);
        groups
            .entry(r)
            .or_insert_with(|| {
                order.push(r);
                Vec::new()
            })
            .push(*s);
    }
    order.into_iter().map(|r| groups.remove(&r).expect("group")).collect()
}

/// Chains a connected group of segments into polylines.
fn chain(group: &[Segment], eps: f64) -> Vec<Vec<[f64; 2]>> {
    let mut adj: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, s) in group.iter().enumerate() {
        adj.entry(key(s[0], eps)).or_default().push(i);
        adj.entry(key(s[1], eps)).or_default().push(i);
    }
    let mut used = vec![false; group.len()];
    let mut lines = Vec::new();
    let walk = |start: usize, from: [f64; 2], used: &mut Vec<bool>| {
        let mut line = vec![from];
        let mut cur = Some(start);
        let mut at = from;
        while let Some(i) = cur {
            used[i] = true;
            let s = group[i];
            let next = if key(s[0], eps) == key(at, eps) { s[1] } else { s[0] };
            line.push(next);
            at = next;
            cur = adj[&key(at, eps)].iter().copied().find(|&j| !used[j]);
        }
        line
    };
    // open chains first, from endpoints of odd degree
    let mut starts: Vec<(usize, [f64; 2])> = Vec::new();
    for (i, s) in group.iter().enumerate() {
        for p in s {
            if adj[&key(*p, eps)].len() % 2 == 1 {
                starts.push((i, *p));
            }
        }
    }
    for (i, p) in starts {
        if !used[i] {
            lines.push(walk(i, p, &mut used));
        }
    }
    for i in 0..group.len() {
        if !used[i] {
            lines.push(walk(i, group[i][0], &mut used));
        }
    }
    lines
}

fn classify(group: &[Segment], w: &Window, eps: f64) -> ([bool; 4], WindowClass, f64) {
    let [a1, b1] = w.x1();
    let [a3, b3] = w.x3();
    let (mut lo1, mut hi1, mut lo3, mut hi3) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for s in group {
        for p in s {
            lo1 = lo1.min(p[0]);
            hi1 = hi1.max(p[0]);
            lo3 = lo3.min(p[1]);
            hi3 = hi3.max(p[1]);
        }
    }
    let t = [lo1 <= a1 + eps, hi1 >= b1 - eps, lo3 <= a3 + eps, hi3 >= b3 - eps];
    let class = if (t[0] && t[1]) || (t[2] && t[3]) {
        WindowClass::Spanning
    } else if t.iter().any(|&x| x) {
        WindowClass::BoundaryClipped
    } else {
        WindowClass::Closed
    };
    (t, class, (hi1 - lo1).max(hi3 - lo3))
}

/// Section at `x2 = level` in the window, as connected components.
pub fn trace_window(s: &PLSurface, level: f64, w: &Window, eps: f64) -> Result<Vec<SectionComponent>, SurfaceError> {
    let fs = FloatSurface::new(s);
    trace_float(&fs, level, w, eps)
}

pub fn trace_float(fs: &FloatSurface, level: f64, w: &Window, eps: f64) -> Result<Vec<SectionComponent>, SurfaceError> {
    let segs = fs.segments(level, w, eps)?;
    Ok(join_segments(&segs, eps)
        .into_iter()
        .map(|g| {
            let (touches, window_class, diameter) = classify(&g, w, eps);
            SectionComponent { polylines: chain(&g, eps), window_class, touches, diameter, segments: g.len() }
        })
        .collect())
}

/// Section in the window `|x1|, |x3| <= radius`.
pub fn trace_section(s: &PLSurface, level: f64, radius: f64, eps: f64) -> Result<Vec<SectionComponent>, SurfaceError> {
    trace_window(s, level, &Window::centered(radius), eps)
}

pub fn component_census(components: &[SectionComponent], radius: f64) -> Census {
    let mut c = Census::default();
    for k in components {
        match k.window_class {
            WindowClass::Spanning => c.spanning += 1,
            WindowClass::BoundaryClipped => c.clipped += 1,
            WindowClass::Closed => c.closed += 1,
        }
        if k.diameter >= radius {
            c.wide += 1;
        }
    }
    c
}

/// Traces in the window of radius `outer` and counts the components that reach
/// the inner window of radius `inner`. One component in the plane shows up as
/// this count falling to 1 as `outer` grows.
pub fn components_meeting_inner(s: &PLSurface, level: f64, inner: f64, outer: f64, eps: f64) -> Result<usize, SurfaceError> {
    let fs = FloatSurface::new(s);
    let segs = fs.segments(level, &Window::centered(outer), eps)?;
    let meets = |g: &Vec<Segment>| {
        g.iter().any(|sg| {
            let (x0, x1) = (sg[0][0].min(sg[1][0]), sg[0][0].max(sg[1][0]));
            let (z0, z1) = (sg[0][1].min(sg[1][1]), sg[0][1].max(sg[1][1]));
            x0 <= inner && x1 >= -inner && z0 <= inner && z1 >= -inner
        })
    };
    Ok(join_segments(&segs, eps).iter().filter(|g| meets(g)).count())
}

/// Levels uniform in `[0, period)` from a seeded stream, skipping any within
/// `tol` of a saddle for the window of radius `radius`.
pub fn sample_levels(s: &PLSurface, seed: u64, n: usize, radius: f64, tol: f64) -> Vec<f64> {
    let fs = FloatSurface::new(s);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = Window::centered(radius);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let y = rng.gen::<f64>() * fs.period;
        if fs.near_saddle(y, &w, tol).is_none() {
            out.push(y);
        }
    }
    out
}

/// Component counts from flood fill on the grid `x1 in Z/40`, `x3 in Z/8`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RasterCensus {
    pub components: usize,
    pub spanning: usize,
    pub closed: usize,
}

/// Independent count: a grid edge belongs to the section when its midpoint,
/// reduced into the fundamental domain, lies on the surface. All breakpoints
/// of both examples sit on this grid, so the graph of occupied edges has the
/// same components as the traced section.
pub fn raster_census(s: &PLSurface, level: f64, radius: f64) -> Result<RasterCensus, SurfaceError> {
    const N1: i64 = 40;
    const N3: i64 = 8;
    let fs = FloatSurface::new(s);
    let on_grid = |x: f64, n: i64| ((x * n as f64).round() - x * n as f64).abs() < 1e-12;
    if fs.rects.iter().any(|r| !on_grid(r[0][0], N1) || !on_grid(r[0][1], N1))
        || fs.walls.iter().any(|w| !on_grid(w.1[0], N3) || !on_grid(w.1[1], N3))
        || fs.horizontals.iter().any(|h| !on_grid(h.0, N3))
    {
        return Err(SurfaceError::InvalidGeometry("breakpoints off the raster grid".into()));
    }
    let m1 = (radius * N1 as f64).floor() as i64;
    let m3 = (radius * N3 as f64).floor() as i64;
    if m1 <= 0 {
        return Err(SurfaceError::EmptyWindow(radius));
    }
    let tol = 1e-9;
    let on = |x1: f64, x3: f64| -> bool {
        let k = x1.floor();
        let n3 = x3.floor();
        let (u1, u3) = (x1 - k, x3 - n3);
        let y = fs.local_level(level, k as i64, n3 as i64);
        let strictly_in = |r: usize| {
            let q = fs.rects[r];
            q[0][0] + tol < u1 && u1 < q[0][1] - tol && q[1][0] < y && y < q[1][1]
        };
        for (z, holes) in &fs.horizontals {
            if (u3 - z).abs() < tol {
                return !holes.iter().any(|&r| strictly_in(r));
            }
        }
        fs.walls.iter().any(|&(r, [z0, z1])| {
            let q = fs.rects[r];
            z0 < u3 && u3 < z1 && q[1][0] < y && y < q[1][1] && q[0].iter().any(|&e| (u1 - e).abs() < tol)
        })
    };
    let (w1, w3) = ((2 * m1 + 1) as usize, (2 * m3 + 1) as usize);
    let idx = |i: i64, j: i64| ((i + m1) as usize) * w3 + (j + m3) as usize;
    let mut uf = UnionFind::new(w1 * w3);
    let mut used = vec![false; w1 * w3];
    for i in -m1..=m1 {
        for j in -m3..=m3 {
            let (x1, x3) = (i as f64 / N1 as f64, j as f64 / N3 as f64);
            if i < m1 && on(x1 + 0.5 / N1 as f64, x3) {
                uf.union(idx(i, j), idx(i + 1, j));
                used[idx(i, j)] = true;
                used[idx(i + 1, j)] = true;
            }
            if j < m3 && on(x1, x3 + 0.5 / N3 as f64) {
                uf.union(idx(i, j), idx(i, j + 1));
                used[idx(i, j)] = true;
                used[idx(i, j + 1)] = true;
            }
        }
    }
    // per root: touched edges x1-, x1+, x3-, x3+
    let mut sides: HashMap<usize, [bool; 4]> = HashMap::new();
    for i in -m1..=m1 {
        for j in -m3..=m3 {
            if !used[idx(i, j)] {
                continue;
            }
            let r = uf.find(idx(i, j));
            let t = sides.entry(r).or_default();
            t[0] |= i == -m1;
            t[1] |= i == m1;
            t[2] |= j == -m3;
            t[3] |= j == m3;
        }
    }
    Ok(RasterCensus {
        components: sides.len(),
        spanning: sides.values().filter(|t| (t[0] && t[1]) || (t[2] && t[3])).count(),
        closed: sides.values().filter(|t| !t.iter().any(|&b| b)).count(),
    })
}

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::Arc;

use iis_core::Iis;
use numberfield::{parse_rational, rat_to_string, FieldElement, FieldHandle, NumberField, Poly, Rational};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::RipsError;

/// A point of a support arc. `form`, when non-empty, expresses the point's
/// offset from its arc's start as a linear form in chart parameters; it
/// rides along through every move so transition matrices can be read off.
/// Order and equality look only at the value.
#[derive(Clone, Debug)]
pub struct Pt {
    pub v: FieldElement,
    pub form: Vec<Rational>,
}

impl Pt {
    pub fn new(v: FieldElement) -> Pt {
        Pt { v, form: Vec::new() }
    }

    fn combine(&self, o: &Pt, sign: i64) -> Vec<Rational> {
        if self.form.is_empty() && o.form.is_empty() {
            return Vec::new();
        }
        let n = self.form.len().max(o.form.len());
        let get = |f: &[Rational], i: usize| f.get(i).cloned().unwrap_or_else(Rational::zero);
        (0..n).map(|i| get(&self.form, i) + get(&o.form, i) * Rational::from_integer(sign.into())).collect()
    }

    pub fn add(&self, o: &Pt) -> Pt {
        Pt { v: &self.v + &o.v, form: self.combine(o, 1) }
    }

    pub fn sub(&self, o: &Pt) -> Pt {
        Pt { v: &self.v - &o.v, form: self.combine(o, -1) }
    }
}

impl PartialEq for Pt {
    fn eq(&self, o: &Self) -> bool {
        self.v == o.v
    }
}

impl Eq for Pt {}

impl PartialOrd for Pt {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Pt {
    fn cmp(&self, o: &Self) -> Ordering {
        self.v.cmp(&o.v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaseSide {
    Bottom,
    Top,
}

impl BaseSide {
    pub fn other(self) -> BaseSide {
        match self {
            BaseSide::Bottom => BaseSide::Top,
            BaseSide::Top => BaseSide::Bottom,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SupportArc {
    pub id: usize,
    pub lo: Pt,
    pub hi: Pt,
}

impl SupportArc {
    pub fn width(&self) -> FieldElement {
        &self.hi.v - &self.lo.v
    }
}

/// A base: the interval `[lo, hi]` inside support arc `arc`.
#[derive(Clone, Debug)]
pub struct Base {
    pub arc: usize,
    pub lo: Pt,
    pub hi: Pt,
}

#[derive(Clone, Debug)]
pub struct Band {
    pub id: usize,
    pub bottom: Base,
    pub top: Base,
    pub length: Rational,
    /// Length as a combination of reference lengths (see [`BandComplex::reset_length_forms`]).
    pub length_form: Vec<Rational>,
}

impl Band {
    pub fn width(&self) -> FieldElement {
        &self.bottom.hi.v - &self.bottom.lo.v
    }

    pub fn base(&self, s: BaseSide) -> &Base {
        match s {
            BaseSide::Bottom => &self.bottom,
            BaseSide::Top => &self.top,
        }
    }

    fn base_mut(&mut self, s: BaseSide) -> &mut Base {
        match s {
            BaseSide::Bottom => &mut self.bottom,
            BaseSide::Top => &mut self.top,
        }
    }

    /// Image of `x` (on base `from`) on the opposite base.
    pub fn carry(&self, x: &FieldElement, from: BaseSide) -> FieldElement {
        let (a, b) = (self.base(from), self.base(from.other()));
        &(x - &a.lo.v) + &b.lo.v
    }
}

/// Maximal positive-measure subarc whose interior meets at most one base.
/// `base` is `None` for dead subarcs that meet no base at all.
#[derive(Clone, Debug)]
pub struct FreeSubarc {
    pub arc: usize,
    pub lo: Pt,
    pub hi: Pt,
    /// `(band id, side)` of the single covering base.
    pub base: Option<(usize, BaseSide)>,
}

impl FreeSubarc {
    pub fn is_dead(&self) -> bool {
        self.base.is_none()
    }
}

/// Support arcs (disjoint subintervals of one line, kept sorted) with bands
/// glued along pairs of bases.
#[derive(Clone, Debug)]
pub struct BandComplex {
    pub arcs: Vec<SupportArc>,
    pub bands: Vec<Band>,
    next_arc: usize,
    next_band: usize,
    field: Arc<NumberField>,
}

/// Combinatorial shape of a complex after relabeling arcs and bands by
/// endpoint order, plus the segment lengths between consecutive points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Canonical {
    pub arc_sizes: Vec<usize>,
    /// Per band, its two bases as `(arc, first point, last point)`, sorted; the list is sorted.
    pub bands: Vec<[(usize, usize, usize); 2]>,
    pub segments: Vec<FieldElement>,
    /// Indices into `bands` of the complex, in canonical order.
    pub band_order: Vec<usize>,
}

impl Canonical {
    pub fn same_shape(&self, o: &Canonical) -> bool {
        self.arc_sizes == o.arc_sizes && self.bands == o.bands
    }

    /// `Some(k)` when the segments are `k` times those of `o`.
    pub fn scale_from(&self, o: &Canonical) -> Option<FieldElement> {
        if !self.same_shape(o) || self.segments.is_empty() {
            return None;
        }
        let k = &self.segments[0] / &o.segments[0];
        self.segments.iter().zip(&o.segments).all(|(x, y)| *x == y * &k).then_some(k)
    }
}

/// One band per pair: bottom = left interval, top = right interval, length 1.
pub fn complex_from_iis(s: &Iis) -> BandComplex {
    let n = s.pairs.len();
    let arc = SupportArc { id: 0, lo: Pt::new(s.support.lo.clone()), hi: Pt::new(s.support.hi.clone()) };
    let bands = s
        .pairs
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut lf = vec![Rational::zero(); n];
            lf[i] = Rational::one();
            Band {
                id: i,
                bottom: Base { arc: 0, lo: Pt::new(p.left.lo.clone()), hi: Pt::new(p.left.hi.clone()) },
                top: Base { arc: 0, lo: Pt::new(p.right.lo.clone()), hi: Pt::new(p.right.hi.clone()) },
                length: Rational::one(),
                length_form: lf,
            }
        })
        .collect();
    BandComplex { arcs: vec![arc], bands, next_arc: 1, next_band: n, field: s.field().clone() }
}

/// All maximal free subarcs, by arc order then position.
pub fn find_free_subarcs(x: &BandComplex) -> Vec<FreeSubarc> {
    let mut out = Vec::new();
    for arc in &x.arcs {
        let bases: Vec<(usize, BaseSide, &Base)> = x
            .bands
            .iter()
            .flat_map(|b| [(b.id, BaseSide::Bottom, &b.bottom), (b.id, BaseSide::Top, &b.top)])
            .filter(|(_, _, bb)| bb.arc == arc.id)
            .collect();
        let pts = sorted_points(arc, bases.iter().map(|(_, _, b)| *b));
        let mut cur: Option<FreeSubarc> = None;
        for w in pts.windows(2) {
            let (p, q) = (&w[0], &w[1]);
            let cov: Vec<(usize, BaseSide)> =
                bases.iter().filter(|(_, _, b)| b.lo <= *p && *q <= b.hi).map(|(i, s, _)| (*i, *s)).collect();
            if cov.len() > 1 {
                out.extend(cur.take());
                continue;
            }
            let key = cov.first().copied();
            match &mut cur {
                Some(c) if c.base == key && c.hi == *p => c.hi = q.clone(),
                _ => {
                    out.extend(cur.take());
                    cur = Some(FreeSubarc { arc: arc.id, lo: p.clone(), hi: q.clone(), base: key });
                }
            }
        }
        out.extend(cur);
    }
    out
}

fn sorted_points<'a>(arc: &SupportArc, bases: impl Iterator<Item = &'a Base>) -> Vec<Pt> {
    let mut pts = vec![arc.lo.clone(), arc.hi.clone()];
    for b in bases {
        pts.push(b.lo.clone());
        pts.push(b.hi.clone());
    }
    pts.sort();
    pts.dedup();
    pts
}

/// Collapses `J x [0,1]` onto `J x 1` plus the two vertical sides: the band is
/// cut into the parts of its base left and right of `J` (zero-width parts are
/// dropped) and `J` leaves the support. A dead subarc is simply deleted.
pub fn collapse_free_subarc(x: &BandComplex, fa: &FreeSubarc) -> Result<BandComplex, RipsError> {
    let free = find_free_subarcs(x);
    if !free.iter().any(|f| f.arc == fa.arc && f.lo == fa.lo && f.hi == fa.hi && f.base == fa.base) {
        let inside = free.iter().any(|f| f.arc == fa.arc && f.base == fa.base && f.lo <= fa.lo && fa.hi <= f.hi);
        return Err(if inside { RipsError::NotMaximal } else { RipsError::NotFree });
    }
    let mut y = x.clone();
    y.collapse_unchecked(fa);
    Ok(y)
}

/// Replaces every maximal chain of bands glued end to end through an arc
/// that meets nothing else by one band with summed length.
pub fn merge_long_bands(x: &BandComplex) -> BandComplex {
    let mut y = x.clone();
    y.merge_all();
    y
}

impl BandComplex {
    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn band_by_id(&self, id: usize) -> Option<&Band> {
        self.bands.iter().find(|b| b.id == id)
    }

    pub fn arc_by_id(&self, id: usize) -> Option<&SupportArc> {
        self.arcs.iter().find(|a| a.id == id)
    }

    pub fn support_measure(&self) -> FieldElement {
        self.arcs.iter().fold(self.field.zero(), |acc, a| &acc + &a.width())
    }

    /// Sum of band widths.
    pub fn width_mass(&self) -> FieldElement {
        self.bands.iter().fold(self.field.zero(), |acc, b| &acc + &b.width())
    }

    /// Support measure plus `sum width * (length - 1)`: the measure of the
    /// original support still represented in the complex.
    pub fn represented_measure(&self) -> FieldElement {
        let one = Rational::one();
        self.bands.iter().fold(self.support_measure(), |acc, b| &acc + &b.width().scale(&(&b.length - &one)))
    }


    /// Every point is covered twice on average: `2 * support = sum of base widths`.
    pub fn is_balanced(&self) -> bool {
        self.support_measure() == self.width_mass()
    }

    pub(crate) fn collapse_unchecked(&mut self, fa: &FreeSubarc) {
        let (s, t) = (&fa.lo, &fa.hi);
        if let Some((id, side)) = fa.base {
            let bi = self.bands.iter().position(|b| b.id == id).expect("band of a free subarc");
            let band = self.bands[bi].clone();
            let (base, other) = (band.base(side).clone(), band.base(side.other()).clone());
            let mut parts = Vec::new();
            if base.lo < *s {
                let w = s.sub(&base.lo);
                let mut nb = band.clone();
                *nb.base_mut(side) = Base { arc: base.arc, lo: base.lo.clone(), hi: s.clone() };
                *nb.base_mut(side.other()) = Base { arc: other.arc, lo: other.lo.clone(), hi: other.lo.add(&w) };
                parts.push(nb);
            }
            if *t < base.hi {
                let off = t.sub(&base.lo);
                let mut nb = band.clone();
                *nb.base_mut(side) = Base { arc: base.arc, lo: t.clone(), hi: base.hi.clone() };
                *nb.base_mut(side.other()) = Base { arc: other.arc, lo: other.lo.add(&off), hi: other.hi.clone() };
                parts.push(nb);
            }
            if parts.len() == 2 {
                parts[1].id = self.next_band;
                self.next_band += 1;
            }
            self.bands.splice(bi..bi + 1, parts);
        }
        self.split_arc(fa.arc, s, t);
    }

    /// Removes the open subarc `(s, t)` from arc `id`.
    fn split_arc(&mut self, id: usize, s: &Pt, t: &Pt) {
        let ai = self.arcs.iter().position(|a| a.id == id).expect("arc");
        let arc = self.arcs.remove(ai);
        let left = (arc.lo < *s).then(|| {
            self.arcs.push(SupportArc { id, lo: arc.lo.clone(), hi: s.clone() });
            id
        });
        let right = (*t < arc.hi).then(|| {
            let nid = self.next_arc;
            self.next_arc += 1;
            self.arcs.push(SupportArc { id: nid, lo: t.clone(), hi: arc.hi.clone() });
            nid
        });
        for b in &mut self.bands {
            for side in [BaseSide::Bottom, BaseSide::Top] {
                let base = b.base_mut(side);
                if base.arc != id {
                    continue;
                }
                base.arc = if base.hi <= *s {
                    left.expect("base left of a removed subarc")
                } else if base.lo >= *t {
                    right.expect("base right of a removed subarc")
                } else {
                    panic!("base crosses a removed subarc")
                };
            }
        }
        self.arcs.sort_by(|a, b| a.lo.cmp(&b.lo));
    }

    /// Performs all long-band merges; returns how many arcs were absorbed.
    pub(crate) fn merge_all(&mut self) -> usize {
        let mut n = 0;
        'again: loop {
            for ai in 0..self.arcs.len() {
                let arc = &self.arcs[ai];
                let on: Vec<(usize, BaseSide)> = self
                    .bands
                    .iter()
                    .enumerate()
                    .flat_map(|(i, b)| [(i, BaseSide::Bottom), (i, BaseSide::Top)].into_iter().filter(move |(_, s)| b.base(*s).arc == arc.id))
                    .collect();
                if on.len() != 2 || on[0].0 == on[1].0 {
                    continue;
                }
                let full = |(i, s): (usize, BaseSide)| {
                    let b = self.bands[i].base(s);
                    b.lo == arc.lo && b.hi == arc.hi
                };
                if !full(on[0]) || !full(on[1]) {
                    continue;
                }
                let (b1, b2) = (&self.bands[on[0].0], &self.bands[on[1].0]);
                let length_form = b1.length_form.iter().zip(&b2.length_form).map(|(x, y)| x + y).collect();
                let merged = Band {
                    id: self.next_band,
                    bottom: b1.base(on[0].1.other()).clone(),
                    top: b2.base(on[1].1.other()).clone(),
                    length: &b1.length + &b2.length,
                    length_form,
                };
                self.next_band += 1;
                let (i1, i2) = (on[0].0, on[1].0);
                let mut k = 0;
                self.bands.retain(|_| {
                    k += 1;
                    k - 1 != i1 && k - 1 != i2
                });
                self.bands.push(merged);
                self.arcs.remove(ai);
                n += 1;
                continue 'again;
            }
            return n;
        }
    }

    /// Deletes dead subarcs (meeting no base), merging after each deletion.
    pub(crate) fn delete_dead(&mut self) -> usize {
        let mut n = 0;
        while let Some(d) = find_free_subarcs(self).into_iter().find(|f| f.is_dead()) {
            self.collapse_unchecked(&d);
            self.merge_all();
            n += 1;
        }
        n
    }

    /// Sorted distinct points of each arc (arc endpoints and base endpoints), in arc order.
    pub fn arc_points(&self) -> Vec<Vec<Pt>> {
        self.arcs
            .iter()
            .map(|a| {
                sorted_points(
                    a,
                    self.bands.iter().flat_map(|b| [&b.bottom, &b.top]).filter(|bb| bb.arc == a.id),
                )
            })
            .collect()
    }

    /// Indicator of `[lo, hi]` on arc `id` over the segments of [`BandComplex::arc_points`].
    pub fn segment_indicator(&self, id: usize, lo: &Pt, hi: &Pt) -> Vec<Rational> {
        let pts = self.arc_points();
        let mut v = Vec::new();
        for (a, ps) in self.arcs.iter().zip(&pts) {
            for w in ps.windows(2) {
                let inside = a.id == id && *lo <= w[0] && w[1] <= *hi;
                v.push(if inside { Rational::one() } else { Rational::zero() });
            }
        }
        v
    }

    pub fn canonical(&self) -> Canonical {
        let pts = self.arc_points();
        let arc_index: HashMap<usize, usize> = self.arcs.iter().enumerate().map(|(i, a)| (a.id, i)).collect();
        let key = |b: &Base| {
            let ai = arc_index[&b.arc];
            let p = &pts[ai];
            (ai, p.binary_search(&b.lo).expect("base point"), p.binary_search(&b.hi).expect("base point"))
        };
        let keys: Vec<[(usize, usize, usize); 2]> = self
            .bands
            .iter()
            .map(|b| {
                let mut k = [key(&b.bottom), key(&b.top)];
                k.sort();
                k
            })
            .collect();
        let mut band_order: Vec<usize> = (0..self.bands.len()).collect();
        band_order.sort_by(|&i, &j| keys[i].cmp(&keys[j]).then(i.cmp(&j)));
        let segments = pts.iter().flat_map(|p| p.windows(2).map(|w| &w[1].v - &w[0].v)).collect();
        Canonical {
            arc_sizes: pts.iter().map(|p| p.len()).collect(),
            bands: band_order.iter().map(|&i| keys[i]).collect(),
            segments,
            band_order,
        }
    }

    /// Sets every band's length form to a unit vector, following `order` (band indices).
    pub fn reset_length_forms(&mut self, order: &[usize]) {
        let n = order.len();
        for (k, &i) in order.iter().enumerate() {
            let mut f = vec![Rational::zero(); n];
            f[k] = Rational::one();
            self.bands[i].length_form = f;
        }
    }

    pub fn contains_point(&self, x: &FieldElement) -> bool {
        self.arcs.iter().any(|a| a.lo.v <= *x && *x <= a.hi.v)
    }

    /// Points joined to `x` by at most `depth` band crossings.
    pub fn orbit(&self, x: &FieldElement, depth: usize) -> HashSet<FieldElement> {
        let mut seen: HashMap<FieldElement, usize> = HashMap::from([(x.clone(), 0)]);
        let mut queue = VecDeque::from([x.clone()]);
        while let Some(p) = queue.pop_front() {
            let d = seen[&p];
            if d == depth {
                continue;
            }
            for b in &self.bands {
                for side in [BaseSide::Bottom, BaseSide::Top] {
                    let base = b.base(side);
                    if base.lo.v <= p && p <= base.hi.v {
                        let q = b.carry(&p, side);
                        if !seen.contains_key(&q) {
                            seen.insert(q.clone(), d + 1);
                            queue.push_back(q);
                        }
                    }
                }
            }
        }
        seen.into_keys().collect()
    }

    pub fn to_json(&self) -> Value {
        let pt = |x: &Pt| serde_json::to_value(x.v.poly()).unwrap();
        let base = |b: &Base| json!({"arc": b.arc, "lo": pt(&b.lo), "hi": pt(&b.hi)});
        let (lo, hi) = self.field.root_interval();
        json!({
            "field": {"modulus": self.field.modulus(), "root_interval": [rat_to_string(lo), rat_to_string(hi)]},
            "supports": self.arcs.iter().map(|a| json!({"id": a.id, "lo": pt(&a.lo), "hi": pt(&a.hi), "approx": [a.lo.v.approx_f64(), a.hi.v.approx_f64()]})).collect::<Vec<_>>(),
            "bands": self.bands.iter().map(|b| json!({
                "id": b.id,
                "bottom": base(&b.bottom),
                "top": base(&b.top),
                "width": pt(&Pt::new(b.width())),
                "width_approx": b.width().approx_f64(),
                "length": rat_to_string(&b.length),
            })).collect::<Vec<_>>(),
        })
    }

    /// Reads [`BandComplex::to_json`] output and checks the complex invariants.
    pub fn from_json(v: &Value) -> Result<BandComplex, RipsError> {
        let err = |m: &str| RipsError::Json(m.to_string());
        let fj = v.get("field").ok_or_else(|| err("missing field"))?;
        let modulus: Poly = serde_json::from_value(fj["modulus"].clone()).map_err(|e| err(&e.to_string()))?;
        let ri: Vec<String> = serde_json::from_value(fj["root_interval"].clone()).map_err(|e| err(&e.to_string()))?;
        if ri.len() != 2 {
            return Err(err("root_interval needs two bounds"));
        }
        let q = |s: &str| parse_rational(s).map_err(|e| err(&e.to_string()));
        let field = NumberField::new(&modulus, q(&ri[0])?, q(&ri[1])?).map_err(|e| err(&e.to_string()))?;
        let pt = |x: &Value| -> Result<Pt, RipsError> {
            let p: Poly = serde_json::from_value(x.clone()).map_err(|e| err(&e.to_string()))?;
            Ok(Pt::new(field.element(p)))
        };
        let id = |x: &Value| x.as_u64().map(|n| n as usize).ok_or_else(|| err("bad id"));
        let base = |x: &Value| -> Result<Base, RipsError> { Ok(Base { arc: id(&x["arc"])?, lo: pt(&x["lo"])?, hi: pt(&x["hi"])? }) };
        let mut arcs = Vec::new();
        for a in v["supports"].as_array().ok_or_else(|| err("missing supports"))? {
            arcs.push(SupportArc { id: id(&a["id"])?, lo: pt(&a["lo"])?, hi: pt(&a["hi"])? });
        }
        let mut bands = Vec::new();
        for b in v["bands"].as_array().ok_or_else(|| err("missing bands"))? {
            let length = q(b["length"].as_str().ok_or_else(|| err("bad length"))?)?;
            bands.push(Band { id: id(&b["id"])?, bottom: base(&b["bottom"])?, top: base(&b["top"])?, length, length_form: Vec::new() });
        }
        arcs.sort_by(|a, b| a.lo.cmp(&b.lo));
        let next_arc = arcs.iter().map(|a| a.id + 1).max().unwrap_or(0);
        let next_band = bands.iter().map(|b| b.id + 1).max().unwrap_or(0);
        let x = BandComplex { arcs, bands, next_arc, next_band, field };
        x.check().map_err(|m| err(&m))?;
        Ok(x)
    }

    /// Bases inside their arcs, equal base widths, positive widths and lengths.
    pub fn check(&self) -> Result<(), String> {
        for a in &self.arcs {
            if a.lo >= a.hi {
                return Err(format!("arc {} is empty", a.id));
            }
        }
        for b in &self.bands {
            if b.width().sign() <= 0 || b.length <= Rational::zero() {
                return Err(format!("band {} has non-positive width or length", b.id));
            }
            if b.bottom.hi.v.clone() - &b.bottom.lo.v != &b.top.hi.v - &b.top.lo.v {
                return Err(format!("band {}: bases differ in width", b.id));
            }
            for base in [&b.bottom, &b.top] {
                let arc = self.arc_by_id(base.arc).ok_or_else(|| format!("band {}: unknown arc", b.id))?;
                if base.lo < arc.lo || arc.hi < base.hi {
                    return Err(format!("band {}: base leaves its arc", b.id));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use iis_core::systems::{build_system, field_lambda1, SystemId};
    use iis_core::{Interval, IntervalPair};
    use numberfield::rat;

    fn q(n: i64, d: i64) -> FieldElement {
        field_lambda1().from_rational(rat(n, d))
    }

    fn pt(n: i64, d: i64) -> Pt {
        Pt::new(q(n, d))
    }

    /// One arc `[0, 1]` and bands given as `((bottom lo, hi), (top lo, hi), length)` in 12ths.
    fn one_arc(bands: &[((i64, i64), (i64, i64), i64)]) -> BandComplex {
        let arc = SupportArc { id: 0, lo: pt(0, 1), hi: pt(1, 1) };
        let bands = bands
            .iter()
            .enumerate()
            .map(|(i, &((a, b), (c, d), l))| Band {
                id: i,
                bottom: Base { arc: 0, lo: pt(a, 12), hi: pt(b, 12) },
                top: Base { arc: 0, lo: pt(c, 12), hi: pt(d, 12) },
                length: rat(l, 1),
                length_form: Vec::new(),
            })
            .collect();
        BandComplex { arcs: vec![arc], bands, next_arc: 1, next_band: 99, field: field_lambda1() }
    }

    /// Independent oracle: coverage multiplicity at the midpoint of each
    /// elementary segment, merged where the single cover repeats.
    fn sweep_oracle(x: &BandComplex) -> Vec<(f64, f64, Option<usize>)> {
        let mut out: Vec<(f64, f64, Option<usize>)> = Vec::new();
        for arc in &x.arcs {
            let mut ends: Vec<f64> = vec![arc.lo.v.to_f64(), arc.hi.v.to_f64()];
            for b in &x.bands {
                for base in [&b.bottom, &b.top] {
                    if base.arc == arc.id {
                        ends.push(base.lo.v.to_f64());
                        ends.push(base.hi.v.to_f64());
                    }
                }
            }
            ends.sort_by(f64::total_cmp);
            ends.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
            let mut prev: Option<(f64, f64, Option<usize>)> = None;
            for w in ends.windows(2) {
                let m = 0.5 * (w[0] + w[1]);
                let cov: Vec<usize> = x
                    .bands
                    .iter()
                    .flat_map(|b| [(b.id, &b.bottom), (b.id, &b.top)])
                    .filter(|(_, base)| base.arc == arc.id && base.lo.v.to_f64() < m && m < base.hi.v.to_f64())
                    .map(|(id, _)| id)
                    .collect();
                if cov.len() > 1 {
                    out.extend(prev.take());
                    continue;
                }
                let key = cov.first().copied();
                match &mut prev {
                    Some(p) if p.2 == key && (p.1 - w[0]).abs() < 1e-12 => p.1 = w[1],
                    _ => {
                        out.extend(prev.take());
                        prev = Some((w[0], w[1], key));
                    }
                }
            }
            out.extend(prev);
        }
        out
    }

    fn summary(free: &[FreeSubarc]) -> Vec<(f64, f64, Option<usize>)> {
        free.iter().map(|f| (f.lo.v.to_f64(), f.hi.v.to_f64(), f.base.map(|b| b.0))).collect()
    }

    fn same(a: &[(f64, f64, Option<usize>)], b: &[(f64, f64, Option<usize>)]) -> bool {
        a.len() == b.len()
            && a.iter().zip(b).all(|(x, y)| (x.0 - y.0).abs() < 1e-12 && (x.1 - y.1).abs() < 1e-12 && x.2 == y.2)
    }

    #[test]
    fn complex_of_s1_has_three_unit_bands() {
        let s = build_system(SystemId::S1);
        let x = complex_from_iis(&s);
        let p = SystemId::S1.params();
        assert_eq!(x.arcs.len(), 1);
        assert_eq!(x.bands.len(), 3);
        for (b, w) in x.bands.iter().zip(&p) {
            assert_eq!(b.width(), *w);
            assert_eq!(b.length, rat(1, 1));
        }
        assert!(x.is_balanced());
        x.check().unwrap();
    }

    #[test]
    fn empty_system_gives_bare_support() {
        let iv = Interval::new(q(0, 1), q(1, 1));
        let s = Iis::new(iv, Vec::new()).unwrap();
        let x = complex_from_iis(&s);
        assert_eq!(x.arcs.len(), 1);
        assert!(x.bands.is_empty());
        // the whole arc is dead
        let free = find_free_subarcs(&x);
        assert_eq!(free.len(), 1);
        assert!(free[0].is_dead());
    }

    #[test]
    fn free_subarcs_of_s1_match_the_sweep() {
        let x = complex_from_iis(&build_system(SystemId::S1));
        let free = find_free_subarcs(&x);
        assert!(!free.is_empty());
        assert!(same(&summary(&free), &sweep_oracle(&x)));
    }

    #[test]
    fn double_tiling_has_no_free_subarc() {
        let x = one_arc(&[((0, 6), (6, 12), 1), ((0, 4), (8, 12), 1), ((4, 8), (4, 8), 1)]);
        assert!(find_free_subarcs(&x).is_empty());
        assert_eq!(crate::rips_step(&x, crate::Policy::Sweep).unwrap_err(), RipsError::Halted);
    }

    #[test]
    fn single_band_leaves_overlap_complements() {
        // bottom [0, 6], top [3, 9] in twelfths
        let x = one_arc(&[((0, 6), (3, 9), 1)]);
        let free = find_free_subarcs(&x);
        assert!(same(&summary(&free), &sweep_oracle(&x)));
        let s = summary(&free);
        assert_eq!(s.len(), 3);
        assert_eq!(s[0].2, Some(0));
        assert_eq!(s[1].2, Some(0));
        assert_eq!(s[2].2, None);
    }

    #[test]
    fn full_base_collapse_deletes_the_band() {
        // band 0 bottom [0, 3] is free; band 1 covers [3, 12] twice
        let x = one_arc(&[((0, 3), (9, 12), 1), ((3, 12), (3, 12), 1)]);
        let fa = find_free_subarcs(&x).into_iter().find(|f| f.base == Some((0, BaseSide::Bottom))).unwrap();
        let y = collapse_free_subarc(&x, &fa).unwrap();
        assert!(y.band_by_id(0).is_none());
        assert_eq!(y.arcs.len(), 1);
        assert_eq!(y.arcs[0].lo.v, q(3, 12));
        y.check().unwrap();
    }

    #[test]
    fn interior_collapse_leaves_two_flanking_bands() {
        // band 0 bottom [0, 6] top [6, 12]; band 1 covers [0, 3] and [9, 12] except (4, 5) of band 0's bottom
        let x = one_arc(&[((0, 6), (6, 12), 1), ((0, 4), (5, 9), 1), ((9, 12), (6, 9), 1)]);
        let fa = FreeSubarc { arc: 0, lo: pt(4, 12), hi: pt(5, 12), base: Some((0, BaseSide::Bottom)) };
        let y = collapse_free_subarc(&x, &fa).unwrap();
        assert_eq!(y.arcs.len(), 2);
        let widths: Vec<f64> = y.bands.iter().map(|b| b.width().to_f64() * 12.0).collect();
        assert_eq!(y.bands.len(), 4);
        assert!((widths[0] - 4.0).abs() < 1e-9 && (widths[1] - 1.0).abs() < 1e-9, "{widths:?}");
        // the second remnant gets a fresh id, the first keeps the old one
        assert_eq!(y.bands[0].id, 0);
        assert_ne!(y.bands[1].id, 0);
        // width mass and support both drop by |J|
        assert_eq!(&x.width_mass() - &y.width_mass(), q(1, 12));
        assert_eq!(&x.support_measure() - &y.support_measure(), q(1, 12));
        y.check().unwrap();
    }

    #[test]
    fn collapse_rejects_covered_and_partial_subarcs() {
        let x = one_arc(&[((0, 6), (3, 9), 1)]);
        let covered = FreeSubarc { arc: 0, lo: pt(4, 12), hi: pt(5, 12), base: Some((0, BaseSide::Bottom)) };
        assert_eq!(collapse_free_subarc(&x, &covered).unwrap_err(), RipsError::NotFree);
        let partial = FreeSubarc { arc: 0, lo: pt(1, 12), hi: pt(2, 12), base: Some((0, BaseSide::Bottom)) };
        assert_eq!(collapse_free_subarc(&x, &partial).unwrap_err(), RipsError::NotMaximal);
    }

    fn chain(n: usize) -> BandComplex {
        // arcs [0,1], [2,3], ..., band i from arc i to arc i+1, plus a half-width band between the end arcs
        let f = field_lambda1();
        let arcs: Vec<SupportArc> =
            (0..=n).map(|i| SupportArc { id: i, lo: pt(2 * i as i64, 1), hi: pt(2 * i as i64 + 1, 1) }).collect();
        let base = |i: usize| Base { arc: i, lo: pt(2 * i as i64, 1), hi: pt(2 * i as i64 + 1, 1) };
        let mut bands: Vec<Band> = (0..n)
            .map(|i| Band { id: i, bottom: base(i), top: base(i + 1), length: rat(1, 1), length_form: Vec::new() })
            .collect();
        let half = |i: usize| Base { arc: i, lo: pt(4 * i as i64, 2), hi: pt(4 * i as i64 + 1, 2) };
        bands.push(Band { id: n, bottom: half(0), top: half(n), length: rat(1, 1), length_form: Vec::new() });
        BandComplex { arcs, bands, next_arc: n + 1, next_band: n + 1, field: f }
    }

    #[test]
    fn chains_merge_with_summed_length() {
        for n in [2, 3] {
            let x = chain(n);
            let y = merge_long_bands(&x);
            assert_eq!(y.arcs.len(), 2, "n = {n}");
            let mut lengths: Vec<Rational> = y.bands.iter().map(|b| b.length.clone()).collect();
            lengths.sort();
            assert_eq!(lengths, vec![rat(1, 1), rat(n as i64, 1)]);
            let total: Rational = x.bands.iter().map(|b| b.length.clone()).sum();
            let after: Rational = y.bands.iter().map(|b| b.length.clone()).sum();
            assert_eq!(total, after);
            y.check().unwrap();
        }
    }

    #[test]
    fn merge_without_chains_is_identity() {
        let x = complex_from_iis(&build_system(SystemId::S1));
        let y = merge_long_bands(&x);
        assert_eq!(y.canonical(), x.canonical());
    }

    #[test]
    fn json_round_trip_after_steps() {
        let x = complex_from_iis(&build_system(SystemId::S2));
        let (hist, _) = crate::run_machine(&x, 7, crate::Policy::Sweep);
        for y in &hist {
            let back = BandComplex::from_json(&y.to_json()).unwrap();
            assert_eq!(back.canonical(), y.canonical());
            assert_eq!(back.bands.iter().map(|b| &b.length).collect::<Vec<_>>(), y.bands.iter().map(|b| &b.length).collect::<Vec<_>>());
        }
    }

    #[test]
    fn rejects_bases_of_unequal_width() {
        let mut v = one_arc(&[((0, 6), (6, 12), 1)]).to_json();
        v["bands"][0]["top"]["lo"] = serde_json::to_value(Poly::constant(rat(7, 12))).unwrap();
        assert!(BandComplex::from_json(&v).is_err());
    }

    #[test]
    fn pair_with_overlap_on_real_field() {
        let f = field_lambda1();
        let l = f.gen();
        let one = f.one();
        let s = Iis::new(
            Interval::new(f.zero(), one.clone()),
            vec![IntervalPair::new(Interval::new(f.zero(), &one - &l), Interval::new(l.clone(), one.clone()))],
        )
        .unwrap();
        let x = complex_from_iis(&s);
        assert!(same(&summary(&find_free_subarcs(&x)), &sweep_oracle(&x)));
    }
}

use std::fmt;
use std::sync::Arc;

use numberfield::{parse_rational, FieldElement, FieldHandle, NumberField, Poly};
use serde::{Deserialize, Serialize};

use crate::IisError;

/// Closed interval `[lo, hi]` with exact endpoints.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: FieldElement,
    pub hi: FieldElement,
}

impl Interval {
    pub fn new(lo: FieldElement, hi: FieldElement) -> Self {
        Interval { lo, hi }
    }

    pub fn width(&self) -> FieldElement {
        &self.hi - &self.lo
    }

    /// Closed membership: both endpoints belong.
    pub fn contains(&self, x: &FieldElement) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_interval(&self, o: &Interval) -> bool {
        self.lo <= o.lo && o.hi <= self.hi
    }

    pub fn shift(&self, t: &FieldElement) -> Interval {
        Interval::new(&self.lo + t, &self.hi + t)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.6}, {:.6}]", self.lo.approx_f64(), self.hi.approx_f64())
    }
}

/// Which member of a pair: the first (`[a, b]`) or the second (`[c, d]`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Member {
    Left,
    Right,
}

impl Member {
    pub fn other(self) -> Member {
        match self {
            Member::Left => Member::Right,
            Member::Right => Member::Left,
        }
    }
}

/// End of the support interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }

    pub fn letter(self) -> char {
        match self {
            Side::Left => 'L',
            Side::Right => 'R',
        }
    }
}

/// A subinterval addressed by pair index and member.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Slot {
    pub pair: usize,
    pub member: Member,
}

impl Slot {
    pub fn new(pair: usize, member: Member) -> Self {
        Slot { pair, member }
    }
}

/// `[a, b] <-> [c, d]`, glued by the translation `x -> x - a + c`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntervalPair {
    pub left: Interval,
    pub right: Interval,
}

impl IntervalPair {
    pub fn new(left: Interval, right: Interval) -> Self {
        IntervalPair { left, right }
    }

    pub fn get(&self, m: Member) -> &Interval {
        match m {
            Member::Left => &self.left,
            Member::Right => &self.right,
        }
    }

    pub fn get_mut(&mut self, m: Member) -> &mut Interval {
        match m {
            Member::Left => &mut self.left,
            Member::Right => &mut self.right,
        }
    }

    pub fn width(&self) -> FieldElement {
        self.left.width()
    }

    /// Translation carrying the left member onto the right one.
    pub fn shift(&self) -> FieldElement {
        &self.right.lo - &self.left.lo
    }
}

/// Result of [`Iis::validate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Validation {
    pub balanced: bool,
    pub symmetric: bool,
}

/// Interval identification system.
#[derive(Clone, Debug)]
pub struct Iis {
    pub support: Interval,
    pub pairs: Vec<IntervalPair>,
    field: Arc<NumberField>,
}

impl PartialEq for Iis {
    fn eq(&self, o: &Self) -> bool {
        self.support == o.support && self.pairs == o.pairs
    }
}

impl Iis {
    /// Checks width matching and containment in the support.
    pub fn new(support: Interval, pairs: Vec<IntervalPair>) -> Result<Iis, IisError> {
        let field = support.lo.field().clone();
        if support.lo >= support.hi {
            return Err(IisError::InvalidSystem("support must have positive length".into()));
        }
        for (i, p) in pairs.iter().enumerate() {
            for iv in [&p.left, &p.right] {
                if !iv.lo.field().same(&field) || !iv.hi.field().same(&field) {
                    return Err(IisError::InvalidSystem(format!("pair {i}: endpoints from another field")));
                }
                if iv.lo >= iv.hi {
                    return Err(IisError::InvalidSystem(format!("pair {i}: empty or reversed interval")));
                }
                if !support.contains_interval(iv) {
                    return Err(IisError::InvalidSystem(format!("pair {i}: interval {iv} leaves the support")));
                }
            }
            if p.left.width() != p.right.width() {
                return Err(IisError::InvalidSystem(format!("pair {i}: widths differ")));
            }
        }
        Ok(Iis { support, pairs, field })
    }

    /// Builds without checks; used internally where invariants are known to hold.
    pub(crate) fn from_parts(support: Interval, pairs: Vec<IntervalPair>) -> Iis {
        let field = support.lo.field().clone();
        Iis { support, pairs, field }
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn order(&self) -> usize {
        self.pairs.len()
    }

    pub fn slot(&self, s: Slot) -> &Interval {
        self.pairs[s.pair].get(s.member)
    }

    pub fn slots(&self) -> impl Iterator<Item = Slot> + '_ {
        (0..self.pairs.len()).flat_map(|i| [Slot::new(i, Member::Left), Slot::new(i, Member::Right)])
    }

    pub fn length(&self) -> FieldElement {
        self.support.width()
    }

    /// All endpoints of subintervals ("critical points"), sorted and deduplicated.
    pub fn critical_points(&self) -> Vec<FieldElement> {
        let mut v: Vec<FieldElement> = self
            .pairs
            .iter()
            .flat_map(|p| [p.left.lo.clone(), p.left.hi.clone(), p.right.lo.clone(), p.right.hi.clone()])
            .collect();
        v.sort();
        v.dedup();
        v
    }

    /// Balanced: the extreme endpoints are the support ends and the widths sum
    /// to the support length. Symmetric: each pair, in one of its two
    /// orientations, satisfies `a - A = B - d`.
    pub fn validate(&self) -> Validation {
        let (a, b) = (&self.support.lo, &self.support.hi);
        let cp = self.critical_points();
        let total = self.pairs.iter().fold(self.field.zero(), |acc, p| &acc + &p.width());
        let balanced = !cp.is_empty() && cp[0] == *a && cp[cp.len() - 1] == *b && total == self.length();
        let symmetric = self.pairs.iter().all(|p| {
            (&p.left.lo - a) == (b - &p.right.hi) || (&p.right.lo - a) == (b - &p.left.hi)
        });
        Validation { balanced, symmetric }
    }

    /// `k * S + t`.
    pub fn affine(&self, k: &FieldElement, t: &FieldElement) -> Iis {
        let map = |iv: &Interval| Interval::new(&(&iv.lo * k) + t, &(&iv.hi * k) + t);
        Iis::from_parts(map(&self.support), self.pairs.iter().map(|p| IntervalPair::new(map(&p.left), map(&p.right))).collect())
    }

    /// The system rescaled to support `[0, 1]`, with each pair's members and
    /// the pair list sorted. Equal canonical forms mean the systems agree up
    /// to an orientation-preserving affine change of coordinates.
    pub fn normalized(&self) -> Vec<[[FieldElement; 2]; 2]> {
        let l = self.length();
        let n = |x: &FieldElement| &(x - &self.support.lo) / &l;
        let mut ps: Vec<[[FieldElement; 2]; 2]> = self
            .pairs
            .iter()
            .map(|p| {
                let mut m = [[n(&p.left.lo), n(&p.left.hi)], [n(&p.right.lo), n(&p.right.hi)]];
                m.sort();
                m
            })
            .collect();
        ps.sort();
        ps
    }

    /// Pairs equal up to order and member orientation.
    pub fn same_as(&self, o: &Iis) -> bool {
        let key = |s: &Iis| {
            let mut v: Vec<[[FieldElement; 2]; 2]> = s
                .pairs
                .iter()
                .map(|p| {
                    let mut m = [[p.left.lo.clone(), p.left.hi.clone()], [p.right.lo.clone(), p.right.hi.clone()]];
                    m.sort();
                    m
                })
                .collect();
            v.sort();
            v
        };
        self.support == o.support && key(self) == key(o)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let pt = |x: &FieldElement| serde_json::to_value(x.poly()).unwrap();
        let iv = |i: &Interval| serde_json::json!([pt(&i.lo), pt(&i.hi)]);
        let (lo, hi) = self.field.root_interval();
        serde_json::json!({
            "field": {
                "modulus": self.field.modulus(),
                "root_interval": [numberfield::rat_to_string(lo), numberfield::rat_to_string(hi)],
            },
            "support": iv(&self.support),
            "pairs": self.pairs.iter().map(|p| serde_json::json!({"left": iv(&p.left), "right": iv(&p.right)})).collect::<Vec<_>>(),
        })
    }

    /// Reads the JSON layout written by [`Iis::to_json`]. Points may be
    /// rational strings (`"3/10"`) or coefficient arrays in the generator.
    pub fn from_json(v: &serde_json::Value) -> Result<Iis, IisError> {
        let err = |m: &str| IisError::Json(m.to_string());
        let fj = v.get("field").ok_or_else(|| err("missing field"))?;
        let modulus: Poly = serde_json::from_value(fj.get("modulus").cloned().ok_or_else(|| err("missing modulus"))?)
            .map_err(|e| err(&e.to_string()))?;
        let ri = fj.get("root_interval").and_then(|r| r.as_array()).ok_or_else(|| err("missing root_interval"))?;
        let bound = |i: usize| -> Result<numberfield::Rational, IisError> {
            let s = ri.get(i).and_then(|x| x.as_str()).ok_or_else(|| err("bad root_interval"))?;
            parse_rational(s).map_err(|e| err(&e.to_string()))
        };
        let field = NumberField::new(&modulus, bound(0)?, bound(1)?).map_err(|e| err(&e.to_string()))?;
        let point = |x: &serde_json::Value| -> Result<FieldElement, IisError> {
            match x {
                serde_json::Value::String(s) => Ok(field.from_rational(parse_rational(s).map_err(|e| err(&e.to_string()))?)),
                serde_json::Value::Array(_) => {
                    let p: Poly = serde_json::from_value(x.clone()).map_err(|e| err(&e.to_string()))?;
                    Ok(field.element(p))
                }
                _ => Err(err("point must be a string or an array")),
            }
        };
        let interval = |x: &serde_json::Value| -> Result<Interval, IisError> {
            let a = x.as_array().filter(|a| a.len() == 2).ok_or_else(|| err("interval must have two points"))?;
            Ok(Interval::new(point(&a[0])?, point(&a[1])?))
        };
        let support = interval(v.get("support").ok_or_else(|| err("missing support"))?)?;
        let pairs = v
            .get("pairs")
            .and_then(|p| p.as_array())
            .ok_or_else(|| err("missing pairs"))?
            .iter()
            .map(|p| {
                Ok(IntervalPair::new(
                    interval(p.get("left").ok_or_else(|| err("pair without left"))?)?,
                    interval(p.get("right").ok_or_else(|| err("pair without right"))?)?,
                ))
            })
            .collect::<Result<Vec<_>, IisError>>()?;
        Iis::new(support, pairs)
    }
}

impl fmt::Display for Iis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.support)?;
        for p in &self.pairs {
            write!(f, "; {} <-> {}", p.left, p.right)?;
        }
        write!(f, ")")
    }
}

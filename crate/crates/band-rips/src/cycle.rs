use std::collections::HashMap;

use numberfield::{rat, rat_to_f64, FieldElement, FieldHandle, RatMatrix, Rational};
use num_traits::{One, Zero};
use serde::Serialize;

use crate::complex::{BandComplex, BaseSide, Pt};
use crate::machine::{rips_step, Policy};
use crate::RipsError;

/// Picks one band of a complex.
#[derive(Clone, Debug)]
pub enum BandSelector {
    /// The band whose width is exactly this value (times the evaluation scale).
    Width(FieldElement),
    /// The `k`-th widest band, from 0.
    Rank(usize),
    /// Position `k` in canonical order.
    Canonical(usize),
}

impl BandSelector {
    fn resolve(&self, x: &BandComplex, scale: &FieldElement) -> Result<usize, RipsError> {
        match self {
            BandSelector::Width(w) => {
                let target = w * scale;
                let hits: Vec<usize> = (0..x.bands.len()).filter(|&i| x.bands[i].width() == target).collect();
                match hits.as_slice() {
                    [i] => Ok(*i),
                    _ => Err(RipsError::Chart(format!("{} bands of width {:.6}", hits.len(), target.approx_f64()))),
                }
            }
            BandSelector::Rank(k) => {
                let mut idx: Vec<usize> = (0..x.bands.len()).collect();
                idx.sort_by(|&i, &j| x.bands[j].width().cmp(&x.bands[i].width()));
                idx.get(*k).copied().ok_or_else(|| RipsError::Chart(format!("no band of rank {k}")))
            }
            BandSelector::Canonical(k) => x
                .canonical()
                .band_order
                .get(*k)
                .copied()
                .ok_or_else(|| RipsError::Chart(format!("no band at canonical position {k}"))),
        }
    }
}

/// A linear functional on the segment lengths of a complex, given as an
/// interval inside one support arc.
#[derive(Clone, Debug)]
pub enum Functional {
    /// Width of the band.
    Width(BandSelector),
    /// Gap on a shared arc from the end of a base of the first band to the
    /// start of a later base of the second.
    Gap(BandSelector, BandSelector),
    /// Distance from the arc start to the `k`-th base (by position) of the band.
    Offset(BandSelector, usize),
    /// Segment `j` in canonical order.
    Segment(usize),
}

impl Functional {
    fn interval(&self, x: &BandComplex, scale: &FieldElement) -> Result<(usize, Pt, Pt), RipsError> {
        match self {
            Functional::Width(s) => {
                let b = &x.bands[s.resolve(x, scale)?].bottom;
                Ok((b.arc, b.lo.clone(), b.hi.clone()))
            }
            Functional::Gap(s1, s2) => {
                let (b1, b2) = (&x.bands[s1.resolve(x, scale)?], &x.bands[s2.resolve(x, scale)?]);
                for k1 in [BaseSide::Bottom, BaseSide::Top] {
                    for k2 in [BaseSide::Bottom, BaseSide::Top] {
                        let (p, q) = (b1.base(k1), b2.base(k2));
                        if p.arc == q.arc && p.hi <= q.lo {
                            return Ok((p.arc, p.hi.clone(), q.lo.clone()));
                        }
                    }
                }
                Err(RipsError::Chart("bands share no arc in the required order".into()))
            }
            Functional::Offset(s, k) => {
                let b = &x.bands[s.resolve(x, scale)?];
                let mut bases = [&b.bottom, &b.top];
                bases.sort_by(|p, q| p.lo.cmp(&q.lo));
                let base = bases.get(*k).ok_or_else(|| RipsError::Chart("offset index".into()))?;
                let arc = x.arc_by_id(base.arc).expect("arc of a base");
                Ok((arc.id, arc.lo.clone(), base.lo.clone()))
            }
            Functional::Segment(j) => {
                let pts = x.arc_points();
                let mut n = 0;
                for (a, ps) in x.arcs.iter().zip(&pts) {
                    if *j < n + ps.len() - 1 {
                        let i = j - n;
                        return Ok((a.id, ps[i].clone(), ps[i + 1].clone()));
                    }
                    n += ps.len() - 1;
                }
                Err(RipsError::Chart(format!("no segment {j}")))
            }
        }
    }

    /// Exact value on `x`.
    pub fn value(&self, x: &BandComplex, scale: &FieldElement) -> Result<FieldElement, RipsError> {
        let (_, lo, hi) = self.interval(x, scale)?;
        Ok(&hi.v - &lo.v)
    }

    /// Linear form carried by a formal complex.
    fn form(&self, x: &BandComplex, scale: &FieldElement, dim: usize) -> Result<Vec<Rational>, RipsError> {
        let (_, lo, hi) = self.interval(x, scale)?;
        let mut f = hi.sub(&lo).form;
        f.resize(dim, Rational::zero());
        Ok(f)
    }
}

/// Named coordinates on a complex: width functionals plus the bands whose
/// lengths are tracked.
#[derive(Clone, Debug)]
pub struct Chart {
    pub labels: Vec<String>,
    pub functionals: Vec<Functional>,
    pub length_labels: Vec<String>,
    pub length_bands: Vec<BandSelector>,
}

impl Chart {
    pub fn values(&self, x: &BandComplex, scale: &FieldElement) -> Result<Vec<FieldElement>, RipsError> {
        self.functionals.iter().map(|f| f.value(x, scale)).collect()
    }

    pub fn lengths(&self, x: &BandComplex, scale: &FieldElement) -> Result<Vec<Rational>, RipsError> {
        self.length_bands.iter().map(|s| Ok(x.bands[s.resolve(x, scale)?].length.clone())).collect()
    }
}

/// Linear relations every complex of this shape satisfies: equal base widths
/// per band and, when it holds, the balance `2 * support = sum of bases`.
fn relations(x: &BandComplex) -> Vec<Vec<Rational>> {
    let mut rows: Vec<Vec<Rational>> = x
        .bands
        .iter()
        .map(|b| {
            let p = x.segment_indicator(b.bottom.arc, &b.bottom.lo, &b.bottom.hi);
            let q = x.segment_indicator(b.top.arc, &b.top.lo, &b.top.hi);
            p.iter().zip(&q).map(|(a, c)| a - c).collect()
        })
        .collect();
    if x.is_balanced() {
        let m = x.canonical().segments.len();
        let mut bal = vec![rat(2, 1); m];
        for b in &x.bands {
            for base in [&b.bottom, &b.top] {
                for (t, s) in bal.iter_mut().zip(x.segment_indicator(base.arc, &base.lo, &base.hi)) {
                    *t -= s;
                }
            }
        }
        rows.push(bal);
    }
    rows
}

/// Copy of `x` whose points carry linear forms in the chart's parameters:
/// each segment length is solved from the shape relations plus
/// "functional i = parameter i".
pub fn formalize(x: &BandComplex, functionals: &[Functional]) -> Result<BandComplex, RipsError> {
    let one = x.field().one();
    let mut rows = relations(x);
    let nrel = rows.len();
    for f in functionals {
        let (arc, lo, hi) = f.interval(x, &one)?;
        rows.push(x.segment_indicator(arc, &lo, &hi));
    }
    let d = functionals.len();
    let mut rhs = RatMatrix::zeros(rows.len(), d);
    for i in 0..d {
        rhs.set(nrel + i, i, Rational::one());
    }
    let a = RatMatrix::from_rows(rows).map_err(|e| RipsError::Chart(e.to_string()))?;
    let sol = a
        .solve_exact(&rhs)
        .ok_or_else(|| RipsError::Chart("chart does not determine the segment lengths".into()))?;
    let pts = x.arc_points();
    let mut forms: HashMap<(usize, FieldElement), Vec<Rational>> = HashMap::new();
    let mut seg = 0;
    for (arc, ps) in x.arcs.iter().zip(&pts) {
        let mut acc = vec![Rational::zero(); d];
        forms.insert((arc.id, ps[0].v.clone()), acc.clone());
        for p in &ps[1..] {
            for (t, s) in acc.iter_mut().zip(sol.row(seg)) {
                *t += s;
            }
            seg += 1;
            forms.insert((arc.id, p.v.clone()), acc.clone());
        }
    }
    let mut y = x.clone();
    let tag = |arc: usize, p: &mut Pt| p.form = forms[&(arc, p.v.clone())].clone();
    for a in &mut y.arcs {
        tag(a.id, &mut a.lo);
        tag(a.id, &mut a.hi);
    }
    for b in &mut y.bands {
        for base in [&mut b.bottom, &mut b.top] {
            tag(base.arc, &mut base.lo);
            tag(base.arc, &mut base.hi);
        }
    }
    Ok(y)
}

/// Transition across `steps` iterations from `x`: `widths` maps chart values
/// on `x` (chart `from`) to chart values after the run (chart `to`, bands
/// matched at `scale`); `lengths` does the same for band lengths.
#[derive(Clone, Debug)]
pub struct Transition {
    pub widths: RatMatrix,
    pub lengths: RatMatrix,
    pub end: BandComplex,
}

pub fn track(
    x: &BandComplex,
    steps: usize,
    policy: Policy,
    from: &Chart,
    to: &Chart,
    scale: &FieldElement,
) -> Result<Transition, RipsError> {
    let one = x.field().one();
    let mut y = formalize(x, &from.functionals)?;
    let order = from.length_bands.iter().map(|s| s.resolve(x, &one)).collect::<Result<Vec<_>, _>>()?;
    if order.len() == y.bands.len() {
        y.reset_length_forms(&order);
    } else {
        // tracked bands get unit forms, the others none
        for b in &mut y.bands {
            b.length_form = vec![Rational::zero(); order.len()];
        }
        for (k, &i) in order.iter().enumerate() {
            y.bands[i].length_form[k] = Rational::one();
        }
    }
    for _ in 0..steps {
        y = rips_step(&y, policy)?.0;
    }
    let d = from.functionals.len();
    let rows = to.functionals.iter().map(|f| f.form(&y, scale, d)).collect::<Result<Vec<_>, _>>()?;
    let lrows = to
        .length_bands
        .iter()
        .map(|s| {
            let mut f = y.bands[s.resolve(&y, scale)?].length_form.clone();
            f.resize(order.len(), Rational::zero());
            Ok(f)
        })
        .collect::<Result<Vec<_>, RipsError>>()?;
    let m = |r: Vec<Vec<Rational>>, cols: usize| {
        if r.is_empty() {
            RatMatrix::zeros(0, cols)
        } else {
            RatMatrix::from_rows(r).expect("rectangular")
        }
    };
    Ok(Transition { widths: m(rows, d), lengths: m(lrows, order.len()), end: y })
}

/// Band widths in canonical order, completed greedily by canonical segments
/// until the segment lengths are determined.
pub fn generic_chart(x: &BandComplex) -> Chart {
    let one = x.field().one();
    let rel = relations(x);
    let m = x.canonical().segments.len();
    let nb = x.bands.len();
    let mut rows = rel.clone();
    let mut chosen = Vec::new();
    let mut labels = Vec::new();
    let rank = |r: &Vec<Vec<Rational>>| if r.is_empty() { 0 } else { RatMatrix::from_rows(r.clone()).unwrap().rank() };
    let mut cur = rank(&rows);
    let candidates = (0..nb)
        .map(|k| (Functional::Width(BandSelector::Canonical(k)), format!("w{k}")))
        .chain((0..m).map(|j| (Functional::Segment(j), format!("s{j}"))));
    for (f, label) in candidates {
        if cur == m {
            break;
        }
        let (arc, lo, hi) = f.interval(x, &one).expect("canonical functional");
        rows.push(x.segment_indicator(arc, &lo, &hi));
        let r = rank(&rows);
        if r > cur {
            cur = r;
            chosen.push(f);
            labels.push(label);
        } else {
            rows.pop();
        }
    }
    Chart {
        labels,
        functionals: chosen,
        length_labels: (0..nb).map(|k| format!("l{k}")).collect(),
        length_bands: (0..nb).map(BandSelector::Canonical).collect(),
    }
}

/// A detected cycle: after `prefix_steps` iterations, `period_steps` more
/// give the same shape with all lengths scaled by `contraction`.
#[derive(Clone, Debug)]
pub struct CycleReport {
    pub prefix_steps: usize,
    pub period_steps: usize,
    pub contraction: FieldElement,
    pub chart: Chart,
    /// Chart values at the start of the cycle.
    pub widths: Vec<FieldElement>,
    /// Band lengths at the start of the cycle, in chart order.
    pub lengths: Vec<Rational>,
    pub width_matrix: RatMatrix,
    pub length_matrix: RatMatrix,
    pub start: BandComplex,
    pub policy: Policy,
}

#[derive(Serialize)]
struct CycleJson {
    prefix_steps: usize,
    period_steps: usize,
    contraction: serde_json::Value,
    contraction_approx: f64,
    chart: Vec<String>,
    widths_approx: Vec<f64>,
    lengths: Vec<String>,
    width_matrix: RatMatrix,
    length_matrix: RatMatrix,
}

impl CycleReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(CycleJson {
            prefix_steps: self.prefix_steps,
            period_steps: self.period_steps,
            contraction: serde_json::to_value(&self.contraction).unwrap(),
            contraction_approx: self.contraction.approx_f64(),
            chart: self.chart.labels.clone(),
            widths_approx: self.widths.iter().map(|w| w.approx_f64()).collect(),
            lengths: self.lengths.iter().map(numberfield::rat_to_string).collect(),
            width_matrix: self.width_matrix.clone(),
            length_matrix: self.length_matrix.clone(),
        })
        .unwrap()
    }

    /// `width_matrix * widths = contraction * widths`, exactly.
    pub fn widths_scale(&self) -> bool {
        self.width_matrix
            .apply(&self.widths)
            .map(|v| v.iter().zip(&self.widths).all(|(n, o)| *n == o * &self.contraction))
            .unwrap_or(false)
    }

    /// Re-tracks the cycle in another chart (e.g. named coordinates).
    pub fn in_chart(&self, chart: &Chart) -> Result<CycleReport, RipsError> {
        let one = self.start.field().one();
        let t = track(&self.start, self.period_steps, self.policy, chart, chart, &self.contraction)?;
        Ok(CycleReport {
            chart: chart.clone(),
            widths: chart.values(&self.start, &one)?,
            lengths: chart.lengths(&self.start, &one)?,
            width_matrix: t.widths,
            length_matrix: t.lengths,
            ..self.clone()
        })
    }
}

/// Runs the machine for up to `max_steps` iterations and reports the first
/// repetition of shape with proportional segment lengths.
pub fn detect_rips_cycle(x: &BandComplex, max_steps: usize, policy: Policy) -> Option<CycleReport> {
    let mut hist = vec![(x.clone(), x.canonical())];
    for _ in 0..max_steps {
        let (y, _) = rips_step(&hist.last().unwrap().0, policy).ok()?;
        let cy = y.canonical();
        for (j, (_, cj)) in hist.iter().enumerate() {
            if let Some(k) = cy.scale_from(cj) {
                let start = hist[j].0.clone();
                let period = hist.len() - j;
                let chart = generic_chart(&start);
                let one = x.field().one();
                let t = track(&start, period, policy, &chart, &chart, &one).ok()?;
                return Some(CycleReport {
                    prefix_steps: j,
                    period_steps: period,
                    contraction: k,
                    widths: chart.values(&start, &one).ok()?,
                    lengths: chart.lengths(&start, &one).ok()?,
                    chart,
                    width_matrix: t.widths,
                    length_matrix: t.lengths,
                    start,
                    policy,
                });
            }
        }
        hist.push((y, cy));
    }
    None
}

/// Certified comparison of `contraction * perron(lengths)` with 1.
#[derive(Clone, Debug, Serialize)]
pub struct EndCriterion {
    pub holds: bool,
    pub contraction: (f64, f64),
    pub perron: (f64, f64),
    /// Rational enclosure of the product, as decimal strings.
    pub product: (String, String),
    pub product_approx: f64,
    /// Exact rational enclosure of the product.
    #[serde(skip)]
    pub certificate: (Rational, Rational),
}

/// True iff `contraction * mu < 1` where `mu` is the Perron root of `lengths`;
/// the product is enclosed by rational intervals refined until decided.
pub fn one_end_criterion(contraction: &FieldElement, lengths: &RatMatrix) -> Result<EndCriterion, RipsError> {
    let mut eps = rat(1, 1_000_000);
    for _ in 0..8 {
        let (clo, chi) = contraction.enclose(&eps);
        let (plo, phi) = lengths.perron_interval(&eps).map_err(|e| RipsError::Chart(e.to_string()))?;
        let lo = &clo * &plo;
        let hi = &chi * &phi;
        let one = Rational::one();
        if hi < one || lo >= one {
            let show = |r: &Rational| format!("{:.9}", rat_to_f64(r));
            return Ok(EndCriterion {
                holds: hi < one,
                contraction: (rat_to_f64(&clo), rat_to_f64(&chi)),
                perron: (rat_to_f64(&plo), rat_to_f64(&phi)),
                product: (show(&lo), show(&hi)),
                product_approx: rat_to_f64(&((&lo + &hi) / rat(2, 1))),
                certificate: (lo, hi),
            });
        }
        eps = &eps * &eps;
    }
    Err(RipsError::Chart("product too close to 1 to decide".into()))
}

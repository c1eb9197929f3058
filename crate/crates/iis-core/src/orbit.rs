use std::collections::{HashMap, HashSet, VecDeque};

use numberfield::FieldElement;

use crate::{Iis, IisError, Member};

/// Bounded piece of the orbit graph: points joined when a pair maps one
/// to the other.
#[derive(Clone, Debug)]
pub struct OrbitGraphSlice {
    pub root: FieldElement,
    /// Points in BFS order, with their distance from the root.
    pub vertices: Vec<(FieldElement, usize)>,
    /// `(i, j, pair)`: vertex `i` is sent to vertex `j` by `pair`, left to right.
    pub edges: Vec<(usize, usize, usize)>,
    /// Vertices at the maximal depth whose neighbours were not expanded.
    pub frontier: Vec<usize>,
}

impl OrbitGraphSlice {
    pub fn distance(&self, x: &FieldElement) -> Option<usize> {
        self.vertices.iter().find(|(v, _)| v == x).map(|(_, d)| *d)
    }
}

/// Images of `x` under every pair whose closed member contains it.
fn neighbours(s: &Iis, x: &FieldElement) -> Vec<(FieldElement, usize, Member)> {
    let mut out = Vec::new();
    for (i, p) in s.pairs.iter().enumerate() {
        let t = p.shift();
        if p.left.contains(x) {
            out.push((x + &t, i, Member::Left));
        }
        if p.right.contains(x) {
            out.push((x - &t, i, Member::Right));
        }
    }
    out
}

/// Number of subintervals containing `x` (closed), i.e. its degree in the orbit graph.
pub fn point_valence(s: &Iis, x: &FieldElement) -> usize {
    s.pairs
        .iter()
        .map(|p| p.left.contains(x) as usize + p.right.contains(x) as usize)
        .sum()
}

/// Breadth-first exploration of the orbit of `x` up to `depth` edges.
pub fn orbit_bfs(s: &Iis, x: &FieldElement, depth: usize) -> Result<OrbitGraphSlice, IisError> {
    if !s.support.contains(x) {
        return Err(IisError::OutOfSupport);
    }
    let mut index: HashMap<FieldElement, usize> = HashMap::new();
    let mut vertices = vec![(x.clone(), 0)];
    index.insert(x.clone(), 0);
    let mut edges = Vec::new();
    let mut seen_edges = HashSet::new();
    let mut frontier = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let (v, d) = vertices[i].clone();
        if d == depth {
            frontier.push(i);
            continue;
        }
        for (w, pair, from) in neighbours(s, &v) {
            let j = match index.get(&w) {
                Some(&j) => j,
                None => {
                    let j = vertices.len();
                    vertices.push((w.clone(), d + 1));
                    index.insert(w, j);
                    queue.push_back(j);
                    j
                }
            };
            let e = if from == Member::Left { (i, j, pair) } else { (j, i, pair) };
            if seen_edges.insert(e) {
                edges.push(e);
            }
        }
    }
    Ok(OrbitGraphSlice { root: x.clone(), vertices, edges, frontier })
}

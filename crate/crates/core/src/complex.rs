//! Paths of elementary strong shift equivalences and a bounded local
//! exploration of the complex they span.
//!
//! A path is homotopic to another with the same endpoints exactly when the
//! two composed conjugacies agree, so homotopy is decided by composition.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::code::BlockCode;
use crate::edge::{SSEEdge, Triangle, check_triangle, code_from_edge};
use crate::error::{Error, Result};
use crate::matrix::NonnegMatrix;
use crate::shift::VertexShift;

/// Direction in which an edge is traversed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Forward,
    Backward,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Forward => Sign::Backward,
            Sign::Backward => Sign::Forward,
        }
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i8(match self {
            Sign::Forward => 1,
            Sign::Backward => -1,
        })
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match i8::deserialize(d)? {
            1 => Ok(Sign::Forward),
            -1 => Ok(Sign::Backward),
            other => Err(serde::de::Error::custom(format!("sign must be 1 or -1, got {other}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathStep {
    pub edge: SSEEdge,
    pub sign: Sign,
}

impl PathStep {
    pub fn source(&self) -> &NonnegMatrix {
        match self.sign {
            Sign::Forward => self.edge.a(),
            Sign::Backward => self.edge.b(),
        }
    }

    pub fn target(&self) -> &NonnegMatrix {
        match self.sign {
            Sign::Forward => self.edge.b(),
            Sign::Backward => self.edge.a(),
        }
    }

    /// The conjugacy realised by this step.
    pub fn code(&self) -> Result<BlockCode> {
        let c = code_from_edge(&self.edge)?;
        match self.sign {
            Sign::Forward => Ok(c),
            Sign::Backward => c.require_inverse(),
        }
    }
}

/// A word of signed edges starting at `base`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SSEPath {
    base: NonnegMatrix,
    steps: Vec<PathStep>,
}

impl SSEPath {
    pub fn new(base: NonnegMatrix, steps: Vec<PathStep>) -> Result<Self> {
        let mut cur = &base;
        for (k, st) in steps.iter().enumerate() {
            if st.source() != cur {
                return Err(Error::ShiftMismatch(format!("step {} does not start where the path is", k + 1)));
            }
            cur = st.target();
        }
        Ok(SSEPath { base, steps })
    }

    pub fn empty(base: NonnegMatrix) -> Self {
        SSEPath { base, steps: Vec::new() }
    }

    pub fn base(&self) -> &NonnegMatrix {
        &self.base
    }

    pub fn steps(&self) -> &[PathStep] {
        &self.steps
    }

    pub fn end(&self) -> &NonnegMatrix {
        self.steps.last().map_or(&self.base, PathStep::target)
    }

    pub fn is_loop(&self) -> bool {
        self.end() == &self.base
    }

    pub fn push(&mut self, edge: SSEEdge, sign: Sign) -> Result<()> {
        let st = PathStep { edge, sign };
        if st.source() != self.end() {
            return Err(Error::ShiftMismatch("edge does not start at the path end".into()));
        }
        self.steps.push(st);
        Ok(())
    }

    /// `self` followed by `other`.
    pub fn concat(&self, other: &SSEPath) -> Result<SSEPath> {
        if other.base != *self.end() {
            return Err(Error::ShiftMismatch("paths are not composable".into()));
        }
        let mut steps = self.steps.clone();
        steps.extend(other.steps.iter().cloned());
        Ok(SSEPath { base: self.base.clone(), steps })
    }

    /// The same path walked backwards.
    pub fn reversed(&self) -> SSEPath {
        let steps = self.steps.iter().rev().map(|s| PathStep { edge: s.edge.clone(), sign: s.sign.flip() }).collect();
        SSEPath { base: self.end().clone(), steps }
    }
}

#[derive(Deserialize)]
struct PathJson {
    base: NonnegMatrix,
    steps: Vec<PathStep>,
}

impl<'de> Deserialize<'de> for SSEPath {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = PathJson::deserialize(d)?;
        SSEPath::new(raw.base, raw.steps).map_err(serde::de::Error::custom)
    }
}

/// The conjugacy `X_base -> X_end` obtained by composing the step codes.
pub fn compose_path(p: &SSEPath) -> Result<BlockCode> {
    let mut acc = BlockCode::identity(Arc::new(VertexShift::new(p.base.clone())?));
    for st in &p.steps {
        acc = acc.then(&st.code()?)?.normalize();
    }
    Ok(acc)
}

/// Whether two paths with common endpoints compose to the same conjugacy.
pub fn homotopic(p: &SSEPath, q: &SSEPath) -> Result<bool> {
    if p.base != q.base || p.end() != q.end() {
        return Err(Error::ShiftMismatch("paths have different endpoints".into()));
    }
    Ok(compose_path(p)? == compose_path(q)?)
}

/// The automorphism of `X_base` given by a loop.
pub fn automorphism_from_loop(p: &SSEPath) -> Result<BlockCode> {
    if !p.is_loop() {
        return Err(Error::ShiftMismatch("path is not a loop".into()));
    }
    compose_path(p)
}

/// Bounds for [`explore`] and [`factorizations`].
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ExploreOptions {
    /// Largest inner dimension of a factorization `A = RS`.
    pub max_inner: usize,
    /// Largest matrix admitted as a vertex.
    pub max_size: usize,
    /// Number of rounds of edge enumeration from newly found vertices.
    pub depth: usize,
    /// Total number of edges before the search gives up.
    pub max_edges: usize,
}

impl Default for ExploreOptions {
    fn default() -> Self {
        ExploreOptions { max_inner: 6, max_size: 6, depth: 1, max_edges: 200_000 }
    }
}

/// Every edge `(R, S)` out of `a` whose inner dimension is at most
/// `max_inner`, sorted by `(B, R, S)`.
///
/// An edge is an ordered cover of the support of `a` by disjoint rectangles
/// `P_b x Q_b` (column `b` of `R` times row `b` of `S`) with
/// `|Q_b ∩ P_c| <= 1` for all `b, c`, which keeps `SR` a 0/1 matrix.
pub fn factorizations(a: &NonnegMatrix, max_inner: usize, max_edges: usize) -> Result<Vec<SSEEdge>> {
    if !a.is_square() || !a.is_boolean() || !a.is_nondegenerate() || a.rows() == 0 {
        return Err(Error::InvalidMatrix("factorization needs a nondegenerate 0/1 matrix".into()));
    }
    let n = a.rows();
    if n > 64 {
        return Err(Error::ResourceBound(format!("matrix of size {n} exceeds the search limit")));
    }
    let rows: Vec<u64> = (0..n).map(|i| a.row(i).fold(0u64, |m, (j, _)| m | (1 << j))).collect();
    let mut covers: Vec<Vec<(u64, u64)>> = Vec::new();
    let mut search =
        CoverSearch { n, max_inner, uncovered: rows, chosen: Vec::new(), out: &mut covers, budget: max_edges };
    search.run()?;
    let mut edges = Vec::new();
    for cover in &covers {
        let mut order: Vec<usize> = (0..cover.len()).collect();
        loop {
            if edges.len() >= max_edges {
                return Err(Error::ResourceBound(format!("more than {max_edges} factorizations")));
            }
            edges.push(edge_of_cover(n, cover, &order)?);
            if !next_permutation(&mut order) {
                break;
            }
        }
    }
    edges.sort_by(|x, y| (x.b(), x.r(), x.s()).cmp(&(y.b(), y.r(), y.s())));
    Ok(edges)
}

fn edge_of_cover(n: usize, cover: &[(u64, u64)], order: &[usize]) -> Result<SSEEdge> {
    let m = cover.len();
    let mut r = Vec::new();
    let mut s = Vec::new();
    for (b, &k) in order.iter().enumerate() {
        let (p, q) = cover[k];
        for i in 0..n {
            if p >> i & 1 == 1 {
                r.push((i, b, 1));
            }
            if q >> i & 1 == 1 {
                s.push((b, i, 1));
            }
        }
    }
    SSEEdge::from_factors(NonnegMatrix::from_triplets(n, m, r)?, NonnegMatrix::from_triplets(m, n, s)?)
}

pub(crate) fn next_permutation(v: &mut [usize]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

struct CoverSearch<'a> {
    n: usize,
    max_inner: usize,
    uncovered: Vec<u64>,
    chosen: Vec<(u64, u64)>,
    out: &'a mut Vec<Vec<(u64, u64)>>,
    budget: usize,
}

fn submasks(mask: u64) -> impl Iterator<Item = u64> {
    // All submasks of `mask`, including 0 and `mask`.
    let mut sub = mask;
    let mut done = false;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let cur = sub;
        if sub == 0 {
            done = true;
        } else {
            sub = (sub - 1) & mask;
        }
        Some(cur)
    })
}

impl CoverSearch<'_> {
    fn run(&mut self) -> Result<()> {
        let Some(i) = self.uncovered.iter().position(|&r| r != 0) else {
            if self.out.len() >= self.budget {
                return Err(Error::ResourceBound(format!("more than {} factorizations", self.budget)));
            }
            self.out.push(self.chosen.clone());
            return Ok(());
        };
        if self.chosen.len() == self.max_inner {
            return Ok(());
        }
        let j = self.uncovered[i].trailing_zeros();
        let jbit = 1u64 << j;
        let ibit = 1u64 << i;
        let row_rest = self.uncovered[i] & !jbit;
        for qx in submasks(row_rest) {
            let q = qx | jbit;
            let mut cand = 0u64;
            for p in 0..self.n {
                if self.uncovered[p] & q == q {
                    cand |= 1 << p;
                }
            }
            for px in submasks(cand & !ibit) {
                let p = px | ibit;
                if (q & p).count_ones() > 1 {
                    continue;
                }
                if self.chosen.iter().any(|&(p2, q2)| (q & p2).count_ones() > 1 || (q2 & p).count_ones() > 1) {
                    continue;
                }
                for r in 0..self.n {
                    if p >> r & 1 == 1 {
                        self.uncovered[r] &= !q;
                    }
                }
                self.chosen.push((p, q));
                let res = self.run();
                self.chosen.pop();
                for r in 0..self.n {
                    if p >> r & 1 == 1 {
                        self.uncovered[r] |= q;
                    }
                }
                res?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FragmentEdge {
    pub source: usize,
    pub target: usize,
    #[serde(rename = "R")]
    pub r: NonnegMatrix,
    #[serde(rename = "S")]
    pub s: NonnegMatrix,
}

/// A finite piece of the complex: vertex, edge and triangle lists.
#[derive(Clone, Debug, Serialize)]
pub struct ComplexFragment {
    pub vertices: Vec<NonnegMatrix>,
    pub edges: Vec<FragmentEdge>,
    /// Triples of edge indices `(e1, e2, e3)` forming triangles.
    pub triangles: Vec<[usize; 3]>,
    pub depth: usize,
}

impl ComplexFragment {
    pub fn edge(&self, k: usize) -> Result<SSEEdge> {
        let e = &self.edges[k];
        SSEEdge::from_factors(e.r.clone(), e.s.clone())
    }
}

/// Enumerates edges out of `a` and, for `depth > 1`, out of the vertices
/// found so far; then lists every triangle among the discovered edges.
pub fn explore(a: &NonnegMatrix, opts: &ExploreOptions) -> Result<ComplexFragment> {
    if a.rows() > opts.max_size {
        return Err(Error::ResourceBound(format!(
            "start matrix has size {} above the bound {}",
            a.rows(),
            opts.max_size
        )));
    }
    let mut index: BTreeMap<NonnegMatrix, usize> = BTreeMap::new();
    let mut found: Vec<NonnegMatrix> = vec![a.clone()];
    index.insert(a.clone(), 0);
    let mut raw_edges: Vec<(usize, usize, SSEEdge)> = Vec::new();
    let mut queue = VecDeque::from([(0usize, 0usize)]);
    while let Some((v, level)) = queue.pop_front() {
        if level >= opts.depth {
            continue;
        }
        let budget = opts.max_edges.saturating_sub(raw_edges.len());
        for e in factorizations(&found[v].clone(), opts.max_inner, budget)? {
            if e.b().rows() > opts.max_size {
                continue;
            }
            let t = match index.get(e.b()) {
                Some(&t) => t,
                None => {
                    let t = found.len();
                    found.push(e.b().clone());
                    index.insert(e.b().clone(), t);
                    queue.push_back((t, level + 1));
                    t
                }
            };
            raw_edges.push((v, t, e));
            if raw_edges.len() > opts.max_edges {
                return Err(Error::ResourceBound(format!("more than {} edges", opts.max_edges)));
            }
        }
    }

    // Canonical vertex order.
    let mut order: Vec<usize> = (0..found.len()).collect();
    order.sort_by(|&x, &y| found[x].cmp(&found[y]));
    let mut rank = vec![0; found.len()];
    for (r, &v) in order.iter().enumerate() {
        rank[v] = r;
    }
    let vertices: Vec<NonnegMatrix> = order.iter().map(|&v| found[v].clone()).collect();
    let mut edges: Vec<(usize, usize, SSEEdge)> =
        raw_edges.into_iter().map(|(s, t, e)| (rank[s], rank[t], e)).collect();
    edges.sort_by(|x, y| (x.0, x.1, x.2.r(), x.2.s()).cmp(&(y.0, y.1, y.2.r(), y.2.s())));

    let mut by_pair: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    let mut by_source: HashMap<usize, Vec<usize>> = HashMap::new();
    for (k, (s, t, _)) in edges.iter().enumerate() {
        by_pair.entry((*s, *t)).or_default().push(k);
        by_source.entry(*s).or_default().push(k);
    }
    let mut triangles = Vec::new();
    for (k1, (s1, t1, e1)) in edges.iter().enumerate() {
        for &k2 in by_source.get(t1).map_or(&[][..], Vec::as_slice) {
            let (_, t2, e2) = &edges[k2];
            for &k3 in by_pair.get(&(*s1, *t2)).map_or(&[][..], Vec::as_slice) {
                let e3 = &edges[k3].2;
                let tri = Triangle { e1: e1.clone(), e2: e2.clone(), e3: e3.clone() };
                if check_triangle(&tri)?.holds {
                    triangles.push([k1, k2, k3]);
                }
            }
        }
    }
    Ok(ComplexFragment {
        vertices,
        edges: edges
            .into_iter()
            .map(|(source, target, e)| FragmentEdge { source, target, r: e.r().clone(), s: e.s().clone() })
            .collect(),
        triangles,
        depth: opts.depth,
    })
}

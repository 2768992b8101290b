//! Integer chains on ordered simplicial complexes and the edgewise
//! (Freudenthal) subdivision of simplices.
//!
//! The `n`-simplex is `Δ_n = {x ∈ [0,2]^n : x_n <= … <= x_1}`. Its lattice
//! points are `θ(i, j)`: `i` twos, then `j - i` ones, then zeros. A piece of
//! the subdivision is a lattice path `v_0, v_0 + e_π(1), …` from a base
//! `v_0 ∈ {0,1}^n` staying in `Δ_n`, oriented by `sgn(π)`.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, RngExt};
use serde::{Deserialize, Serialize};

use crate::code::{BlockCode, Window};
use crate::error::{Error, Result};
use crate::matrix::NonnegMatrix;
use crate::refinement::{arrow, markov_refinement};

/// `θ(i, j) ∈ Z^n` for `0 <= i <= j <= n`.
pub fn theta(i: usize, j: usize, n: usize) -> Result<Vec<u8>> {
    if i > j || j > n {
        return Err(Error::InvalidChain(format!("theta({i}, {j}) needs 0 <= i <= j <= {n}")));
    }
    Ok((1..=n)
        .map(|k| {
            if k <= i {
                2
            } else if k <= j {
                1
            } else {
                0
            }
        })
        .collect())
}

/// The pair `(i, j)` of a lattice point of `Δ_n`.
pub fn theta_inverse(x: &[u8]) -> Result<(usize, usize)> {
    if x.iter().any(|&c| c > 2) || x.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::InvalidChain(format!("{x:?} is not a lattice point of the simplex")));
    }
    let i = x.iter().filter(|&&c| c == 2).count();
    let j = x.iter().filter(|&&c| c >= 1).count();
    Ok((i, j))
}

/// A top-dimensional piece of the subdivision of `Δ_n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FreudenthalSimplex {
    pub v0: Vec<u8>,
    /// `π(1), …, π(n)`, 1-based.
    pub pi: Vec<usize>,
    pub sign: i64,
}

impl FreudenthalSimplex {
    pub fn dimension(&self) -> usize {
        self.v0.len()
    }

    pub fn vertices(&self) -> Vec<Vec<u8>> {
        let mut out = vec![self.v0.clone()];
        for &p in &self.pi {
            let mut v = out.last().unwrap().clone();
            v[p - 1] += 1;
            out.push(v);
        }
        out
    }

    /// The vertices as pairs `(i, j)`.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.vertices().iter().map(|v| theta_inverse(v).expect("enumerated simplices stay in the simplex")).collect()
    }
}

fn permutation_sign(p: &[usize]) -> i64 {
    let mut inversions = 0;
    for a in 0..p.len() {
        for b in a + 1..p.len() {
            if p[a] > p[b] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 { 1 } else { -1 }
}

fn in_simplex(v: &[u8]) -> bool {
    v.iter().all(|&c| c <= 2) && v.windows(2).all(|w| w[0] >= w[1])
}

/// All pieces of the subdivision of `Δ_n`, ordered by `(v_0, π)`.
pub fn enumerate_subdivision(n: usize) -> Vec<FreudenthalSimplex> {
    let mut perms = vec![(1..=n).collect::<Vec<_>>()];
    loop {
        let mut p = perms.last().unwrap().clone();
        if !crate::complex::next_permutation(&mut p) {
            break;
        }
        perms.push(p);
    }
    let mut out = Vec::new();
    for bits in 0..1u64 << n {
        let v0: Vec<u8> = (0..n).map(|k| ((bits >> (n - 1 - k)) & 1) as u8).collect();
        for pi in &perms {
            let s = FreudenthalSimplex { v0: v0.clone(), pi: pi.clone(), sign: permutation_sign(pi) };
            if s.vertices().iter().all(|v| in_simplex(v)) {
                out.push(s);
            }
        }
    }
    out
}

/// Determinant of a small integer matrix by cofactor expansion.
pub fn integer_det(m: &[Vec<i64>]) -> i64 {
    match m.len() {
        0 => 1,
        1 => m[0][0],
        n => (0..n)
            .map(|c| {
                let minor: Vec<Vec<i64>> = m[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|&(k, _)| k != c).map(|(_, &x)| x).collect())
                    .collect();
                let s = if c % 2 == 0 { 1 } else { -1 };
                s * m[0][c] * integer_det(&minor)
            })
            .sum(),
    }
}

/// `det(v_1 - v_0, …, v_n - v_{n-1})` with the differences as columns.
pub fn determinant_sign(s: &FreudenthalSimplex) -> i64 {
    let v = s.vertices();
    let n = s.dimension();
    let m: Vec<Vec<i64>> = (0..n).map(|r| (0..n).map(|c| v[c + 1][r] as i64 - v[c][r] as i64).collect()).collect();
    integer_det(&m)
}

/// The face inclusion `d_k: Δ_n -> Δ_{n+1}`.
pub fn face_map(k: usize, x: &[u8]) -> Result<Vec<u8>> {
    let n = x.len();
    if k > n + 1 {
        return Err(Error::InvalidChain(format!("face index {k} on a point of dimension {n}")));
    }
    let mut out = Vec::with_capacity(n + 1);
    if k == 0 {
        out.push(2);
        out.extend_from_slice(x);
    } else if k == n + 1 {
        out.extend_from_slice(x);
        out.push(0);
    } else {
        out.extend_from_slice(&x[..k]);
        out.extend_from_slice(&x[k - 1..]);
    }
    Ok(out)
}

/// A finitely supported integer combination of oriented simplices.
///
/// Simplices are stored with vertices sorted, the sorting permutation's
/// sign folded into the coefficient; simplices with a repeated vertex are 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain<V: Ord> {
    terms: BTreeMap<Vec<V>, i64>,
}

impl<V: Ord> Default for Chain<V> {
    fn default() -> Self {
        Chain { terms: BTreeMap::new() }
    }
}

impl<V: Ord + Clone> Chain<V> {
    pub fn zero() -> Self {
        Chain::default()
    }

    pub fn simplex(vs: Vec<V>) -> Self {
        let mut c = Chain::zero();
        c.add_term(vs, 1);
        c
    }

    pub fn add_term(&mut self, mut vs: Vec<V>, coeff: i64) {
        if coeff == 0 {
            return;
        }
        let mut sign = 1;
        for a in 1..vs.len() {
            let mut b = a;
            while b > 0 && vs[b - 1] > vs[b] {
                vs.swap(b - 1, b);
                sign = -sign;
                b -= 1;
            }
        }
        if vs.windows(2).any(|w| w[0] == w[1]) {
            return;
        }
        let c = self.terms.get(&vs).copied().unwrap_or(0) + sign * coeff;
        if c == 0 {
            self.terms.remove(&vs);
        } else {
            self.terms.insert(vs, c);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[V], i64)> + '_ {
        self.terms.iter().map(|(k, &c)| (k.as_slice(), c))
    }

    pub fn coefficient(&self, vs: &[V]) -> i64 {
        let mut c = Chain::zero();
        c.add_term(vs.to_vec(), 1);
        match c.terms.into_iter().next() {
            Some((k, s)) => s * self.terms.get(&k).copied().unwrap_or(0),
            None => 0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Chain<V>) -> Chain<V> {
        let mut out = self.clone();
        for (k, &c) in &other.terms {
            out.add_term(k.clone(), c);
        }
        out
    }

    pub fn scale(&self, s: i64) -> Chain<V> {
        let mut out = Chain::zero();
        for (k, &c) in &self.terms {
            out.add_term(k.clone(), s * c);
        }
        out
    }

    pub fn sub(&self, other: &Chain<V>) -> Chain<V> {
        self.add(&other.scale(-1))
    }

    pub fn boundary(&self) -> Chain<V> {
        let mut out = Chain::zero();
        for (k, &c) in &self.terms {
            for l in 0..k.len() {
                if k.len() == 1 {
                    break;
                }
                let mut face = k.clone();
                face.remove(l);
                out.add_term(face, if l % 2 == 0 { c } else { -c });
            }
        }
        out
    }

    /// Image under a vertex map; degenerate images vanish.
    pub fn map_vertices<W: Ord + Clone>(&self, mut f: impl FnMut(&V) -> Result<W>) -> Result<Chain<W>> {
        let mut out = Chain::zero();
        for (k, &c) in &self.terms {
            let img = k.iter().map(&mut f).collect::<Result<Vec<_>>>()?;
            out.add_term(img, c);
        }
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson<V> {
    simplex: Vec<V>,
    coeff: i64,
}

impl<V: Ord + Clone + Serialize> Serialize for Chain<V> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.terms.iter().map(|(k, &c)| TermJson { simplex: k.clone(), coeff: c }).collect::<Vec<_>>().serialize(s)
    }
}

impl<'de, V: Ord + Clone + Deserialize<'de>> Deserialize<'de> for Chain<V> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw: Vec<TermJson<V>> = Vec::deserialize(d)?;
        let mut c = Chain::zero();
        for t in raw {
            c.add_term(t.simplex, t.coeff);
        }
        Ok(c)
    }
}

/// The sum `Σ_T sgn(T) ∂T` over the pieces of `Δ_n`, on lattice points.
pub fn subdivision_boundary(n: usize) -> Chain<Vec<u8>> {
    let mut c = Chain::zero();
    for t in enumerate_subdivision(n) {
        c.add_term(t.vertices(), t.sign);
    }
    c.boundary()
}

/// The sum `Σ_k (-1)^k Σ_S sgn(S) d_k(S)` over the pieces of `Δ_{n-1}`.
pub fn subdivided_faces(n: usize) -> Result<Chain<Vec<u8>>> {
    let mut c = Chain::zero();
    if n == 0 {
        return Ok(c);
    }
    let pieces = enumerate_subdivision(n - 1);
    for k in 0..=n {
        for s in &pieces {
            let img = s.vertices().iter().map(|v| face_map(k, v)).collect::<Result<Vec<_>>>()?;
            c.add_term(img, if k % 2 == 0 { s.sign } else { -s.sign });
        }
    }
    Ok(c)
}

/// A finite ordered simplicial complex: vertices `0..n` and an acyclic
/// arrow relation with every arrow going from a smaller to a larger id.
/// Simplices are the increasing tuples whose vertices are pairwise related.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderedComplex {
    vertices: usize,
    arrows: BTreeSet<(usize, usize)>,
}

impl OrderedComplex {
    pub fn new(vertices: usize, arrows: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let arrows: BTreeSet<_> = arrows.into_iter().filter(|(a, b)| a != b).collect();
        for &(a, b) in &arrows {
            if a >= vertices || b >= vertices {
                return Err(Error::InvalidChain(format!("arrow ({a}, {b}) leaves the vertex set")));
            }
            if a > b {
                return Err(Error::InvalidChain(format!("arrow ({a}, {b}) goes against the vertex order")));
            }
        }
        Ok(OrderedComplex { vertices, arrows })
    }

    /// The full simplex on `n + 1` ordered vertices.
    pub fn simplex(n: usize) -> Self {
        let arrows = (0..=n).flat_map(|a| (a + 1..=n).map(move |b| (a, b)));
        OrderedComplex::new(n + 1, arrows).expect("increasing arrows")
    }

    /// Relabels an acyclic relation by a topological order; returns the
    /// complex and the new id of every old vertex.
    pub fn from_relation(vertices: usize, arrows: &[(usize, usize)]) -> Result<(Self, Vec<usize>)> {
        let mut indeg = vec![0usize; vertices];
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); vertices];
        let set: BTreeSet<(usize, usize)> = arrows.iter().copied().filter(|(a, b)| a != b).collect();
        for &(a, b) in &set {
            if a >= vertices || b >= vertices {
                return Err(Error::InvalidChain(format!("arrow ({a}, {b}) leaves the vertex set")));
            }
            indeg[b] += 1;
            out[a].push(b);
        }
        let mut ready: BTreeSet<usize> = (0..vertices).filter(|&v| indeg[v] == 0).collect();
        let mut rank = vec![usize::MAX; vertices];
        let mut next = 0;
        while let Some(v) = ready.pop_first() {
            rank[v] = next;
            next += 1;
            for &w in &out[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    ready.insert(w);
                }
            }
        }
        if next != vertices {
            return Err(Error::InvalidChain("arrow relation has a cycle".into()));
        }
        let complex = OrderedComplex::new(vertices, set.iter().map(|&(a, b)| (rank[a], rank[b])))?;
        Ok((complex, rank))
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn has_arrow(&self, a: usize, b: usize) -> bool {
        self.arrows.contains(&(a, b))
    }

    pub fn is_simplex(&self, vs: &[usize]) -> bool {
        vs.iter().all(|&v| v < self.vertices)
            && (0..vs.len()).all(|a| (a + 1..vs.len()).all(|b| self.has_arrow(vs[a], vs[b])))
    }

    /// All simplices of dimension `dim`, in lexicographic order.
    pub fn simplices(&self, dim: usize) -> Vec<Vec<usize>> {
        fn grow(c: &OrderedComplex, cur: &mut Vec<usize>, left: usize, out: &mut Vec<Vec<usize>>) {
            if left == 0 {
                out.push(cur.clone());
                return;
            }
            let start = cur.last().map_or(0, |&v| v + 1);
            for v in start..c.vertices {
                if cur.iter().all(|&u| c.has_arrow(u, v)) {
                    cur.push(v);
                    grow(c, cur, left - 1, out);
                    cur.pop();
                }
            }
        }
        let mut out = Vec::new();
        grow(self, &mut Vec::new(), dim + 1, &mut out);
        out
    }

    /// A random chain of `terms` simplices of dimension `dim` with
    /// coefficients in `-max..=max`.
    pub fn random_chain<R: Rng + ?Sized>(&self, rng: &mut R, dim: usize, terms: usize, max: i64) -> Chain<usize> {
        let all = self.simplices(dim);
        let mut c = Chain::zero();
        if all.is_empty() {
            return c;
        }
        for _ in 0..terms {
            let s = all[rng.random_range(0..all.len())].clone();
            c.add_term(s, rng.random_range(-max..=max));
        }
        c
    }
}

/// Vertices of `K^#`: those of `K` and the pairs `(v, w)` with `v -> w` or
/// `v = w`. Plain vertices come first.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SubVertex {
    Plain(usize),
    Pair(usize, usize),
}

fn check_simplex(k: &OrderedComplex, vs: &[usize]) -> Result<()> {
    if !k.is_simplex(vs) {
        return Err(Error::InvalidChain(format!("{vs:?} is not a simplex of the complex")));
    }
    Ok(())
}

/// A subdivision simplex as index pairs, with its sign.
type SignedPairs = (Vec<(usize, usize)>, i64);

/// The subdivision chain map `F: C(K) -> C(K^#)`.
pub fn chain_f(c: &Chain<usize>, k: &OrderedComplex) -> Result<Chain<SubVertex>> {
    let mut pieces: BTreeMap<usize, Vec<SignedPairs>> = BTreeMap::new();
    let mut out = Chain::zero();
    for (vs, coeff) in c.terms() {
        check_simplex(k, vs)?;
        let m = vs.len() - 1;
        let list =
            pieces.entry(m).or_insert_with(|| enumerate_subdivision(m).iter().map(|t| (t.pairs(), t.sign)).collect());
        for (pairs, sign) in list.iter() {
            let img = pairs.iter().map(|&(i, j)| SubVertex::Pair(vs[i], vs[j])).collect();
            out.add_term(img, sign * coeff);
        }
    }
    Ok(out)
}

/// The inclusion `C(K) -> C(K^#)`.
pub fn embed(c: &Chain<usize>) -> Chain<SubVertex> {
    c.map_vertices(|&v| Ok(SubVertex::Plain(v))).expect("infallible")
}

/// The cone map `ρ: C(K^F) -> C(K^#)`, one dimension up.
pub fn chain_rho(c: &Chain<SubVertex>) -> Result<Chain<SubVertex>> {
    let mut out = Chain::zero();
    for (vs, coeff) in c.terms() {
        let pairs = vs
            .iter()
            .map(|v| match v {
                SubVertex::Pair(a, b) => Ok((*a, *b)),
                SubVertex::Plain(_) => Err(Error::InvalidChain("rho is defined on subdivision simplices only".into())),
            })
            .collect::<Result<Vec<_>>>()?;
        for k in 0..pairs.len() {
            let mut img: Vec<SubVertex> = pairs[..=k].iter().map(|&(a, _)| SubVertex::Plain(a)).collect();
            img.extend(pairs[k..].iter().map(|&(a, b)| SubVertex::Pair(a, b)));
            out.add_term(img, if k % 2 == 0 { coeff } else { -coeff });
        }
    }
    Ok(out)
}

/// `(∂ρF + ρF∂)(c)` and `F(c) - c`, which must agree.
pub fn homotopy_sides(c: &Chain<usize>, k: &OrderedComplex) -> Result<(Chain<SubVertex>, Chain<SubVertex>)> {
    let f = chain_f(c, k)?;
    let lhs = chain_rho(&f)?.boundary().add(&chain_rho(&chain_f(&c.boundary(), k)?)?);
    let rhs = f.sub(&embed(c));
    Ok((lhs, rhs))
}

/// Which form of the subdivided complex a simplex of `D F(c)` has.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PieceType {
    /// Only off-diagonal pairs.
    I,
    /// `(0,l), …, (l,l), (l,l+1), …, (l,n)`.
    II { l: usize },
}

/// Classifies a piece of `Δ_n` by its pairs.
pub fn piece_type(pairs: &[(usize, usize)]) -> Result<PieceType> {
    let diagonal: Vec<usize> = pairs.iter().filter(|(i, j)| i == j).map(|&(i, _)| i).collect();
    let n = pairs.len() - 1;
    let monotone = pairs.windows(2).all(|w| w[0].0 <= w[1].0 && w[0].1 <= w[1].1);
    match diagonal.as_slice() {
        [] if monotone && pairs.iter().all(|(i, j)| i < j) => Ok(PieceType::I),
        [l] => {
            let l = *l;
            let expect: Vec<(usize, usize)> = (0..=l).map(|i| (i, l)).chain((l + 1..=n).map(|j| (l, j))).collect();
            if pairs == expect {
                Ok(PieceType::II { l })
            } else {
                Err(Error::Invariant(format!("piece {pairs:?} has one diagonal vertex but the wrong shape")))
            }
        }
        _ => Err(Error::Invariant(format!("piece {pairs:?} is of neither type"))),
    }
}

/// Evaluates `δ̃` on the vertices of a complex of conjugacies.
pub trait RefinementOracle {
    type Vertex: Ord + Clone;

    /// The representative of vertex `v` of `K`.
    fn vertex(&mut self, v: usize) -> Result<Self::Vertex>;

    /// The representative of `δ̃(φ_a, φ_b)`.
    fn refine(&mut self, a: usize, b: usize) -> Result<Self::Vertex>;

    /// The arrow relation between representatives.
    fn arrow(&mut self, from: &Self::Vertex, to: &Self::Vertex) -> Result<bool>;
}

/// Key of the canonical representative of a class of codes.
pub type CodeKey = (NonnegMatrix, NonnegMatrix, Window, Vec<u32>);

/// Refinement of block codes by the star product, with canonical
/// representatives.
pub struct CodeOracle {
    codes: Vec<BlockCode>,
    reps: BTreeMap<CodeKey, BlockCode>,
    cache: BTreeMap<(usize, usize), CodeKey>,
}

impl CodeOracle {
    pub fn new(codes: Vec<BlockCode>) -> Self {
        CodeOracle { codes, reps: BTreeMap::new(), cache: BTreeMap::new() }
    }

    fn intern(&mut self, c: &BlockCode) -> CodeKey {
        let rep = c.canonical();
        let key = rep.key();
        self.reps.entry(key.clone()).or_insert(rep);
        key
    }

    /// The complex on the codes with arrows `φ -> ψ`, relabeled by a
    /// topological order, and the oracle with its codes in that order.
    pub fn complex(codes: Vec<BlockCode>) -> Result<(OrderedComplex, CodeOracle)> {
        let n = codes.len();
        let mut arrows = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a != b && arrow(&codes[a], &codes[b])? {
                    arrows.push((a, b));
                }
            }
        }
        let (k, rank) = OrderedComplex::from_relation(n, &arrows)?;
        let mut sorted: Vec<Option<BlockCode>> = vec![None; n];
        for (old, c) in codes.into_iter().enumerate() {
            sorted[rank[old]] = Some(c);
        }
        Ok((k, CodeOracle::new(sorted.into_iter().map(|c| c.expect("ranks are a permutation")).collect())))
    }

    pub fn representative(&self, key: &CodeKey) -> Option<&BlockCode> {
        self.reps.get(key)
    }
}

impl RefinementOracle for CodeOracle {
    type Vertex = CodeKey;

    fn vertex(&mut self, v: usize) -> Result<CodeKey> {
        let c = self.codes.get(v).cloned().ok_or_else(|| Error::InvalidChain(format!("vertex {v} has no code")))?;
        Ok(self.intern(&c))
    }

    fn refine(&mut self, a: usize, b: usize) -> Result<CodeKey> {
        if let Some(k) = self.cache.get(&(a, b)) {
            return Ok(k.clone());
        }
        let (fa, fb) = match (self.codes.get(a), self.codes.get(b)) {
            (Some(x), Some(y)) => (x.clone(), y.clone()),
            _ => return Err(Error::InvalidChain(format!("pair ({a}, {b}) names a missing vertex"))),
        };
        let d = markov_refinement(&[fa, fb])?
            .delta
            .ok_or_else(|| Error::InvalidChain(format!("refinement undefined on pair ({}, {})", a + 1, b + 1)))?;
        let key = self.intern(&d);
        self.cache.insert((a, b), key.clone());
        Ok(key)
    }

    fn arrow(&mut self, from: &CodeKey, to: &CodeKey) -> Result<bool> {
        let (f, g) = (&self.reps[from], &self.reps[to]);
        arrow(f, g)
    }
}

/// The chain `D F(c)` with the type of every piece.
#[derive(Clone, Debug)]
pub struct Subdivided<V: Ord> {
    pub chain: Chain<V>,
    pub type_i: usize,
    pub type_ii: usize,
    /// Type II pieces with `l = 0`.
    pub type_ii_at_zero: usize,
    pub degenerate: usize,
}

/// Applies `F`, then the vertex map `v -> v`, `(a, b) -> δ̃(a, b)`, and
/// checks that every image is a simplex of the target in its given order.
pub fn subdivision_operator<O: RefinementOracle>(
    c: &Chain<usize>,
    k: &OrderedComplex,
    oracle: &mut O,
) -> Result<Subdivided<O::Vertex>> {
    let mut out = Subdivided { chain: Chain::zero(), type_i: 0, type_ii: 0, type_ii_at_zero: 0, degenerate: 0 };
    for (vs, coeff) in c.terms() {
        check_simplex(k, vs)?;
        let m = vs.len() - 1;
        for t in enumerate_subdivision(m) {
            let pairs = t.pairs();
            match piece_type(&pairs)? {
                PieceType::I => out.type_i += 1,
                PieceType::II { l } => {
                    out.type_ii += 1;
                    if l == 0 {
                        out.type_ii_at_zero += 1;
                    }
                }
            }
            let img = pairs.iter().map(|&(i, j)| oracle.refine(vs[i], vs[j])).collect::<Result<Vec<_>>>()?;
            let mut repeated = false;
            for a in 0..img.len() {
                for b in a + 1..img.len() {
                    if img[a] == img[b] {
                        repeated = true;
                    } else if !oracle.arrow(&img[a], &img[b])? {
                        return Err(Error::Invariant(format!(
                            "image of piece {pairs:?} is not a simplex: vertex {} does not point to vertex {}",
                            a + 1,
                            b + 1
                        )));
                    }
                }
            }
            if repeated {
                out.degenerate += 1;
            }
            out.chain.add_term(img, t.sign * coeff);
        }
    }
    Ok(out)
}

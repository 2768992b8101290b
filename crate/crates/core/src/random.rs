//! Seeded random instances: matrices, edges, paths and conjugacies.

use std::collections::HashMap;

use rand::seq::IndexedRandom;
use rand::{Rng, RngExt};

use crate::code::BlockCode;
use crate::complex::{SSEPath, Sign, compose_path, factorizations};
use crate::edge::SSEEdge;
use crate::error::Result;
use crate::matrix::NonnegMatrix;

/// A random `rows x cols` matrix with entries in `0..=max`, each entry
/// nonzero with probability `density`.
pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, max: u64, density: f64) -> NonnegMatrix {
    let triplets: Vec<(usize, usize, u64)> = (0..rows)
        .flat_map(|i| (0..cols).map(move |j| (i, j)))
        .filter_map(|(i, j)| if rng.random_bool(density) { Some((i, j, rng.random_range(1..=max))) } else { None })
        .collect();
    NonnegMatrix::from_triplets(rows, cols, triplets).expect("in range")
}

/// A random nondegenerate 0/1 square matrix of size `n`.
pub fn random_nondegenerate<R: Rng + ?Sized>(rng: &mut R, n: usize) -> NonnegMatrix {
    loop {
        let density = rng.random_range(0.3..0.8);
        let m = random_matrix(rng, n, n, 1, density);
        if m.is_nondegenerate() {
            return m;
        }
    }
}

/// A random valid edge with `R` of size `n x m`, by rejection.
pub fn random_edge<R: Rng + ?Sized>(rng: &mut R, n: usize, m: usize) -> SSEEdge {
    loop {
        let density = rng.random_range(0.2..0.7);
        let r = random_matrix(rng, n, m, 1, density);
        let s = random_matrix(rng, m, n, 1, density);
        if let Ok(e) = SSEEdge::from_factors(r, s) {
            return e;
        }
    }
}

/// Samples edges out of a matrix from its cached list of factorizations.
pub struct EdgeSampler {
    pub max_inner: usize,
    pub max_size: usize,
    pub max_edges: usize,
    cache: HashMap<NonnegMatrix, Vec<SSEEdge>>,
}

impl EdgeSampler {
    pub fn new(max_inner: usize, max_size: usize) -> Self {
        EdgeSampler { max_inner, max_size, max_edges: 100_000, cache: HashMap::new() }
    }

    /// All edges out of `a` landing on matrices of size at most `max_size`.
    pub fn edges(&mut self, a: &NonnegMatrix) -> Result<&[SSEEdge]> {
        if !self.cache.contains_key(a) {
            let all = factorizations(a, self.max_inner, self.max_edges)?;
            let kept = all.into_iter().filter(|e| e.b().rows() <= self.max_size).collect();
            self.cache.insert(a.clone(), kept);
        }
        Ok(&self.cache[a])
    }

    /// A uniformly chosen edge out of `a`.
    pub fn edge<R: Rng + ?Sized>(&mut self, rng: &mut R, a: &NonnegMatrix) -> Result<SSEEdge> {
        let edges = self.edges(a)?;
        Ok(edges.choose(rng).expect("the identity edge always exists").clone())
    }

    /// A random step leaving `a`: an edge forward, or a reversed edge
    /// walked backwards.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R, a: &NonnegMatrix) -> Result<(SSEEdge, Sign)> {
        let e = self.edge(rng, a)?;
        Ok(if rng.random_bool(0.5) { (e, Sign::Forward) } else { (e.reversed(), Sign::Backward) })
    }

    /// A random path of `len` steps from `a`.
    pub fn path<R: Rng + ?Sized>(&mut self, rng: &mut R, a: &NonnegMatrix, len: usize) -> Result<SSEPath> {
        let mut p = SSEPath::empty(a.clone());
        for _ in 0..len {
            let (e, s) = self.step(rng, p.end())?;
            p.push(e, s)?;
        }
        Ok(p)
    }

    /// A random conjugacy composed of `len` elementary codes or inverses,
    /// together with the path it was built from.
    pub fn conjugacy<R: Rng + ?Sized>(
        &mut self,
        rng: &mut R,
        a: &NonnegMatrix,
        len: usize,
    ) -> Result<(BlockCode, SSEPath)> {
        let p = self.path(rng, a, len)?;
        Ok((compose_path(&p)?, p))
    }
}

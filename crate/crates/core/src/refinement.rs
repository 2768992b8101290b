//! Refinement of tuples of conjugacies with a common domain.
//!
//! The star product `φ_1 ★ … ★ φ_n` sends `x` to the sequence of tuples
//! `(φ_1(x)_i, …, φ_n(x)_i)`. When its image is a 1-step shift of finite type
//! the tuple lies in `H_n`, and `δ_n` is the star product followed by the
//! lexicographic numbering of the tuple alphabet.
//!
//! Markovness is decided exactly: the image is compared with its 1-step
//! closure by language equality of presentations.

use std::collections::HashMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, RngExt};
use serde::Serialize;

use crate::code::{BlockCode, BlockMap, Window};
use crate::complex::factorizations;
use crate::edge::code_between;
use crate::error::{Error, Result};
use crate::matrix::NonnegMatrix;
use crate::shift::{Presentation, VertexShift, WordList, language_equal};

/// The image of a star product, with enough data to build `δ`.
#[derive(Clone, Debug)]
pub struct StarImage {
    /// Tuple alphabet `L_1` of the image, sorted lexicographically.
    pub alphabet: Vec<Vec<u32>>,
    /// Presentation of the image whose labels index `alphabet`.
    pub presentation: Presentation,
    /// Transition matrix of the 1-step closure on `alphabet`.
    pub closure: NonnegMatrix,
    window: Window,
    words: WordList,
    labels: Vec<u32>,
}

fn common_domain(codes: &[BlockCode]) -> Result<Arc<VertexShift>> {
    let first = codes.first().ok_or_else(|| Error::InvalidCode("refinement of an empty tuple".into()))?;
    if codes.iter().any(|c| c.domain() != first.domain()) {
        return Err(Error::ShiftMismatch("codes do not share a domain".into()));
    }
    Ok(first.domain().clone())
}

/// Builds the star product image of conjugacies with a common domain.
pub fn star(codes: &[BlockCode]) -> Result<StarImage> {
    let x = common_domain(codes)?;
    let window = codes.iter().map(BlockCode::window).reduce(|a, b| a.hull(&b)).expect("nonempty");
    let width = window.width();
    let words = x.words(width);
    let offsets: Vec<(usize, usize)> =
        codes.iter().map(|c| ((c.window().left - window.left) as usize, c.window().width())).collect();
    let tuples: Vec<Vec<u32>> = words
        .iter()
        .map(|w| {
            codes.iter().zip(&offsets).map(|(c, &(o, k))| c.map().lookup(&w[o..o + k])).collect::<Result<Vec<u32>>>()
        })
        .collect::<Result<_>>()?;
    let mut alphabet = tuples.clone();
    alphabet.sort();
    alphabet.dedup();
    let index: HashMap<&[u32], u32> = alphabet.iter().enumerate().map(|(i, t)| (t.as_slice(), i as u32)).collect();
    let labels: Vec<u32> = tuples.iter().map(|t| index[t.as_slice()]).collect();

    // Edges are words of length max(width, 2); the label is read from the
    // first `width` symbols.
    let edge_len = width.max(2);
    let states = x.words(edge_len - 1);
    let edge_words = if edge_len == width { words.clone() } else { x.words(edge_len) };
    let mut edges = Vec::with_capacity(edge_words.len());
    for w in edge_words.iter() {
        let label = labels[words.index_of(&w[..width]).expect("allowed")];
        let s = states.index_of(&w[..edge_len - 1]).expect("allowed") as u32;
        let t = states.index_of(&w[1..]).expect("allowed") as u32;
        edges.push((s, label, t));
    }
    let presentation = Presentation::new(states.len(), alphabet.len(), edges)?;

    let mut incoming: Vec<Vec<u32>> = vec![Vec::new(); states.len()];
    let mut outgoing: Vec<Vec<u32>> = vec![Vec::new(); states.len()];
    for &(s, l, t) in &presentation.edges {
        outgoing[s as usize].push(l);
        incoming[t as usize].push(l);
    }
    let mut pairs = Vec::new();
    for (ins, outs) in incoming.iter_mut().zip(outgoing.iter_mut()) {
        ins.sort_unstable();
        ins.dedup();
        outs.sort_unstable();
        outs.dedup();
        for &u in ins.iter() {
            for &v in outs.iter() {
                pairs.push((u as usize, v as usize, 1));
            }
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    let closure = NonnegMatrix::from_triplets(alphabet.len(), alphabet.len(), pairs)?;
    Ok(StarImage { alphabet, presentation, closure, window, words, labels })
}

/// Whether a tuple lies in `H_n`, with `δ_n` or a separating word.
#[derive(Clone, Debug, Serialize)]
pub struct RefinementVerdict {
    pub in_h: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<BlockCode>,
    /// A word of the 1-step closure missing from the image (1-based tuples).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<Vec<u32>>>,
}

/// Decides Markovness of the star image and builds `δ` for any invertible
/// conjugacies with a common domain.
pub fn markov_refinement(codes: &[BlockCode]) -> Result<RefinementVerdict> {
    let img = star(codes)?;
    let closure_shift = VertexShift::new(img.closure.clone())
        .map_err(|e| Error::Invariant(format!("1-step closure is not a vertex shift: {e}")))?;
    let cmp = language_equal(&img.presentation, &closure_shift.presentation())?;
    if !cmp.equal {
        let witness =
            cmp.witness.map(|w| w.iter().map(|&l| img.alphabet[l as usize].iter().map(|a| a + 1).collect()).collect());
        return Ok(RefinementVerdict { in_h: false, delta: None, witness });
    }
    let x = codes[0].domain().clone();
    let z = Arc::new(closure_shift);
    let first_inv = codes[0].inverse_map().ok_or(Error::NotInvertible)?;
    let words = img.words.clone();
    let labels = img.labels.clone();
    let fwd = BlockMap::from_fn(x, z.clone(), img.window, |w| Ok(labels[words.index_of(w).expect("allowed")]))?;
    let alphabet = img.alphabet;
    let proj = BlockMap::from_fn(z, codes[0].codomain().clone(), Window::point(0), |w| Ok(alphabet[w[0] as usize][0]))?;
    let inv = proj.then(first_inv)?;
    let delta = BlockCode::trusted(fwd, Some(inv)).normalize();
    Ok(RefinementVerdict { in_h: true, delta: Some(delta), witness: None })
}

/// `δ_n` on a tuple of elementary codes (all in `H`, or all in `H^-1`).
pub fn delta(codes: &[BlockCode]) -> Result<RefinementVerdict> {
    common_domain(codes)?;
    let all_h = codes.iter().all(BlockCode::is_elementary);
    let all_inv = codes.iter().all(BlockCode::is_inverse_elementary);
    if !all_h && !all_inv {
        return Err(Error::NotElementary(
            "refinement needs codes that are all elementary or all inverse elementary".into(),
        ));
    }
    markov_refinement(codes)
}

/// `φ ≅ ψ`: `ψ ∘ φ^-1` is an alphabet bijection.
pub fn equivalent(f: &BlockCode, g: &BlockCode) -> Result<bool> {
    if f.domain() != g.domain() {
        return Err(Error::ShiftMismatch("codes do not share a domain".into()));
    }
    Ok(f.require_inverse()?.then(g)?.is_alphabet_bijection())
}

/// `φ -> ψ`: `ψ ∘ φ^-1` is elementary.
pub fn arrow(f: &BlockCode, g: &BlockCode) -> Result<bool> {
    if f.domain() != g.domain() {
        return Err(Error::ShiftMismatch("codes do not share a domain".into()));
    }
    Ok(f.require_inverse()?.then(g)?.is_elementary())
}

/// The elementary codes out of `X_A`, one for each factorization `A = RS`
/// with inner dimension at most `max_inner`.
pub fn elementary_pool(a: &NonnegMatrix, max_inner: usize, max_edges: usize) -> Result<Vec<BlockCode>> {
    let x = Arc::new(VertexShift::new(a.clone())?);
    factorizations(a, max_inner, max_edges)?
        .iter()
        .map(|e| {
            let y = Arc::new(VertexShift::new(e.b().clone())?);
            code_between(e, x.clone(), y)
        })
        .collect()
}

/// Refinement of `ψ_1, …, ψ_n` all pointing to `φ`.
#[derive(Clone, Debug, Serialize)]
pub struct GroupRefinement {
    pub delta: BlockCode,
    pub points_to_target: bool,
}

/// `δ(ψ_1, …, ψ_n, φ)` for `ψ_i -> φ`; the result points to `φ`.
pub fn group_refine(psis: &[BlockCode], phi: &BlockCode) -> Result<GroupRefinement> {
    for (i, p) in psis.iter().enumerate() {
        if !arrow(p, phi)? {
            return Err(Error::NotElementary(format!("argument {} does not point to the target", i + 1)));
        }
    }
    let mut all: Vec<BlockCode> = psis.to_vec();
    all.push(phi.clone());
    let verdict = markov_refinement(&all)?;
    let d = verdict
        .delta
        .ok_or_else(|| Error::Invariant("refinement of arrows into a common target is not Markov".into()))?;
    let points = arrow(&d, phi)?;
    Ok(GroupRefinement { delta: d, points_to_target: points })
}

/// One line of the axiom report.
#[derive(Clone, Debug, Serialize)]
pub struct AxiomOutcome {
    pub axiom: &'static str,
    pub checked: usize,
    pub failures: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub pool_size: usize,
    pub arrows: usize,
    pub outcomes: Vec<AxiomOutcome>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.failures == 0)
    }
}

struct Tally {
    outcomes: Vec<AxiomOutcome>,
}

impl Tally {
    fn record(&mut self, axiom: &'static str, ok: bool, detail: impl FnOnce() -> String) {
        let o = match self.outcomes.iter_mut().find(|o| o.axiom == axiom) {
            Some(o) => o,
            None => {
                self.outcomes.push(AxiomOutcome { axiom, checked: 0, failures: 0, first_failure: None });
                self.outcomes.last_mut().unwrap()
            }
        };
        o.checked += 1;
        if !ok {
            o.failures += 1;
            if o.first_failure.is_none() {
                o.first_failure = Some(detail());
            }
        }
    }
}

const AXIOMS: [&str; 12] = [
    "equivalent",
    "triv-H",
    "triv-delta",
    "permutation-H",
    "permutation-delta",
    "grouping-H",
    "grouping-delta",
    "drop-H",
    "drop-delta",
    "arrow-2-H",
    "arrow-3-H",
    "arrow-delta",
];

fn random_bijection<R: Rng + ?Sized>(c: &BlockCode, rng: &mut R) -> Result<BlockCode> {
    let mut perm: Vec<u32> = (0..c.codomain().size() as u32).collect();
    perm.shuffle(rng);
    c.relabel_codomain(&perm)
}

fn in_h(codes: &[BlockCode]) -> Result<RefinementVerdict> {
    markov_refinement(codes)
}

/// Checks the refinement axioms on a pool of elementary codes from a common
/// domain. Arrow axioms run over every configuration in the pool; the
/// remaining axioms over `trials` random tuples of length at most 3.
pub fn verify_refinement_axioms<R: Rng + ?Sized>(
    pool: &[BlockCode],
    trials: usize,
    rng: &mut R,
) -> Result<AxiomReport> {
    common_domain(pool)?;
    if let Some(i) = pool.iter().position(|c| !c.is_elementary()) {
        return Err(Error::NotElementary(format!("pool member {} is not elementary", i + 1)));
    }
    let p = pool.len();
    let mut to = vec![vec![false; p]; p];
    let mut arrows = 0;
    for i in 0..p {
        for j in 0..p {
            to[i][j] = arrow(&pool[i], &pool[j])?;
            arrows += usize::from(to[i][j]);
        }
    }
    let mut t = Tally {
        outcomes: AXIOMS
            .iter()
            .map(|&axiom| AxiomOutcome { axiom, checked: 0, failures: 0, first_failure: None })
            .collect(),
    };

    // Exchangeability and the arrow axioms over all arrow configurations.
    for i in 0..p {
        for j in 0..p {
            if !to[i][j] {
                continue;
            }
            let a = random_bijection(&pool[i], rng)?;
            let b = random_bijection(&pool[j], rng)?;
            let ok = equivalent(&pool[i], &a)? && equivalent(&pool[j], &b)? && arrow(&a, &b)?;
            t.record("equivalent", ok, || format!("pool {} -> {}", i + 1, j + 1));
            for k in 0..p {
                if to[i][k] && k != j {
                    let ok = in_h(&[pool[j].clone(), pool[i].clone(), pool[k].clone()])?.in_h;
                    t.record("arrow-2-H", ok, || format!("{} <- {} -> {}", j + 1, i + 1, k + 1));
                }
                if to[k][j] && k != i {
                    let ok = in_h(&[pool[i].clone(), pool[j].clone(), pool[k].clone()])?.in_h;
                    t.record("arrow-3-H", ok, || format!("{} -> {} <- {}", i + 1, j + 1, k + 1));
                }
            }
        }
    }
    let arrow_pairs: Vec<(usize, usize)> =
        (0..p).flat_map(|i| (0..p).map(move |j| (i, j))).filter(|&(i, j)| to[i][j]).collect();
    for _ in 0..if arrow_pairs.is_empty() { 0 } else { trials } {
        let (a, b) = arrow_pairs[rng.random_range(0..arrow_pairs.len())];
        let (c, d) = arrow_pairs[rng.random_range(0..arrow_pairs.len())];
        let lhs = in_h(&[pool[a].clone(), pool[c].clone()])?;
        let rhs = in_h(&[pool[b].clone(), pool[d].clone()])?;
        if let (Some(l), Some(r)) = (lhs.delta, rhs.delta) {
            let ok = arrow(&l, &r)?;
            t.record("arrow-delta", ok, || format!("δ({}, {}) -> δ({}, {})", a + 1, c + 1, b + 1, d + 1));
        }
    }

    for (i, c) in pool.iter().enumerate() {
        let v = in_h(std::slice::from_ref(c))?;
        t.record("triv-H", v.in_h, || format!("pool {}", i + 1));
        if let Some(d) = v.delta {
            let ok = equivalent(&d, c)?;
            t.record("triv-delta", ok, || format!("pool {}", i + 1));
        }
    }

    let pick = |rng: &mut R, n: usize| -> Vec<usize> { (0..n).map(|_| rng.random_range(0..p)).collect() };
    let codes_of = |idx: &[usize]| -> Vec<BlockCode> { idx.iter().map(|&i| pool[i].clone()).collect() };
    for _ in 0..trials {
        let n = rng.random_range(1..=3usize);
        let idx = pick(rng, n);
        let base = in_h(&codes_of(&idx))?;

        let mut perm = idx.clone();
        perm.shuffle(rng);
        let permuted = in_h(&codes_of(&perm))?;
        t.record("permutation-H", base.in_h == permuted.in_h, || format!("{idx:?} vs {perm:?}"));
        if let (Some(a), Some(b)) = (&base.delta, &permuted.delta) {
            t.record("permutation-delta", equivalent(a, b)?, || format!("{idx:?} vs {perm:?}"));
        }

        let mut doubled = vec![idx[0]];
        doubled.extend(&idx);
        let dropped = in_h(&codes_of(&doubled))?;
        t.record("drop-H", base.in_h == dropped.in_h, || format!("{doubled:?}"));
        if let (Some(a), Some(b)) = (&base.delta, &dropped.delta) {
            t.record("drop-delta", equivalent(a, b)?, || format!("{doubled:?}"));
        }

        // Grouping: k groups of n codes each.
        let k = rng.random_range(1..=2usize);
        let groups: Vec<Vec<usize>> = (0..k).map(|_| pick(rng, n)).collect();
        let inner = groups.iter().map(|g| in_h(&codes_of(g))).collect::<Result<Vec<_>>>()?;
        if inner.iter().all(|v| v.in_h) {
            let deltas: Vec<BlockCode> = inner.into_iter().map(|v| v.delta.unwrap()).collect();
            let flat: Vec<usize> = groups.concat();
            let outer = in_h(&deltas)?;
            let whole = in_h(&codes_of(&flat))?;
            t.record("grouping-H", outer.in_h == whole.in_h, || format!("{groups:?}"));
            if let (Some(a), Some(b)) = (&outer.delta, &whole.delta) {
                t.record("grouping-delta", equivalent(a, b)?, || format!("{groups:?}"));
            }
        }
    }
    Ok(AxiomReport { pool_size: p, arrows, outcomes: t.outcomes })
}

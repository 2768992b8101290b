//! Decomposition of a conjugacy into elementary conjugacies.
//!
//! A code `f` is rewritten as `f = P ∘ g ∘ Q` where `Q` and `P` are products
//! of refinements `δ(id, τ_g)` and `δ(id, τ_g ∘ g)`. Each step shrinks the
//! window of `g` (first phase) or, once `g` is one-block, the window of its
//! inverse (second phase) by one coordinate; the rightmost offset goes first.
//! The loop stops as soon as `g` is elementary or inverse elementary.

use serde::Serialize;

use crate::code::{BlockCode, Window};
use crate::complex::{PathStep, SSEPath, Sign, compose_path};
use crate::edge::{SSEEdge, edge_from_code};
use crate::error::{Error, Result};
use crate::refinement::markov_refinement;

/// Where a step sits in `f = P ∘ g ∘ Q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Pre,
    Core,
    Post,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecompositionStep {
    pub edge: SSEEdge,
    pub sign: Sign,
    pub side: Side,
}

#[derive(Clone, Debug, Serialize)]
pub struct Decomposition {
    pub steps: Vec<DecompositionStep>,
    pub path: SSEPath,
    /// Largest alphabet met along the way.
    pub max_alphabet: usize,
}

/// The signed edge realising a code in `H` or `H^-1`.
pub fn signed_edge(c: &BlockCode) -> Result<(SSEEdge, Sign)> {
    if c.is_elementary() {
        Ok((edge_from_code(c)?, Sign::Forward))
    } else if c.is_inverse_elementary() {
        Ok((edge_from_code(&c.require_inverse()?)?, Sign::Backward))
    } else {
        Err(Error::NotElementary("code is neither elementary nor inverse elementary".into()))
    }
}

fn hull0(w: Window) -> Window {
    w.hull(&Window::point(0))
}

fn refine_pair(a: BlockCode, b: BlockCode) -> Result<BlockCode> {
    markov_refinement(&[a, b])?.delta.ok_or_else(|| Error::Invariant("refinement by a shift is not Markov".into()))
}

/// One reduction of the window of `f`: returns `(δ, f ∘ δ^-1)`, or `None`
/// when `f` is already one-block.
pub fn window_step(f: &BlockCode) -> Result<Option<(BlockCode, BlockCode)>> {
    let f = f.normalize();
    let w = hull0(f.window());
    let (g, target) = if w.right > 0 {
        (1, Window::new(w.left, w.right - 1)?)
    } else if w.left < 0 {
        (-1, Window::new(w.left + 1, w.right)?)
    } else {
        return Ok(None);
    };
    let x = f.domain().clone();
    let d = refine_pair(BlockCode::identity(x.clone()), BlockCode::shift_map(x, g))?;
    let next = d.require_inverse()?.then(&f)?;
    let restricted =
        next.map().restrict_to(target).ok_or_else(|| Error::Invariant(format!("window did not shrink to {target}")))?;
    let inv = next.inverse_map().cloned();
    Ok(Some((d, BlockCode::trusted(restricted, inv).normalize())))
}

/// Reduces `f` to a one-block code `g` with `f = g ∘ δ_k ∘ … ∘ δ_1`.
pub fn reduce_window(f: &BlockCode) -> Result<(BlockCode, Vec<BlockCode>)> {
    let mut cur = f.normalize();
    let mut pre = Vec::new();
    while let Some((d, next)) = window_step(&cur)? {
        pre.push(d);
        cur = next;
    }
    Ok((cur, pre))
}

/// One reduction of the inverse window of a one-block `f`: returns
/// `(ψ_1, ψ_2, ψ_2 ∘ f ∘ ψ_1^-1)`, or `None` when `f^-1` is one-block.
pub fn inverse_window_step(f: &BlockCode) -> Result<Option<(BlockCode, BlockCode, BlockCode)>> {
    let f = f.normalize();
    if f.map().restrict_to(Window::point(0)).is_none() {
        return Err(Error::InvalidCode("inverse window reduction needs a one-block code".into()));
    }
    let inv_w = hull0(f.inverse_window().ok_or(Error::NotInvertible)?);
    let (g, target) = if inv_w.right > 0 {
        (1, Window::new(inv_w.left, inv_w.right - 1)?)
    } else if inv_w.left < 0 {
        (-1, Window::new(inv_w.left + 1, inv_w.right)?)
    } else {
        return Ok(None);
    };
    let (x, y) = (f.domain().clone(), f.codomain().clone());
    let psi1 = refine_pair(BlockCode::identity(x), f.then(&BlockCode::shift_map(y.clone(), g))?)?;
    let psi2 = refine_pair(BlockCode::identity(y.clone()), BlockCode::shift_map(y, g))?;
    let next = psi1.require_inverse()?.then(&f)?.then(&psi2)?;
    let fwd = next
        .map()
        .restrict_to(Window::point(0))
        .ok_or_else(|| Error::Invariant("refined code is not one-block".into()))?;
    let inv = next
        .inverse_map()
        .and_then(|m| m.restrict_to(target))
        .ok_or_else(|| Error::Invariant(format!("inverse window did not shrink to {target}")))?;
    Ok(Some((psi1, psi2, BlockCode::trusted(fwd, Some(inv)).normalize())))
}

/// Reduces a one-block `f` to an alphabet bijection `g` with
/// `f = ψ_2^-1 ∘ g ∘ ψ_1` for the accumulated products.
pub fn reduce_inverse_window(f: &BlockCode) -> Result<(BlockCode, Vec<BlockCode>, Vec<BlockCode>)> {
    let mut cur = f.normalize();
    let (mut pre, mut post) = (Vec::new(), Vec::new());
    while let Some((p1, p2, next)) = inverse_window_step(&cur)? {
        pre.push(p1);
        post.push(p2);
        cur = next;
    }
    Ok((cur, pre, post))
}

/// Default bound on the number of reduction steps.
pub const MAX_STEPS: usize = 256;

/// Writes an invertible code as a path of elementary edges whose composite
/// equals it.
pub fn decompose(f: &BlockCode) -> Result<Decomposition> {
    decompose_bounded(f, MAX_STEPS)
}

/// [`decompose`] with at most `max_steps` reductions.
pub fn decompose_bounded(f: &BlockCode, max_steps: usize) -> Result<Decomposition> {
    f.require_inverse()?;
    let mut g = f.normalize();
    let mut pre: Vec<BlockCode> = Vec::new();
    let mut post: Vec<BlockCode> = Vec::new();
    let mut max_alphabet = g.domain().size().max(g.codomain().size());
    for _ in 0..max_steps {
        if g.is_elementary() || g.is_inverse_elementary() {
            break;
        }
        if let Some((d, next)) = window_step(&g)? {
            pre.push(d);
            g = next;
        } else if let Some((p1, p2, next)) = inverse_window_step(&g)? {
            pre.push(p1);
            post.insert(0, p2.require_inverse()?);
            g = next;
        } else {
            return Err(Error::Invariant("alphabet bijection was not recognised as elementary".into()));
        }
        max_alphabet = max_alphabet.max(g.domain().size()).max(g.codomain().size());
    }
    if !(g.is_elementary() || g.is_inverse_elementary()) {
        return Err(Error::ResourceBound(format!("no decomposition within {max_steps} steps")));
    }
    let mut steps = Vec::new();
    for (codes, side) in [(pre, Side::Pre), (vec![g], Side::Core), (post, Side::Post)] {
        for c in codes {
            let (edge, sign) = signed_edge(&c)?;
            steps.push(DecompositionStep { edge, sign, side });
        }
    }
    let path = SSEPath::new(
        f.domain().matrix().clone(),
        steps.iter().map(|s| PathStep { edge: s.edge.clone(), sign: s.sign }).collect(),
    )?;
    if compose_path(&path)? != *f {
        return Err(Error::Invariant("decomposition does not recompose to the input".into()));
    }
    Ok(Decomposition { steps, path, max_alphabet })
}

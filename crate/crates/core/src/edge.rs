//! Elementary strong shift equivalences `A = RS`, `B = SR` and the
//! elementary conjugacies `X_A -> X_B` they define.
//!
//! The code of an edge reads `φ(x)_i = b` for the unique `b` with
//! `R[x_i][b] = S[b][x_{i+1}] = 1`; its inverse reads `x_i = a` for the unique
//! `a` with `S[y_{i-1}][a] = R[a][y_i] = 1`.

use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize};

use crate::code::{BlockCode, BlockMap, Window};
use crate::error::{Error, Result};
use crate::matrix::NonnegMatrix;
use crate::shift::VertexShift;

/// An elementary strong shift equivalence between 0/1 matrices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SSEEdge {
    #[serde(rename = "A")]
    a: NonnegMatrix,
    #[serde(rename = "B")]
    b: NonnegMatrix,
    #[serde(rename = "R")]
    r: NonnegMatrix,
    #[serde(rename = "S")]
    s: NonnegMatrix,
}

impl SSEEdge {
    pub fn new(a: NonnegMatrix, b: NonnegMatrix, r: NonnegMatrix, s: NonnegMatrix) -> Result<Self> {
        let e = SSEEdge::from_factors(r, s)?;
        if e.a != a {
            return Err(Error::InvalidEdge("A differs from RS".into()));
        }
        if e.b != b {
            return Err(Error::InvalidEdge("B differs from SR".into()));
        }
        Ok(e)
    }

    /// The edge `RS -> SR`.
    pub fn from_factors(r: NonnegMatrix, s: NonnegMatrix) -> Result<Self> {
        if !r.is_boolean() || !s.is_boolean() {
            return Err(Error::InvalidEdge("R and S must be 0/1 matrices".into()));
        }
        let a = r.mul(&s).map_err(|e| Error::InvalidEdge(format!("RS: {e}")))?;
        let b = s.mul(&r)?;
        if a.rows() == 0 || b.rows() == 0 {
            return Err(Error::InvalidEdge("empty matrices".into()));
        }
        if !a.is_boolean() || !b.is_boolean() {
            return Err(Error::InvalidEdge("RS and SR must be 0/1 matrices".into()));
        }
        if !a.is_nondegenerate() || !b.is_nondegenerate() {
            return Err(Error::InvalidEdge("RS and SR must be nondegenerate".into()));
        }
        Ok(SSEEdge { a, b, r, s })
    }

    /// The identity edge `(I, A)`.
    pub fn identity(a: &NonnegMatrix) -> Result<Self> {
        SSEEdge::from_factors(NonnegMatrix::identity(a.rows()), a.clone())
    }

    pub fn a(&self) -> &NonnegMatrix {
        &self.a
    }

    pub fn b(&self) -> &NonnegMatrix {
        &self.b
    }

    pub fn r(&self) -> &NonnegMatrix {
        &self.r
    }

    pub fn s(&self) -> &NonnegMatrix {
        &self.s
    }

    /// The edge `(S, R): B -> A`.
    pub fn reversed(&self) -> SSEEdge {
        SSEEdge { a: self.b.clone(), b: self.a.clone(), r: self.s.clone(), s: self.r.clone() }
    }
}

#[derive(Deserialize)]
struct EdgeJson {
    #[serde(rename = "A")]
    a: NonnegMatrix,
    #[serde(rename = "B")]
    b: NonnegMatrix,
    #[serde(rename = "R")]
    r: NonnegMatrix,
    #[serde(rename = "S")]
    s: NonnegMatrix,
}

impl<'de> Deserialize<'de> for SSEEdge {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = EdgeJson::deserialize(d)?;
        SSEEdge::new(raw.a, raw.b, raw.r, raw.s).map_err(serde::de::Error::custom)
    }
}

/// The elementary conjugacy `φ_{R,S}: X_A -> X_B`, window `[0, 1]`, with its
/// inverse on window `[-1, 0]`.
pub fn code_from_edge(e: &SSEEdge) -> Result<BlockCode> {
    let x = Arc::new(VertexShift::new(e.a.clone())?);
    let y = Arc::new(VertexShift::new(e.b.clone())?);
    code_between(e, x, y)
}

/// Like [`code_from_edge`] but reuses existing shift handles.
pub fn code_between(e: &SSEEdge, x: Arc<VertexShift>, y: Arc<VertexShift>) -> Result<BlockCode> {
    if x.matrix() != &e.a || y.matrix() != &e.b {
        return Err(Error::ShiftMismatch("shifts do not match the edge".into()));
    }
    let (r, s) = (&e.r, &e.s);
    let pair = Window::new(0, 1)?;
    let fwd = BlockMap::from_fn(x.clone(), y.clone(), pair, |w| {
        r.row(w[0] as usize)
            .map(|(b, _)| b)
            .find(|&b| s.get(b, w[1] as usize) == 1)
            .map(|b| b as u32)
            .ok_or_else(|| Error::Invariant(format!("no inner symbol for {w:?}")))
    })?;
    let inv = BlockMap::from_fn(y, x, Window::new(-1, 0)?, |w| {
        s.row(w[0] as usize)
            .map(|(a, _)| a)
            .find(|&a| r.get(a, w[1] as usize) == 1)
            .map(|a| a as u32)
            .ok_or_else(|| Error::Invariant(format!("no inner symbol for {w:?}")))
    })?;
    Ok(BlockCode::trusted(fwd, Some(inv)))
}

/// The edge of an elementary code `f ∈ H`:
/// `R[a][b] = 1` iff `f(a a') = b` for some `a'`, and
/// `S[b][a] = 1` iff `f^-1(b b') = a` for some `b'`.
pub fn edge_from_code(f: &BlockCode) -> Result<SSEEdge> {
    let g = f.restrict(Window::new(0, 1)?, Window::new(-1, 0)?)?;
    let (n, m) = (f.domain().size(), f.codomain().size());
    let r = NonnegMatrix::from_triplets(n, m, g.map().table().map(|(w, v)| (w[0] as usize, v as usize, 1)))?;
    let s = NonnegMatrix::from_triplets(
        m,
        n,
        g.inverse_map().expect("restrict keeps the inverse").table().map(|(w, v)| (w[0] as usize, v as usize, 1)),
    )?;
    let squash =
        |m: NonnegMatrix| NonnegMatrix::from_triplets(m.rows(), m.cols(), m.entries().map(|(i, j, _)| (i, j, 1)));
    let e = SSEEdge::from_factors(squash(r)?, squash(s)?)
        .map_err(|err| Error::Invariant(format!("extracted edge is invalid: {err}")))?;
    if &e.a != f.domain().matrix() || &e.b != f.codomain().matrix() {
        return Err(Error::Invariant("extracted edge has the wrong endpoints".into()));
    }
    Ok(e)
}

/// Three edges `e1: A -> B`, `e2: B -> C`, `e3: A -> C`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Triangle {
    pub e1: SSEEdge,
    pub e2: SSEEdge,
    pub e3: SSEEdge,
}

/// Outcome of the triangle equations `R1R2 = R3`, `R2S3 = S1`, `S3R1 = S2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TriangleCheck {
    pub holds: bool,
    pub r1r2_eq_r3: bool,
    pub r2s3_eq_s1: bool,
    pub s3r1_eq_s2: bool,
}

/// Evaluates the three triangle equations on raw factor matrices.
pub fn triangle_equations(
    (r1, s1): (&NonnegMatrix, &NonnegMatrix),
    (r2, s2): (&NonnegMatrix, &NonnegMatrix),
    (r3, s3): (&NonnegMatrix, &NonnegMatrix),
) -> Result<TriangleCheck> {
    let eq = |x: Result<NonnegMatrix>, y: &NonnegMatrix| x.map(|x| &x == y);
    let a = eq(r1.mul(r2), r3)?;
    let b = eq(r2.mul(s3), s1)?;
    let c = eq(s3.mul(r1), s2)?;
    Ok(TriangleCheck { holds: a && b && c, r1r2_eq_r3: a, r2s3_eq_s1: b, s3r1_eq_s2: c })
}

/// Checks endpoint compatibility, then the triangle equations.
pub fn check_triangle(t: &Triangle) -> Result<TriangleCheck> {
    if t.e1.b != t.e2.a || t.e1.a != t.e3.a || t.e2.b != t.e3.b {
        return Err(Error::ShiftMismatch("triangle edges must run A -> B, B -> C and A -> C".into()));
    }
    triangle_equations((&t.e1.r, &t.e1.s), (&t.e2.r, &t.e2.s), (&t.e3.r, &t.e3.s))
}

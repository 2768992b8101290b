//! Strong shift equivalence over nonnegative integer matrices that may have
//! zero rows or columns.
//!
//! An edge `A = RS`, `B = SR` is split into four triangles through the
//! intermediate vertices `A_KK`, `BE_S` and `B_LL`, where `K` and `L` are the
//! nonzero rows of `A` and `B` and `E_S` marks the nonzero rows of `S`.
//! Repeating the row split, and the same on transposes for columns, moves any
//! path onto the cores of its vertices.

use serde::{Deserialize, Deserializer, Serialize};

use crate::complex::{PathStep, SSEPath, Sign};
use crate::edge::{SSEEdge, TriangleCheck, triangle_equations};
use crate::error::{Error, Result};
use crate::matrix::{IndexSet, NonnegMatrix, e_s_matrix};

/// `A = RS`, `B = SR` over the nonnegative integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct DegSSEEdge {
    #[serde(rename = "A")]
    a: NonnegMatrix,
    #[serde(rename = "B")]
    b: NonnegMatrix,
    #[serde(rename = "R")]
    r: NonnegMatrix,
    #[serde(rename = "S")]
    s: NonnegMatrix,
}

impl DegSSEEdge {
    pub fn from_factors(r: NonnegMatrix, s: NonnegMatrix) -> Result<Self> {
        let a = r.mul(&s).map_err(|e| Error::InvalidEdge(format!("RS: {e}")))?;
        let b = s.mul(&r)?;
        Ok(DegSSEEdge { a, b, r, s })
    }

    pub fn new(a: NonnegMatrix, b: NonnegMatrix, r: NonnegMatrix, s: NonnegMatrix) -> Result<Self> {
        let e = DegSSEEdge::from_factors(r, s)?;
        if e.a != a || e.b != b {
            return Err(Error::InvalidEdge("A = RS and B = SR must hold".into()));
        }
        Ok(e)
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

    /// `(S^T, R^T): A^T -> B^T`.
    pub fn transpose(&self) -> DegSSEEdge {
        DegSSEEdge { a: self.a.transpose(), b: self.b.transpose(), r: self.s.transpose(), s: self.r.transpose() }
    }

    /// `(R_{J_A x J_B}, S_{J_B x J_A})` on the cores of both ends.
    pub fn restrict_to_cores(&self) -> Result<DegSSEEdge> {
        let ja = self.a.core_indices()?;
        let jb = self.b.core_indices()?;
        if ja.is_empty() || jb.is_empty() {
            return Err(Error::EmptyCore("an endpoint has no cycle".into()));
        }
        let e = DegSSEEdge::from_factors(self.r.submatrix(&ja, &jb)?, self.s.submatrix(&jb, &ja)?)?;
        if e.a != self.a.submatrix(&ja, &ja)? || e.b != self.b.submatrix(&jb, &jb)? {
            return Err(Error::Invariant("core restriction of an edge is not an edge".into()));
        }
        Ok(e)
    }

    /// The 0/1 nondegenerate edge, when this is one.
    pub fn to_sse(&self) -> Result<SSEEdge> {
        SSEEdge::new(self.a.clone(), self.b.clone(), self.r.clone(), self.s.clone())
    }
}

impl From<&SSEEdge> for DegSSEEdge {
    fn from(e: &SSEEdge) -> Self {
        DegSSEEdge { a: e.a().clone(), b: e.b().clone(), r: e.r().clone(), s: e.s().clone() }
    }
}

#[derive(Deserialize)]
struct DegEdgeJson {
    #[serde(rename = "A")]
    a: NonnegMatrix,
    #[serde(rename = "B")]
    b: NonnegMatrix,
    #[serde(rename = "R")]
    r: NonnegMatrix,
    #[serde(rename = "S")]
    s: NonnegMatrix,
}

impl<'de> Deserialize<'de> for DegSSEEdge {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = DegEdgeJson::deserialize(d)?;
        DegSSEEdge::new(raw.a, raw.b, raw.r, raw.s).map_err(serde::de::Error::custom)
    }
}

/// Three edges `e1: A -> B`, `e2: B -> C`, `e3: A -> C`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegTriangle {
    pub e1: DegSSEEdge,
    pub e2: DegSSEEdge,
    pub e3: DegSSEEdge,
}

impl DegTriangle {
    pub fn check(&self) -> Result<TriangleCheck> {
        if self.e1.b != self.e2.a || self.e1.a != self.e3.a || self.e2.b != self.e3.b {
            return Err(Error::ShiftMismatch("triangle edges must run A -> B, B -> C and A -> C".into()));
        }
        triangle_equations((&self.e1.r, &self.e1.s), (&self.e2.r, &self.e2.s), (&self.e3.r, &self.e3.s))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NamedCheck {
    pub name: String,
    pub holds: bool,
}

/// The four triangles splitting an edge, with every equation checked.
#[derive(Clone, Debug, Serialize)]
pub struct DegTriangulation {
    pub k: IndexSet,
    pub l: IndexSet,
    pub e_s: NonnegMatrix,
    pub triangles: Vec<DegTriangle>,
    pub equations: Vec<NamedCheck>,
}

impl DegTriangulation {
    pub fn all_hold(&self) -> bool {
        self.equations.iter().all(|c| c.holds)
    }

    /// The edge `A_KK -> B_LL` on nonzero rows.
    pub fn top_edge(&self) -> &DegSSEEdge {
        &self.triangles[3].e3
    }
}

/// `I_{N x K}`: the columns of the identity indexed by `K`.
fn inclusion(k: &IndexSet) -> NonnegMatrix {
    NonnegMatrix::from_triplets(k.parent(), k.len(), k.members().iter().enumerate().map(|(p, &i)| (i, p, 1)))
        .expect("in range")
}

fn rows_of(m: &NonnegMatrix, k: &IndexSet) -> Result<NonnegMatrix> {
    m.submatrix(k, &IndexSet::full(m.cols()))
}

fn cols_of(m: &NonnegMatrix, k: &IndexSet) -> Result<NonnegMatrix> {
    m.submatrix(&IndexSet::full(m.rows()), k)
}

/// Splits `e` into the four triangles and verifies all their equations.
pub fn deg_triangulate(e: &DegSSEEdge) -> Result<DegTriangulation> {
    let (a, b, r, s) = (&e.a, &e.b, &e.r, &e.s);
    let k = a.nonzero_rows();
    let l = b.nonzero_rows();
    let es = e_s_matrix(s);
    let re = r.mul(&es)?;
    let be = b.mul(&es)?;
    let all_m = IndexSet::full(s.rows());

    let bottom = e.clone();
    let shrink_b = DegSSEEdge::from_factors(es.clone(), b.clone())?;
    let diag = DegSSEEdge::from_factors(re.clone(), s.clone())?;
    let left = DegSSEEdge::from_factors(inclusion(&k), rows_of(a, &k)?)?;
    let mid = DegSSEEdge::from_factors(rows_of(&re, &k)?, cols_of(s, &k)?)?;
    let right_top = DegSSEEdge::from_factors(cols_of(&es, &l)?, rows_of(&be, &l)?)?;
    let right = DegSSEEdge::from_factors(inclusion(&l), rows_of(b, &l)?)?;
    let top = DegSSEEdge::from_factors(re.submatrix(&k, &l)?, s.submatrix(&l, &k)?)?;

    let mut eqs = Vec::new();
    let mut check = |name: &str, holds: bool| eqs.push(NamedCheck { name: name.to_string(), holds });
    let akk = a.submatrix(&k, &k)?;
    let bll = b.submatrix(&l, &l)?;
    let sub = |m: &NonnegMatrix, x: &IndexSet, y: &IndexSet| m.submatrix(x, y);
    check("RS = A", bottom.a == *a);
    check("SR = B", bottom.b == *b);
    check("E_S B = B", shrink_b.a == *b);
    check("B E_S = BE", shrink_b.b == be);
    check("R E_S S = A", diag.a == *a);
    check("S R E_S = BE", diag.b == be);
    check("I_NK A_KN = A", left.a == *a);
    check("A_KN I_NK = A_KK", left.b == akk);
    check("(RE)_KM S_MK = A_KK", mid.a == akk);
    check("S_MK (RE)_KM = BE", mid.b == be);
    check("(E_S)_ML (BE)_LM = BE", right_top.a == be);
    check("(BE)_LM (E_S)_ML = B_LL", right_top.b == bll);
    check("I_ML B_LM = B", right.a == *b);
    check("B_LM I_ML = B_LL", right.b == bll);
    check("(RE)_KL S_LK = A_KK", top.a == akk);
    check("S_LK (RE)_KL = B_LL", top.b == bll);
    check("SRE = BE", sub(s, &all_m, &k)?.mul(&sub(&re, &k, &all_m)?)? == be);
    check("RES = A", sub(&re, &k, &l)?.mul(&sub(s, &l, &k)?)? == akk);

    let triangles = vec![
        DegTriangle { e1: bottom, e2: shrink_b.clone(), e3: diag.clone() },
        DegTriangle { e1: left, e2: mid.clone(), e3: diag },
        DegTriangle { e1: shrink_b, e2: right_top.clone(), e3: right },
        DegTriangle { e1: mid, e2: right_top, e3: top },
    ];
    for (n, t) in triangles.iter().enumerate() {
        let c = t.check()?;
        check(&format!("T{} R1R2 = R3", n + 1), c.r1r2_eq_r3);
        check(&format!("T{} R2S3 = S1", n + 1), c.r2s3_eq_s1);
        check(&format!("T{} S3R1 = S2", n + 1), c.s3r1_eq_s2);
    }
    let out = DegTriangulation { k, l, e_s: es, triangles, equations: eqs };
    if let Some(bad) = out.equations.iter().find(|c| !c.holds) {
        return Err(Error::Invariant(format!("triangulation equation failed: {}", bad.name)));
    }
    Ok(out)
}

/// Restricts a triangle to the cores `J_A`, `J_B`, `J_C`.
pub fn restrict_triangle(t: &DegTriangle) -> Result<DegTriangle> {
    t.check()?;
    let out =
        DegTriangle { e1: t.e1.restrict_to_cores()?, e2: t.e2.restrict_to_cores()?, e3: t.e3.restrict_to_cores()? };
    if !out.check()?.holds {
        return Err(Error::Invariant("restricted triangle fails its equations".into()));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegStep {
    pub edge: DegSSEEdge,
    pub sign: Sign,
}

impl DegStep {
    fn source(&self) -> &NonnegMatrix {
        match self.sign {
            Sign::Forward => &self.edge.a,
            Sign::Backward => &self.edge.b,
        }
    }

    fn target(&self) -> &NonnegMatrix {
        match self.sign {
            Sign::Forward => &self.edge.b,
            Sign::Backward => &self.edge.a,
        }
    }
}

/// A path of edges between possibly degenerate matrices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegPath {
    base: NonnegMatrix,
    steps: Vec<DegStep>,
    degenerate: bool,
}

impl DegPath {
    pub fn new(base: NonnegMatrix, steps: Vec<DegStep>) -> Result<Self> {
        let mut cur = &base;
        for (k, st) in steps.iter().enumerate() {
            if st.source() != cur {
                return Err(Error::ShiftMismatch(format!("step {} does not start where the path is", k + 1)));
            }
            cur = st.target();
        }
        Ok(DegPath { base, steps, degenerate: true })
    }

    pub fn base(&self) -> &NonnegMatrix {
        &self.base
    }

    pub fn steps(&self) -> &[DegStep] {
        &self.steps
    }

    pub fn end(&self) -> &NonnegMatrix {
        self.steps.last().map_or(&self.base, DegStep::target)
    }

    pub fn vertices(&self) -> Vec<&NonnegMatrix> {
        std::iter::once(&self.base).chain(self.steps.iter().map(DegStep::target)).collect()
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.vertices().iter().all(|v| v.is_nondegenerate())
    }

    /// Every edge restricted to the cores of its ends.
    pub fn restrict_to_cores(&self) -> Result<DegPath> {
        let steps = self
            .steps
            .iter()
            .map(|s| Ok(DegStep { edge: s.edge.restrict_to_cores()?, sign: s.sign }))
            .collect::<Result<Vec<_>>>()?;
        DegPath::new(self.base.core()?, steps)
    }

    /// The same path as a path of 0/1 nondegenerate edges.
    pub fn to_sse_path(&self) -> Result<SSEPath> {
        let steps = self
            .steps
            .iter()
            .map(|s| Ok(PathStep { edge: s.edge.to_sse()?, sign: s.sign }))
            .collect::<Result<Vec<_>>>()?;
        SSEPath::new(self.base.clone(), steps)
    }

    fn transpose(&self) -> DegPath {
        DegPath {
            base: self.base.transpose(),
            steps: self.steps.iter().map(|s| DegStep { edge: s.edge.transpose(), sign: s.sign }).collect(),
            degenerate: true,
        }
    }

    /// Replaces every edge by its top edge on nonzero rows.
    fn row_pass(&self) -> Result<DegPath> {
        let mut steps = Vec::with_capacity(self.steps.len());
        for st in &self.steps {
            let tri = deg_triangulate(&st.edge)?;
            steps.push(DegStep { edge: tri.top_edge().clone(), sign: st.sign });
        }
        let k = self.base.nonzero_rows();
        DegPath::new(self.base.submatrix(&k, &k)?, steps)
    }
}

#[derive(Deserialize)]
struct DegPathJson {
    base: NonnegMatrix,
    steps: Vec<DegStep>,
    #[serde(default)]
    #[allow(dead_code)]
    degenerate: bool,
}

impl<'de> Deserialize<'de> for DegPath {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = DegPathJson::deserialize(d)?;
        DegPath::new(raw.base, raw.steps).map_err(serde::de::Error::custom)
    }
}

/// Moves a path onto the cores of its vertices through the triangulations.
///
/// Row passes drop zero rows until none remain; a column pass is a row pass
/// on the transposed path. The vertical edges at nondegenerate endpoints are
/// identity edges and are left out.
pub fn normalize_path(p: &DegPath) -> Result<DegPath> {
    for v in p.vertices() {
        if v.core_indices()?.is_empty() {
            return Err(Error::EmptyCore("a vertex of the path has no cycle".into()));
        }
    }
    let bound: usize = p.vertices().iter().map(|v| v.rows()).sum::<usize>() + 1;
    let mut cur = p.clone();
    let mut rounds = 0;
    while !cur.is_nondegenerate() {
        if rounds > bound {
            return Err(Error::Invariant("normalization did not terminate".into()));
        }
        while cur.vertices().iter().any(|v| v.nonzero_rows().len() < v.rows()) {
            cur = cur.row_pass()?;
            rounds += 1;
        }
        let mut t = cur.transpose();
        while t.vertices().iter().any(|v| v.nonzero_rows().len() < v.rows()) {
            t = t.row_pass()?;
            rounds += 1;
        }
        cur = t.transpose();
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[u64]]) -> NonnegMatrix {
        NonnegMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn triangulation_of_a_degenerate_edge() {
        // S has a zero row, so B = SR has a zero row.
        let r = m(&[&[1, 1], &[0, 1]]);
        let s = m(&[&[1, 0], &[0, 0]]);
        let e = DegSSEEdge::from_factors(r, s).unwrap();
        assert_eq!(e.a(), &m(&[&[1, 0], &[0, 0]]));
        let t = deg_triangulate(&e).unwrap();
        assert!(t.all_hold());
        assert_eq!(t.k.members(), &[0]);
        assert_eq!(t.l.members(), &[0]);
        assert_eq!(t.e_s, m(&[&[1, 0], &[0, 0]]));
        assert_eq!(t.top_edge().a(), &m(&[&[1]]));
        for tri in &t.triangles {
            assert!(tri.check().unwrap().holds);
        }
    }

    #[test]
    fn nondegenerate_edges_triangulate_trivially() {
        let r = m(&[&[1, 1, 0], &[0, 0, 1]]);
        let s = m(&[&[1, 0], &[0, 1], &[1, 0]]);
        let e = DegSSEEdge::from_factors(r.clone(), s.clone()).unwrap();
        let t = deg_triangulate(&e).unwrap();
        assert!(t.k.is_full() && t.l.is_full());
        assert_eq!(t.top_edge(), &e);
    }

    #[test]
    fn core_restriction_of_a_triangle() {
        // A has a transient index 1 feeding the loop at index 0.
        let a = m(&[&[1, 0], &[1, 0]]);
        let id = DegSSEEdge::from_factors(NonnegMatrix::identity(2), a.clone()).unwrap();
        let t = DegTriangle { e1: id.clone(), e2: id.clone(), e3: id };
        let rt = restrict_triangle(&t).unwrap();
        assert_eq!(rt.e1.a(), &m(&[&[1]]));
        let dead = m(&[&[0, 1], &[0, 0]]);
        let e = DegSSEEdge::from_factors(NonnegMatrix::identity(2), dead).unwrap();
        let t = DegTriangle { e1: e.clone(), e2: e.clone(), e3: e };
        assert!(matches!(restrict_triangle(&t), Err(Error::EmptyCore(_))));
    }

    #[test]
    fn path_through_a_degenerate_vertex_normalizes_to_cores() {
        // Golden mean A = RS with an extra inner index whose row of S is zero.
        let r = m(&[&[1, 1, 1], &[1, 0, 0]]);
        let s = m(&[&[1, 0], &[0, 1], &[0, 0]]);
        let e = DegSSEEdge::from_factors(r, s).unwrap();
        assert_eq!(e.a(), &m(&[&[1, 1], &[1, 0]]));
        assert!(!e.b().is_nondegenerate());
        let back = DegSSEEdge::from_factors(e.s().clone(), e.r().clone()).unwrap();
        let p = DegPath::new(
            e.a().clone(),
            vec![DegStep { edge: e.clone(), sign: Sign::Forward }, DegStep { edge: back, sign: Sign::Forward }],
        )
        .unwrap();
        let n = normalize_path(&p).unwrap();
        assert!(n.is_nondegenerate());
        assert_eq!(n, p.restrict_to_cores().unwrap());
        let composite = crate::complex::compose_path(&n.to_sse_path().unwrap()).unwrap();
        assert_eq!(composite.domain().matrix(), e.a());
    }

    #[test]
    fn transposed_edge_is_an_edge() {
        let r = m(&[&[2, 0], &[1, 1]]);
        let s = m(&[&[0, 1], &[1, 0]]);
        let e = DegSSEEdge::from_factors(r, s).unwrap();
        let t = e.transpose();
        assert_eq!(t.a(), &e.a().transpose());
        assert_eq!(t.r().mul(t.s()).unwrap(), *t.a());
        assert_eq!(t.transpose(), e);
    }
}

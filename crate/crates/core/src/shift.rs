//! Vertex shifts, their finite languages, and labelled-graph presentations.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix::NonnegMatrix;

/// The vertex shift `X_A` of a nondegenerate 0/1 matrix. Symbol `i` is row `i`.
#[derive(Clone, Debug)]
pub struct VertexShift {
    matrix: NonnegMatrix,
    succ: Vec<Vec<u32>>,
}

impl PartialEq for VertexShift {
    fn eq(&self, other: &Self) -> bool {
        self.matrix == other.matrix
    }
}

impl Eq for VertexShift {}

impl VertexShift {
    pub fn new(matrix: NonnegMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() == 0 {
            return Err(Error::InvalidMatrix(format!(
                "vertex shift needs a nonempty square matrix, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        if !matrix.is_boolean() {
            return Err(Error::InvalidMatrix("vertex shift needs a 0/1 matrix".into()));
        }
        if !matrix.is_nondegenerate() {
            return Err(Error::InvalidMatrix("vertex shift needs a matrix without zero rows or columns".into()));
        }
        let succ = (0..matrix.rows()).map(|i| matrix.row(i).map(|(j, _)| j as u32).collect()).collect();
        Ok(VertexShift { matrix, succ })
    }

    /// The full shift on `n` symbols.
    pub fn full(n: usize) -> Result<Self> {
        VertexShift::new(NonnegMatrix::from_rows(&vec![vec![1; n]; n])?)
    }

    /// The golden mean shift `[[1,1],[1,0]]`.
    pub fn golden_mean() -> Self {
        VertexShift::new(NonnegMatrix::from_rows(&[vec![1, 1], vec![1, 0]]).unwrap()).unwrap()
    }

    pub fn matrix(&self) -> &NonnegMatrix {
        &self.matrix
    }

    pub fn size(&self) -> usize {
        self.succ.len()
    }

    pub fn successors(&self, a: u32) -> &[u32] {
        &self.succ[a as usize]
    }

    pub fn allows(&self, a: u32, b: u32) -> bool {
        self.succ[a as usize].binary_search(&b).is_ok()
    }

    pub fn is_word(&self, w: &[u32]) -> bool {
        w.iter().all(|&a| (a as usize) < self.size()) && w.windows(2).all(|p| self.allows(p[0], p[1]))
    }

    /// All allowed words of length `len`, in lexicographic order.
    pub fn words(&self, len: usize) -> WordList {
        let mut data = Vec::new();
        if len == 0 {
            return WordList { word_len: len, count: 1, data };
        }
        let mut stack: Vec<u32> = Vec::with_capacity(len);
        let mut count = 0;
        for a in 0..self.size() as u32 {
            stack.push(a);
            self.extend_words(len, &mut stack, &mut data, &mut count);
            stack.pop();
        }
        WordList { word_len: len, count, data }
    }

    fn extend_words(&self, len: usize, stack: &mut Vec<u32>, data: &mut Vec<u32>, count: &mut usize) {
        if stack.len() == len {
            data.extend_from_slice(stack);
            *count += 1;
            return;
        }
        let top = *stack.last().expect("nonempty") as usize;
        for &b in &self.succ[top] {
            stack.push(b);
            self.extend_words(len, stack, data, count);
            stack.pop();
        }
    }

    /// Presentation with one state per symbol and edge `a -> b` labelled `b`.
    pub fn presentation(&self) -> Presentation {
        let mut edges = Vec::new();
        for a in 0..self.size() as u32 {
            for &b in self.successors(a) {
                edges.push((a, b, b));
            }
        }
        Presentation::new(self.size(), self.size(), edges).expect("well formed")
    }
}

impl Serialize for VertexShift {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.matrix.serialize(s)
    }
}

impl<'de> Deserialize<'de> for VertexShift {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = NonnegMatrix::deserialize(d)?;
        VertexShift::new(m).map_err(serde::de::Error::custom)
    }
}

/// Words of a common length stored contiguously, sorted lexicographically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordList {
    word_len: usize,
    count: usize,
    data: Vec<u32>,
}

impl WordList {
    pub fn word_len(&self) -> usize {
        self.word_len
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn get(&self, i: usize) -> &[u32] {
        &self.data[i * self.word_len..(i + 1) * self.word_len]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u32]> + '_ {
        (0..self.count).map(move |i| self.get(i))
    }

    /// Position of `w` in the list, if present.
    pub fn index_of(&self, w: &[u32]) -> Option<usize> {
        if w.len() != self.word_len {
            return None;
        }
        let (mut lo, mut hi) = (0, self.count);
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.get(mid).cmp(w) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return Some(mid),
            }
        }
        None
    }
}

/// A finite directed graph with labelled edges `(source, label, target)`.
///
/// Its finite-word language is the set of label sequences of finite paths,
/// every state being initial and final.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Presentation {
    pub states: usize,
    pub labels: usize,
    pub edges: Vec<(u32, u32, u32)>,
}

impl Presentation {
    pub fn new(states: usize, labels: usize, mut edges: Vec<(u32, u32, u32)>) -> Result<Self> {
        for &(s, l, t) in &edges {
            if s as usize >= states || t as usize >= states || l as usize >= labels {
                return Err(Error::InvalidMatrix(format!("presentation edge ({s}, {l}, {t}) out of range")));
            }
        }
        edges.sort_unstable();
        edges.dedup();
        Ok(Presentation { states, labels, edges })
    }

    /// Keeps only edges that lie on a bi-infinite path.
    pub fn essential(&self) -> Presentation {
        let adj = NonnegMatrix::from_triplets(
            self.states,
            self.states,
            self.edges.iter().map(|&(s, _, t)| (s as usize, t as usize, 1)),
        )
        .expect("in range");
        let core = adj.core_indices().expect("square");
        let edges = self
            .edges
            .iter()
            .copied()
            .filter(|&(s, _, t)| core.contains(s as usize) && core.contains(t as usize))
            .collect();
        Presentation { states: self.states, labels: self.labels, edges }
    }

    /// Whether no state has two outgoing edges with the same label.
    pub fn is_right_resolving(&self) -> bool {
        self.edges.windows(2).all(|p| (p[0].0, p[0].1) != (p[1].0, p[1].1))
    }

    fn outgoing(&self) -> Vec<Vec<(u32, u32)>> {
        let mut out = vec![Vec::new(); self.states];
        for &(s, l, t) in &self.edges {
            out[s as usize].push((l, t));
        }
        out
    }
}

/// Result of comparing the languages of two presentations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LanguageComparison {
    pub equal: bool,
    /// A shortest word accepted by exactly one side.
    pub witness: Option<Vec<u32>>,
    /// True when the witness belongs to the first presentation's language.
    pub witness_in_first: bool,
}

/// Decides equality of the bi-infinite shifts presented by `p` and `q`.
///
/// Both are trimmed to their essential parts, so the finite-word languages
/// coincide with the languages of the presented shifts. The two subset
/// constructions are explored together breadth-first.
pub fn language_equal(p: &Presentation, q: &Presentation) -> Result<LanguageComparison> {
    if p.labels != q.labels {
        return Err(Error::ShiftMismatch(format!("label alphabets differ: {} vs {}", p.labels, q.labels)));
    }
    let (p, q) = (p.essential(), q.essential());
    let (pout, qout) = (p.outgoing(), q.outgoing());
    let start = (
        (0..p.states as u32).filter(|&s| !pout[s as usize].is_empty()).collect::<Vec<_>>(),
        (0..q.states as u32).filter(|&s| !qout[s as usize].is_empty()).collect::<Vec<_>>(),
    );
    let mut ids: HashMap<(Vec<u32>, Vec<u32>), usize> = HashMap::new();
    let mut parent: Vec<Option<(usize, u32)>> = vec![None];
    ids.insert(start.clone(), 0);
    let mut queue = VecDeque::from([(start, 0usize)]);

    let rebuild = |parent: &Vec<Option<(usize, u32)>>, mut at: usize, last: u32| {
        let mut word = vec![last];
        while let Some((prev, l)) = parent[at] {
            word.push(l);
            at = prev;
        }
        word.reverse();
        word
    };

    while let Some(((ps, qs), id)) = queue.pop_front() {
        let mut next: BTreeMap<u32, (Vec<u32>, Vec<u32>)> = BTreeMap::new();
        for &s in &ps {
            for &(l, t) in &pout[s as usize] {
                next.entry(l).or_default().0.push(t);
            }
        }
        for &s in &qs {
            for &(l, t) in &qout[s as usize] {
                next.entry(l).or_default().1.push(t);
            }
        }
        for (l, (mut np, mut nq)) in next {
            if np.is_empty() != nq.is_empty() {
                return Ok(LanguageComparison {
                    equal: false,
                    witness: Some(rebuild(&parent, id, l)),
                    witness_in_first: !np.is_empty(),
                });
            }
            np.sort_unstable();
            np.dedup();
            nq.sort_unstable();
            nq.dedup();
            let key = (np, nq);
            if !ids.contains_key(&key) {
                let nid = parent.len();
                parent.push(Some((id, l)));
                ids.insert(key.clone(), nid);
                queue.push_back((key, nid));
            }
        }
    }
    Ok(LanguageComparison { equal: true, witness: None, witness_in_first: false })
}

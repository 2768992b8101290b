//! Sliding block codes between vertex shifts.
//!
//! A [`BlockMap`] is a local rule `x[i + l ..= i + r] -> y_i` stored as a
//! complete table over the allowed domain words of the window length. A
//! [`BlockCode`] pairs a forward map with an optional inverse map.
//!
//! Two maps are equal when they define the same function on points; this is
//! checked on a common window. [`BlockMap::normalize`] shrinks the window from
//! the left and then from the right as far as the table allows.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix::NonnegMatrix;
use crate::shift::{VertexShift, WordList};

/// A coordinate interval `[left, right]` of `Z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Window {
    pub left: i64,
    pub right: i64,
}

impl Window {
    pub fn new(left: i64, right: i64) -> Result<Self> {
        if left > right {
            return Err(Error::InvalidWindow(format!("[{left}, {right}] is empty")));
        }
        Ok(Window { left, right })
    }

    pub const fn point(k: i64) -> Self {
        Window { left: k, right: k }
    }

    pub fn width(&self) -> usize {
        (self.right - self.left + 1) as usize
    }

    pub fn hull(&self, other: &Window) -> Window {
        Window { left: self.left.min(other.left), right: self.right.max(other.right) }
    }

    pub fn contains(&self, other: &Window) -> bool {
        self.left <= other.left && other.right <= self.right
    }

    pub fn contains_point(&self, k: i64) -> bool {
        self.left <= k && k <= self.right
    }

    pub fn shifted(&self, k: i64) -> Window {
        Window { left: self.left + k, right: self.right + k }
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.left, self.right)
    }
}

impl Serialize for Window {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.left, self.right].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Window {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [l, r] = <[i64; 2]>::deserialize(d)?;
        Window::new(l, r).map_err(serde::de::Error::custom)
    }
}

/// Image of a finite word: `symbols[k]` is the output at coordinate `start + k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImageWord {
    pub start: i64,
    pub symbols: Vec<u32>,
}

/// A sliding block map `X -> Y` given by a complete local table.
#[derive(Clone, Debug)]
pub struct BlockMap {
    domain: Arc<VertexShift>,
    codomain: Arc<VertexShift>,
    window: Window,
    words: WordList,
    values: Vec<u32>,
}

fn same_shift(a: &Arc<VertexShift>, b: &Arc<VertexShift>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl BlockMap {
    /// Tabulates `rule` over the allowed domain words of the window length
    /// and checks that the images of points lie in the codomain.
    pub fn from_fn(
        domain: Arc<VertexShift>,
        codomain: Arc<VertexShift>,
        window: Window,
        rule: impl FnMut(&[u32]) -> Result<u32>,
    ) -> Result<Self> {
        let map = BlockMap::tabulate(domain, codomain, window, rule)?;
        map.validate()?;
        Ok(map)
    }

    fn tabulate(
        domain: Arc<VertexShift>,
        codomain: Arc<VertexShift>,
        window: Window,
        mut rule: impl FnMut(&[u32]) -> Result<u32>,
    ) -> Result<Self> {
        let words = domain.words(window.width());
        let values = words.iter().map(&mut rule).collect::<Result<Vec<u32>>>()?;
        Ok(BlockMap { domain, codomain, window, words, values })
    }

    /// Builds a map from explicit `(word, symbol)` pairs covering every
    /// allowed word of the window length exactly once.
    pub fn from_pairs(
        domain: Arc<VertexShift>,
        codomain: Arc<VertexShift>,
        window: Window,
        pairs: &[(Vec<u32>, u32)],
    ) -> Result<Self> {
        let words = domain.words(window.width());
        let mut values: Vec<Option<u32>> = vec![None; words.len()];
        for (w, v) in pairs {
            let k = words.index_of(w).ok_or_else(|| {
                if w.len() != window.width() {
                    Error::InvalidCode(format!(
                        "table word {:?} has length {}, window needs {}",
                        w,
                        w.len(),
                        window.width()
                    ))
                } else {
                    Error::ForbiddenWord(w.clone())
                }
            })?;
            if values[k].is_some() {
                return Err(Error::InvalidCode(format!("word {w:?} listed twice")));
            }
            values[k] = Some(*v);
        }
        let values = values
            .iter()
            .enumerate()
            .map(|(k, v)| v.ok_or_else(|| Error::InvalidCode(format!("table misses allowed word {:?}", words.get(k)))))
            .collect::<Result<Vec<u32>>>()?;
        let map = BlockMap { domain, codomain, window, words, values };
        map.validate()?;
        Ok(map)
    }

    fn validate(&self) -> Result<()> {
        let n = self.codomain.size() as u32;
        if let Some((k, _)) = self.values.iter().enumerate().find(|(_, v)| **v >= n) {
            return Err(Error::InvalidCode(format!(
                "word {:?} maps to symbol {} outside the codomain",
                self.words.get(k),
                self.values[k]
            )));
        }
        let w = self.window.width();
        for long in self.domain.words(w + 1).iter() {
            let a = self.lookup_allowed(&long[..w]);
            let b = self.lookup_allowed(&long[1..]);
            if !self.codomain.allows(a, b) {
                return Err(Error::InvalidCode(format!("word {long:?} maps to the forbidden transition {a} -> {b}")));
            }
        }
        Ok(())
    }

    pub fn domain(&self) -> &Arc<VertexShift> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<VertexShift> {
        &self.codomain
    }

    pub fn window(&self) -> Window {
        self.window
    }

    /// Table entries in lexicographic word order.
    pub fn table(&self) -> impl Iterator<Item = (&[u32], u32)> + '_ {
        self.words.iter().zip(self.values.iter().copied())
    }

    pub fn table_len(&self) -> usize {
        self.values.len()
    }

    fn lookup_allowed(&self, w: &[u32]) -> u32 {
        self.values[self.words.index_of(w).expect("allowed word of window length")]
    }

    /// Output symbol for a window word; forbidden words are an error.
    pub fn lookup(&self, w: &[u32]) -> Result<u32> {
        if w.len() != self.window.width() {
            return Err(Error::InvalidCode(format!(
                "lookup of length {} in window of width {}",
                w.len(),
                self.window.width()
            )));
        }
        self.words.index_of(w).map(|k| self.values[k]).ok_or_else(|| Error::ForbiddenWord(w.to_vec()))
    }

    /// Applies the map to a finite word whose first symbol sits at coordinate 0.
    pub fn apply(&self, w: &[u32]) -> Result<ImageWord> {
        if !self.domain.is_word(w) {
            return Err(Error::ForbiddenWord(w.to_vec()));
        }
        let width = self.window.width();
        let mut symbols = Vec::new();
        if w.len() >= width {
            for k in 0..=(w.len() - width) {
                symbols.push(self.lookup_allowed(&w[k..k + width]));
            }
        }
        Ok(ImageWord { start: -self.window.left, symbols })
    }

    /// The same function tabulated on a window containing the current one.
    pub fn extend_to(&self, target: Window) -> Result<BlockMap> {
        if !target.contains(&self.window) {
            return Err(Error::InvalidWindow(format!("{} does not contain {}", target, self.window)));
        }
        let off = (self.window.left - target.left) as usize;
        let width = self.window.width();
        BlockMap::tabulate(self.domain.clone(), self.codomain.clone(), target, |w| {
            Ok(self.lookup_allowed(&w[off..off + width]))
        })
    }

    /// The same function on window `target`, if it only depends on those
    /// coordinates.
    pub fn restrict_to(&self, target: Window) -> Option<BlockMap> {
        if target == self.window {
            return Some(self.clone());
        }
        let hull = self.window.hull(&target);
        let hull_words;
        let words_h = if hull == self.window {
            &self.words
        } else {
            hull_words = self.domain.words(hull.width());
            &hull_words
        };
        let targets = self.domain.words(target.width());
        let (so, sw) = ((self.window.left - hull.left) as usize, self.window.width());
        let (to, tw) = ((target.left - hull.left) as usize, target.width());
        let mut values: Vec<Option<u32>> = vec![None; targets.len()];
        for w in words_h.iter() {
            let v = self.lookup_allowed(&w[so..so + sw]);
            let k = targets.index_of(&w[to..to + tw]).expect("subword is allowed");
            match values[k] {
                None => values[k] = Some(v),
                Some(u) if u != v => return None,
                Some(_) => {}
            }
        }
        let values = values.into_iter().collect::<Option<Vec<u32>>>()?;
        Some(BlockMap {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            window: target,
            words: targets,
            values,
        })
    }

    /// Shrinks the window from the left, then from the right, while the table
    /// allows it.
    pub fn normalize(&self) -> BlockMap {
        let mut cur = self.clone();
        while cur.window.width() > 1 {
            match cur.restrict_to(Window::new(cur.window.left + 1, cur.window.right).unwrap()) {
                Some(m) => cur = m,
                None => break,
            }
        }
        while cur.window.width() > 1 {
            match cur.restrict_to(Window::new(cur.window.left, cur.window.right - 1).unwrap()) {
                Some(m) => cur = m,
                None => break,
            }
        }
        cur
    }

    /// Whether both maps define the same function on points.
    pub fn same_map(&self, other: &BlockMap) -> bool {
        if !same_shift(&self.domain, &other.domain) || !same_shift(&self.codomain, &other.codomain) {
            return false;
        }
        if self.window == other.window {
            return self.values == other.values;
        }
        let hull = self.window.hull(&other.window);
        let a = self.extend_to(hull).expect("hull contains window");
        let b = other.extend_to(hull).expect("hull contains window");
        a.values == b.values
    }

    /// `g ∘ f` where `f = self` is applied first.
    pub fn then(&self, g: &BlockMap) -> Result<BlockMap> {
        if !same_shift(&self.codomain, &g.domain) {
            return Err(Error::ShiftMismatch("codomain of the first map differs from the domain of the second".into()));
        }
        let window = Window { left: self.window.left + g.window.left, right: self.window.right + g.window.right };
        let (fw, gw) = (self.window.width(), g.window.width());
        let mut image = vec![0u32; gw];
        BlockMap::tabulate(self.domain.clone(), g.codomain.clone(), window, |w| {
            for (k, slot) in image.iter_mut().enumerate() {
                *slot = self.lookup_allowed(&w[k..k + fw]);
            }
            Ok(g.lookup_allowed(&image))
        })
    }

    fn relabel_values(&self, perm: &[u32], codomain: Arc<VertexShift>) -> BlockMap {
        BlockMap {
            domain: self.domain.clone(),
            codomain,
            window: self.window,
            words: self.words.clone(),
            values: self.values.iter().map(|&v| perm[v as usize]).collect(),
        }
    }

    fn relabel_domain(&self, perm: &[u32], domain: Arc<VertexShift>) -> BlockMap {
        let mut inv = vec![0u32; perm.len()];
        for (old, &new) in perm.iter().enumerate() {
            inv[new as usize] = old as u32;
        }
        let mut old_word = vec![0u32; self.window.width()];
        BlockMap::tabulate(domain, self.codomain.clone(), self.window, |w| {
            for (slot, &a) in old_word.iter_mut().zip(w) {
                *slot = inv[a as usize];
            }
            Ok(self.lookup_allowed(&old_word))
        })
        .expect("relabelled table is complete")
    }
}

/// A block code with an optional attached inverse.
#[derive(Clone, Debug)]
pub struct BlockCode {
    forward: BlockMap,
    inverse: Option<BlockMap>,
}

impl PartialEq for BlockCode {
    fn eq(&self, other: &Self) -> bool {
        self.forward.same_map(&other.forward)
    }
}

impl BlockCode {
    /// Attaches `inverse` after checking that both composites are identities.
    pub fn new(forward: BlockMap, inverse: Option<BlockMap>) -> Result<Self> {
        if let Some(inv) = &inverse
            && !verify_inverse_maps(&forward, inv)?
        {
            return Err(Error::InvalidCode("attached inverse does not invert the code".into()));
        }
        Ok(BlockCode { forward, inverse })
    }

    /// Pairs a map with an inverse that is known to be correct.
    pub(crate) fn trusted(forward: BlockMap, inverse: Option<BlockMap>) -> Self {
        BlockCode { forward, inverse }
    }

    pub fn identity(x: Arc<VertexShift>) -> Self {
        let map = BlockMap::tabulate(x.clone(), x, Window::point(0), |w| Ok(w[0])).unwrap();
        BlockCode { inverse: Some(map.clone()), forward: map }
    }

    /// The shift `τ_g`, with `τ_g(x)_i = x_{i+g}`.
    pub fn shift_map(x: Arc<VertexShift>, g: i64) -> Self {
        let fwd = BlockMap::tabulate(x.clone(), x.clone(), Window::point(g), |w| Ok(w[0])).unwrap();
        let inv = BlockMap::tabulate(x.clone(), x, Window::point(-g), |w| Ok(w[0])).unwrap();
        BlockCode { forward: fwd, inverse: Some(inv) }
    }

    /// The one-block bijection `a -> perm[a]` onto the relabelled shift.
    pub fn alphabet_bijection(x: Arc<VertexShift>, perm: &[u32]) -> Result<Self> {
        check_permutation(perm, x.size())?;
        let perm_us: Vec<usize> = perm.iter().map(|&p| p as usize).collect();
        let y = Arc::new(VertexShift::new(x.matrix().permuted(&perm_us)?)?);
        Ok(BlockCode::identity(x).relabel_codomain_to(perm, y))
    }

    pub fn map(&self) -> &BlockMap {
        &self.forward
    }

    pub fn inverse_map(&self) -> Option<&BlockMap> {
        self.inverse.as_ref()
    }

    pub fn domain(&self) -> &Arc<VertexShift> {
        &self.forward.domain
    }

    pub fn codomain(&self) -> &Arc<VertexShift> {
        &self.forward.codomain
    }

    pub fn window(&self) -> Window {
        self.forward.window
    }

    pub fn inverse_window(&self) -> Option<Window> {
        self.inverse.as_ref().map(|m| m.window)
    }

    pub fn inverse(&self) -> Option<BlockCode> {
        self.inverse.as_ref().map(|inv| BlockCode { forward: inv.clone(), inverse: Some(self.forward.clone()) })
    }

    pub fn require_inverse(&self) -> Result<BlockCode> {
        self.inverse().ok_or(Error::NotInvertible)
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &BlockCode) -> Result<BlockCode> {
        let forward = self.forward.then(&g.forward)?;
        let inverse = match (&self.inverse, &g.inverse) {
            (Some(fi), Some(gi)) => Some(gi.then(fi)?),
            _ => None,
        };
        Ok(BlockCode { forward, inverse })
    }

    pub fn normalize(&self) -> BlockCode {
        BlockCode { forward: self.forward.normalize(), inverse: self.inverse.as_ref().map(BlockMap::normalize) }
    }

    /// Membership in `H`: window inside `[0, 1]` and inverse window inside `[-1, 0]`.
    pub fn is_elementary(&self) -> bool {
        match &self.inverse {
            Some(inv) => {
                self.forward.restrict_to(Window { left: 0, right: 1 }).is_some()
                    && inv.restrict_to(Window { left: -1, right: 0 }).is_some()
            }
            None => false,
        }
    }

    /// Membership in `H^-1`.
    pub fn is_inverse_elementary(&self) -> bool {
        self.inverse().is_some_and(|c| c.is_elementary())
    }

    /// Both directions are one-block maps.
    pub fn is_alphabet_bijection(&self) -> bool {
        match &self.inverse {
            Some(inv) => {
                self.forward.restrict_to(Window::point(0)).is_some() && inv.restrict_to(Window::point(0)).is_some()
            }
            None => false,
        }
    }

    /// Re-expresses both directions on the given windows.
    pub fn restrict(&self, forward: Window, inverse: Window) -> Result<BlockCode> {
        let f = self
            .forward
            .restrict_to(forward)
            .ok_or_else(|| Error::NotElementary(format!("code does not factor through {forward}")))?;
        let inv = self.inverse.as_ref().ok_or(Error::NotInvertible)?;
        let g = inv
            .restrict_to(inverse)
            .ok_or_else(|| Error::NotElementary(format!("inverse does not factor through {inverse}")))?;
        Ok(BlockCode { forward: f, inverse: Some(g) })
    }

    /// Renames codomain symbols by `perm` (old -> new) onto the shift `y`.
    fn relabel_codomain_to(&self, perm: &[u32], y: Arc<VertexShift>) -> BlockCode {
        BlockCode {
            forward: self.forward.relabel_values(perm, y.clone()),
            inverse: self.inverse.as_ref().map(|inv| inv.relabel_domain(perm, y)),
        }
    }

    /// Renames codomain symbols by the permutation `perm` (old -> new).
    pub fn relabel_codomain(&self, perm: &[u32]) -> Result<BlockCode> {
        check_permutation(perm, self.codomain().size())?;
        let perm_us: Vec<usize> = perm.iter().map(|&p| p as usize).collect();
        let y = Arc::new(VertexShift::new(self.codomain().matrix().permuted(&perm_us)?)?);
        Ok(self.relabel_codomain_to(perm, y))
    }

    /// Representative of the class of codes differing by an alphabet
    /// bijection: the normalized code whose table is lexicographically least,
    /// i.e. codomain symbols numbered by first appearance.
    pub fn canonical(&self) -> BlockCode {
        let norm = self.normalize();
        let n = norm.codomain().size();
        let mut perm = vec![u32::MAX; n];
        let mut next = 0u32;
        for &v in &norm.forward.values {
            if perm[v as usize] == u32::MAX {
                perm[v as usize] = next;
                next += 1;
            }
        }
        // Symbols never hit by the table keep their relative order at the end.
        for p in perm.iter_mut() {
            if *p == u32::MAX {
                *p = next;
                next += 1;
            }
        }
        norm.relabel_codomain(&perm).expect("first-appearance order is a permutation")
    }

    /// Sort key identifying the function (use on normalized codes).
    pub fn key(&self) -> (NonnegMatrix, NonnegMatrix, Window, Vec<u32>) {
        (
            self.domain().matrix().clone(),
            self.codomain().matrix().clone(),
            self.forward.window,
            self.forward.values.clone(),
        )
    }
}

fn check_permutation(perm: &[u32], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if perm.len() != n {
        return Err(Error::InvalidCode(format!("permutation of length {} on {} symbols", perm.len(), n)));
    }
    for &p in perm {
        if p as usize >= n || seen[p as usize] {
            return Err(Error::InvalidCode(format!("{perm:?} is not a permutation")));
        }
        seen[p as usize] = true;
    }
    Ok(())
}

fn verify_inverse_maps(f: &BlockMap, g: &BlockMap) -> Result<bool> {
    if !same_shift(&f.codomain, &g.domain) || !same_shift(&g.codomain, &f.domain) {
        return Ok(false);
    }
    let id_x = BlockCode::identity(f.domain.clone()).forward;
    let id_y = BlockCode::identity(f.codomain.clone()).forward;
    Ok(f.then(g)?.same_map(&id_x) && g.then(f)?.same_map(&id_y))
}

/// Whether `g ∘ f` and `f ∘ g` are both identities.
pub fn verify_inverse(f: &BlockCode, g: &BlockCode) -> Result<bool> {
    verify_inverse_maps(&f.forward, &g.forward)
}

/// The `len`-block presentation of `x` and the conjugacy onto it.
///
/// Symbols of the new shift are the allowed words of length `len` in
/// lexicographic order; `u -> v` is allowed when `u` and `v` overlap in
/// `len - 1` symbols. The code has window `[0, len - 1]` and a one-block
/// inverse reading the first symbol.
pub fn higher_block(x: &Arc<VertexShift>, len: usize) -> Result<(Arc<VertexShift>, BlockCode)> {
    if len == 0 {
        return Err(Error::InvalidWindow("block length must be positive".into()));
    }
    let words = x.words(len);
    let mut triplets = Vec::new();
    for (i, u) in words.iter().enumerate() {
        for (j, v) in words.iter().enumerate() {
            if u[1..] == v[..len - 1] {
                triplets.push((i, j, 1));
            }
        }
    }
    let y = Arc::new(VertexShift::new(NonnegMatrix::from_triplets(words.len(), words.len(), triplets)?)?);
    let fwd = BlockMap::tabulate(x.clone(), y.clone(), Window::new(0, len as i64 - 1)?, |w| {
        Ok(words.index_of(w).expect("allowed") as u32)
    })?;
    let inv = BlockMap::tabulate(y.clone(), x.clone(), Window::point(0), |w| Ok(words.get(w[0] as usize)[0]))?;
    Ok((y, BlockCode::trusted(fwd, Some(inv))))
}

#[derive(Serialize, Deserialize)]
struct MapJson {
    window: Window,
    table: Vec<(Vec<u32>, u32)>,
}

#[derive(Serialize, Deserialize)]
struct CodeJson {
    domain: NonnegMatrix,
    codomain: NonnegMatrix,
    window: Window,
    table: Vec<(Vec<u32>, u32)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    inverse: Option<MapJson>,
}

fn table_json(m: &BlockMap) -> Vec<(Vec<u32>, u32)> {
    m.table().map(|(w, v)| (w.iter().map(|a| a + 1).collect(), v + 1)).collect()
}

fn table_from_json(t: &[(Vec<u32>, u32)]) -> Result<Vec<(Vec<u32>, u32)>> {
    t.iter()
        .map(|(w, v)| {
            if *v == 0 || w.contains(&0) {
                return Err(Error::InvalidCode("symbols are 1-based".into()));
            }
            Ok((w.iter().map(|a| a - 1).collect(), v - 1))
        })
        .collect()
}

impl Serialize for BlockCode {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CodeJson {
            domain: self.domain().matrix().clone(),
            codomain: self.codomain().matrix().clone(),
            window: self.window(),
            table: table_json(&self.forward),
            inverse: self.inverse.as_ref().map(|m| MapJson { window: m.window, table: table_json(m) }),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BlockCode {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = CodeJson::deserialize(d)?;
        let build = || -> Result<BlockCode> {
            let x = Arc::new(VertexShift::new(raw.domain)?);
            let y = Arc::new(VertexShift::new(raw.codomain)?);
            let fwd = BlockMap::from_pairs(x.clone(), y.clone(), raw.window, &table_from_json(&raw.table)?)?;
            let inv = match &raw.inverse {
                Some(m) => Some(BlockMap::from_pairs(y, x, m.window, &table_from_json(&m.table)?)?),
                None => None,
            };
            BlockCode::new(fwd, inv)
        };
        build().map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> Arc<VertexShift> {
        Arc::new(VertexShift::golden_mean())
    }

    fn full2() -> Arc<VertexShift> {
        Arc::new(VertexShift::full(2).unwrap())
    }

    #[test]
    fn shift_moves_indexing() {
        let x = golden();
        let s = BlockCode::shift_map(x.clone(), 1);
        let img = s.map().apply(&[0, 0, 1, 0]).unwrap();
        assert_eq!(img.start, -1);
        assert_eq!(img.symbols, vec![0, 0, 1, 0]);
        assert!(s.is_elementary());
        assert!(!s.is_inverse_elementary());
        assert!(s.inverse().unwrap().is_inverse_elementary());
    }

    #[test]
    fn composition_adds_windows() {
        let x = golden();
        let s = BlockCode::shift_map(x.clone(), 1);
        let (_, hb) = higher_block(&x, 2).unwrap();
        let c = s.then(&s).unwrap();
        assert_eq!(c.window(), Window::point(2));
        let d = hb.then(&BlockCode::shift_map(hb.codomain().clone(), 1)).unwrap();
        assert_eq!(d.window(), Window::new(1, 2).unwrap());
        let back = s.then(&s.inverse().unwrap()).unwrap();
        assert_eq!(back, BlockCode::identity(x));
    }

    #[test]
    fn normalize_drops_redundant_coordinates() {
        let x = golden();
        let id = BlockCode::identity(x.clone());
        let wide = BlockMap::from_fn(x.clone(), x.clone(), Window::new(-1, 2).unwrap(), |w| Ok(w[1])).unwrap();
        let n = wide.normalize();
        assert_eq!(n.window(), Window::point(0));
        assert!(n.same_map(id.map()));
        assert!(wide.same_map(id.map()));
    }

    #[test]
    fn golden_mean_two_block_presentation() {
        let x = golden();
        let (y, code) = higher_block(&x, 2).unwrap();
        assert_eq!(y.matrix().to_rows(), vec![vec![1, 1, 0], vec![0, 0, 1], vec![1, 1, 0]]);
        assert_eq!(code.window(), Window::new(0, 1).unwrap());
        assert_eq!(code.inverse_window(), Some(Window::point(0)));
        assert!(verify_inverse(&code, &code.inverse().unwrap()).unwrap());
    }

    #[test]
    fn forbidden_lookups_fail() {
        let x = golden();
        let (_, code) = higher_block(&x, 2).unwrap();
        assert!(matches!(code.map().lookup(&[1, 1]), Err(Error::ForbiddenWord(_))));
        assert_eq!(code.map().lookup(&[1, 0]).unwrap(), 2);
    }

    #[test]
    fn tables_must_be_complete_and_consistent() {
        let x = golden();
        let partial = BlockMap::from_pairs(x.clone(), x.clone(), Window::point(0), &[(vec![0], 0)]);
        assert!(partial.is_err());
        // Swapping the symbols of the golden mean shift is not a self map.
        let swap = BlockMap::from_pairs(x.clone(), x.clone(), Window::point(0), &[(vec![0], 1), (vec![1], 0)]);
        assert!(matches!(swap, Err(Error::InvalidCode(_))));
    }

    #[test]
    fn swap_on_the_full_shift_is_a_bijection() {
        let x = full2();
        let swap = BlockCode::alphabet_bijection(x.clone(), &[1, 0]).unwrap();
        assert!(swap.is_alphabet_bijection());
        assert!(swap.is_elementary());
        assert_ne!(swap, BlockCode::identity(x.clone()));
        assert_eq!(swap.canonical(), BlockCode::identity(x));
    }

    #[test]
    fn bad_inverse_is_rejected() {
        let x = full2();
        let s = BlockCode::shift_map(x.clone(), 1);
        let id = BlockCode::identity(x.clone());
        assert!(BlockCode::new(s.map().clone(), Some(id.map().clone())).is_err());
        assert!(!verify_inverse(&s, &id).unwrap());
        assert!(verify_inverse(&s, &BlockCode::shift_map(x, -1)).unwrap());
    }

    #[test]
    fn json_roundtrip_is_one_based() {
        let x = golden();
        let (_, code) = higher_block(&x, 2).unwrap();
        let text = serde_json::to_string(&code).unwrap();
        assert!(text.contains(r#""table":[[[1,1],1],[[1,2],2],[[2,1],3]]"#));
        let back: BlockCode = serde_json::from_str(&text).unwrap();
        assert_eq!(back, code);
        assert_eq!(back.inverse().unwrap(), code.inverse().unwrap());
    }

    #[test]
    fn restriction_detects_dependence() {
        let x = full2();
        let f = BlockMap::from_fn(x.clone(), x.clone(), Window::new(0, 1).unwrap(), |w| Ok(w[0] ^ w[1])).unwrap();
        assert!(f.restrict_to(Window::point(0)).is_none());
        assert!(f.restrict_to(Window::new(-1, 1).unwrap()).is_some());
        assert_eq!(f.normalize().window(), Window::new(0, 1).unwrap());
    }
}

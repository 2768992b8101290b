//! Finite windows in Cayley graphs and schedules that shrink them to `{e}`
//! one element at a time.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::gsft::FiniteGroup;

/// Group elements are integer vectors: coordinates in `Z^d`, or a single
/// element index for a finite group.
pub type Element = Vec<i64>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupKind {
    Lattice(usize),
    Finite(Arc<FiniteGroup>),
}

impl GroupKind {
    pub fn identity(&self) -> Element {
        match self {
            GroupKind::Lattice(d) => vec![0; *d],
            GroupKind::Finite(_) => vec![0],
        }
    }

    pub fn mul(&self, a: &Element, b: &Element) -> Element {
        match self {
            GroupKind::Lattice(_) => a.iter().zip(b).map(|(x, y)| x + y).collect(),
            GroupKind::Finite(g) => vec![g.mul(a[0] as usize, b[0] as usize) as i64],
        }
    }

    pub fn inv(&self, a: &Element) -> Element {
        match self {
            GroupKind::Lattice(_) => a.iter().map(|x| -x).collect(),
            GroupKind::Finite(g) => vec![g.inv(a[0] as usize) as i64],
        }
    }

    fn check(&self, a: &Element) -> Result<()> {
        let ok = match self {
            GroupKind::Lattice(d) => a.len() == *d,
            GroupKind::Finite(g) => a.len() == 1 && (0..g.order() as i64).contains(&a[0]),
        };
        if ok { Ok(()) } else { Err(Error::InvalidWindow(format!("{a:?} is not a group element"))) }
    }

    fn to_json(&self, a: &Element) -> Value {
        match self {
            GroupKind::Lattice(_) => Value::from(a.clone()),
            GroupKind::Finite(g) => Value::from(g.name(a[0] as usize)),
        }
    }

    fn parse_element(&self, v: &Value) -> Result<Element> {
        let e = match (self, v) {
            (GroupKind::Finite(g), Value::String(s)) => vec![g.element(s)? as i64],
            (GroupKind::Lattice(1), Value::Number(n)) => vec![n.as_i64().ok_or_else(|| bad(v))?],
            (GroupKind::Lattice(_), Value::Array(xs)) => {
                xs.iter().map(|x| x.as_i64().ok_or_else(|| bad(v))).collect::<Result<_>>()?
            }
            _ => return Err(bad(v)),
        };
        self.check(&e)?;
        Ok(e)
    }
}

fn bad(v: &Value) -> Error {
    Error::InvalidWindow(format!("cannot read group element {v}"))
}

/// A finite window `T` and a generating set `S` of a group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FGGroupWindow {
    group: GroupKind,
    gens: Vec<Element>,
    window: BTreeSet<Element>,
}

impl FGGroupWindow {
    pub fn new(group: GroupKind, gens: Vec<Element>, window: Vec<Element>) -> Result<Self> {
        for x in gens.iter().chain(&window) {
            group.check(x)?;
        }
        let mut gens = gens;
        let e = group.identity();
        if !gens.contains(&e) {
            gens.insert(0, e);
        }
        Ok(FGGroupWindow { group, gens, window: window.into_iter().collect() })
    }

    pub fn group(&self) -> &GroupKind {
        &self.group
    }

    pub fn window(&self) -> &BTreeSet<Element> {
        &self.window
    }

    /// `S' = S ∪ S^-1`, sorted.
    pub fn symmetric_gens(&self) -> Vec<Element> {
        let mut out: BTreeSet<Element> = self.gens.iter().cloned().collect();
        out.extend(self.gens.iter().map(|g| self.group.inv(g)));
        out.into_iter().collect()
    }

    pub fn is_connected(&self) -> bool {
        connected(&self.group, &self.symmetric_gens(), &self.window)
    }

    /// Removes a leaf `h != e` of a breadth-first spanning tree at each
    /// step, smallest encoding first, with its parent `h'` and `g = h'^-1 h`.
    pub fn reduction_schedule(&self) -> Result<Vec<ScheduleStep>> {
        let e = self.group.identity();
        if !self.window.contains(&e) {
            return Err(Error::InvalidWindow("window does not contain the identity".into()));
        }
        let gens = self.symmetric_gens();
        if !connected(&self.group, &gens, &self.window) {
            return Err(Error::InvalidWindow("window is not connected".into()));
        }
        let mut parent: BTreeMap<Element, Element> = BTreeMap::new();
        let mut queue = VecDeque::from([e.clone()]);
        let mut seen = BTreeSet::from([e.clone()]);
        while let Some(t) = queue.pop_front() {
            for s in &gens {
                let u = self.group.mul(&t, s);
                if self.window.contains(&u) && seen.insert(u.clone()) {
                    parent.insert(u.clone(), t.clone());
                    queue.push_back(u);
                }
            }
        }
        let mut children: BTreeMap<Element, usize> = BTreeMap::new();
        for p in parent.values() {
            *children.entry(p.clone()).or_insert(0) += 1;
        }
        let mut leaves: BTreeSet<Element> = parent.keys().filter(|t| !children.contains_key(*t)).cloned().collect();
        let mut current = self.window.clone();
        let mut steps = Vec::with_capacity(current.len().saturating_sub(1));
        while let Some(h) = leaves.pop_first() {
            let hp = parent[&h].clone();
            let g = self.group.mul(&self.group.inv(&hp), &h);
            current.remove(&h);
            let step = ScheduleStep { h, g, h_prime: hp.clone() };
            step.verify(&self.group, &gens, &current)?;
            steps.push(step);
            let c = children.get_mut(&hp).expect("parent has a child");
            *c -= 1;
            if *c == 0 && hp != e {
                leaves.insert(hp);
            }
        }
        if current.len() != 1 {
            return Err(Error::Invariant("schedule did not reach the identity".into()));
        }
        Ok(steps)
    }

    pub fn to_json(&self) -> Value {
        let group = match &self.group {
            GroupKind::Lattice(d) => serde_json::json!({ "lattice": d }),
            GroupKind::Finite(g) => serde_json::to_value(&**g).expect("group serializes"),
        };
        serde_json::json!({
            "group": group,
            "gens": self.gens.iter().map(|x| self.group.to_json(x)).collect::<Vec<_>>(),
            "window": self.window.iter().map(|x| self.group.to_json(x)).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        #[derive(Deserialize)]
        struct Raw {
            group: Value,
            gens: Vec<Value>,
            window: Vec<Value>,
        }
        let raw: Raw = serde_json::from_value(v.clone())?;
        let group = match raw.group.get("lattice") {
            Some(d) => GroupKind::Lattice(
                d.as_u64().ok_or_else(|| Error::InvalidWindow("lattice rank must be a count".into()))? as usize,
            ),
            None => GroupKind::Finite(Arc::new(serde_json::from_value(raw.group)?)),
        };
        let read = |xs: &[Value]| xs.iter().map(|x| group.parse_element(x)).collect::<Result<Vec<_>>>();
        let gens = read(&raw.gens)?;
        let window = read(&raw.window)?;
        FGGroupWindow::new(group, gens, window)
    }

    pub fn schedule_json(&self, steps: &[ScheduleStep]) -> Value {
        Value::from(
            steps
                .iter()
                .map(|s| {
                    serde_json::json!({
                        "h": self.group.to_json(&s.h),
                        "g": self.group.to_json(&s.g),
                        "h_prime": self.group.to_json(&s.h_prime),
                    })
                })
                .collect::<Vec<_>>(),
        )
    }
}

/// Removal of `h` from `T`, witnessed by `h = h' g` with `h' ∈ T'`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScheduleStep {
    pub h: Element,
    pub g: Element,
    pub h_prime: Element,
}

impl ScheduleStep {
    /// Checks the certificate against the window `rest = T \ {h}`.
    pub fn verify(&self, group: &GroupKind, gens: &[Element], rest: &BTreeSet<Element>) -> Result<()> {
        if group.mul(&self.h_prime, &self.g) != self.h {
            return Err(Error::Invariant(format!("{:?} != {:?} {:?}", self.h, self.h_prime, self.g)));
        }
        if !gens.contains(&self.g) || !rest.contains(&self.h_prime) {
            return Err(Error::Invariant("certificate uses a non-generator or a removed element".into()));
        }
        let shifted: BTreeSet<Element> = rest.iter().map(|t| group.mul(t, &self.g)).collect();
        if !rest.contains(&self.h) && !shifted.contains(&self.h) {
            return Err(Error::Invariant("T is not covered by T' and T'g".into()));
        }
        if !connected(group, gens, rest) {
            return Err(Error::Invariant("T' is not connected".into()));
        }
        Ok(())
    }
}

fn connected(group: &GroupKind, gens: &[Element], window: &BTreeSet<Element>) -> bool {
    let Some(start) = window.first() else {
        return true;
    };
    let mut seen = BTreeSet::from([start.clone()]);
    let mut queue = VecDeque::from([start.clone()]);
    while let Some(t) = queue.pop_front() {
        for s in gens {
            let u = group.mul(&t, s);
            if window.contains(&u) && seen.insert(u.clone()) {
                queue.push_back(u);
            }
        }
    }
    seen.len() == window.len()
}

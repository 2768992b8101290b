use std::collections::BTreeSet;
use std::sync::Arc;

use proptest::prelude::*;
use sse_core::cayley::{FGGroupWindow, GroupKind};
use sse_core::code::verify_inverse;
use sse_core::edge::{SSEEdge, code_from_edge, edge_from_code};
use sse_core::gsft::{FiniteGroup, GroupRingMatrix, bar, hat};
use sse_core::matrix::NonnegMatrix;

fn boolean(rows: usize, cols: usize) -> impl Strategy<Value = NonnegMatrix> {
    prop::collection::vec(0u64..2, rows * cols).prop_map(move |e| NonnegMatrix::from_flat(rows, cols, &e).unwrap())
}

fn square(max: usize) -> impl Strategy<Value = NonnegMatrix> {
    (1..=max).prop_flat_map(|n| boolean(n, n))
}

fn edge() -> impl Strategy<Value = SSEEdge> {
    (1usize..=3, 1usize..=3)
        .prop_flat_map(|(n, m)| (boolean(n, m), boolean(m, n)))
        .prop_filter_map("not a 0/1 edge", |(r, s)| SSEEdge::from_factors(r, s).ok())
}

fn group_ring(group: Arc<FiniteGroup>, rows: usize, cols: usize) -> impl Strategy<Value = GroupRingMatrix> {
    let order = group.order();
    prop::collection::vec(prop::collection::btree_set(0..order, 0..=order), rows * cols).prop_map(move |cells| {
        let entries = cells.into_iter().map(|c| c.into_iter().collect()).collect();
        GroupRingMatrix::new(group.clone(), rows, cols, entries).unwrap()
    })
}

fn ring_pair() -> impl Strategy<Value = (GroupRingMatrix, GroupRingMatrix)> {
    (2usize..=3).prop_flat_map(|n| {
        let group = Arc::new(FiniteGroup::cyclic(n));
        (group_ring(group.clone(), 2, 2), group_ring(group, 2, 2))
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, max_global_rejects: 200_000, ..ProptestConfig::default() })]

    #[test]
    fn product_transposes_reverse(a in boolean(3, 2), b in boolean(2, 4)) {
        let ab = a.mul(&b).unwrap();
        prop_assert_eq!(ab.transpose(), b.transpose().mul(&a.transpose()).unwrap());
    }

    #[test]
    fn matrix_json_round_trips(a in square(4)) {
        let text = serde_json::to_string(&a).unwrap();
        prop_assert_eq!(serde_json::from_str::<NonnegMatrix>(&text).unwrap(), a);
    }

    #[test]
    fn core_is_idempotent(a in square(5)) {
        let c = a.core().unwrap();
        if c.rows() > 0 {
            prop_assert!(c.is_nondegenerate());
            prop_assert_eq!(c.core().unwrap(), c);
        }
    }

    #[test]
    fn edge_code_edge_is_identity(e in edge()) {
        let f = code_from_edge(&e).unwrap();
        prop_assert!(f.is_elementary());
        let back = edge_from_code(&f).unwrap();
        prop_assert_eq!(back.r(), e.r());
        prop_assert_eq!(back.s(), e.s());
        prop_assert!(verify_inverse(&f, &f.require_inverse().unwrap()).unwrap());
    }

    #[test]
    fn reversal_swaps_ends(e in edge()) {
        let rev = e.reversed();
        prop_assert_eq!(rev.a(), e.b());
        prop_assert_eq!(rev.b(), e.a());
        prop_assert_eq!(rev.reversed(), e);
    }

    #[test]
    fn bar_is_multiplicative((a, b) in ring_pair()) {
        let lifted = bar(&a).mul(&bar(&b)).unwrap();
        match a.mul(&b) {
            Ok(ab) => prop_assert_eq!(bar(&ab), lifted),
            Err(_) => prop_assert!(!lifted.is_boolean()),
        }
        prop_assert_eq!(hat(&bar(&a), a.group().clone()).unwrap(), a);
    }

    #[test]
    fn connected_windows_reduce_one_element_at_a_time(cells in prop::collection::btree_set((0i64..3, 0i64..3), 0..9)) {
        let mut window: BTreeSet<Vec<i64>> = cells.into_iter().map(|(x, y)| vec![x, y]).collect();
        window.insert(vec![0, 0]);
        let w = FGGroupWindow::new(GroupKind::Lattice(2), vec![vec![1, 0], vec![0, 1]], window.iter().cloned().collect()).unwrap();
        match w.reduction_schedule() {
            Ok(steps) => {
                prop_assert!(w.is_connected());
                prop_assert_eq!(steps.len(), window.len() - 1);
                let removed: BTreeSet<_> = steps.iter().map(|s| s.h.clone()).collect();
                prop_assert_eq!(removed.len(), steps.len());
                prop_assert!(!removed.contains(&vec![0, 0]));
            }
            Err(_) => prop_assert!(!w.is_connected()),
        }
    }
}

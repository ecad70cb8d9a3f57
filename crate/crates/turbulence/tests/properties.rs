use proptest::prelude::*;
use turbulence::chart::{charts_isomorphic, classify_chart, contract_idle_edge, validate_chart, Chart};
use turbulence::compat::compatible;
use turbulence::envelope::{degree_reduce, gentle_envelope, undo_envelope, verify_envelope_roundtrip};
use turbulence::gen::{random_chart, reframe, GenParams};
use turbulence::trails::{canonicalize_trail, elementary_trails, inverse};

fn chart(seed: u64) -> Chart {
    random_chart(seed, GenParams { max_internal: 4, max_edges: 8, ..GenParams::default() })
}

/// Exchanging the two class labels at every vertex.
fn swap_classes(c: &Chart) -> Chart {
    let mut desc = c.to_desc();
    for lists in desc.classes.values_mut() {
        lists.swap(0, 1);
    }
    validate_chart(&desc).unwrap()
}

fn config() -> ProptestConfig {
    ProptestConfig { cases: 200, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn canonical_form_ignores_direction_and_rotation(seed in any::<u64>(), shift in 0usize..16) {
        let c = chart(seed);
        for t in elementary_trails(&c) {
            prop_assert_eq!(&canonicalize_trail(&c, &inverse(&t.word)).unwrap(), &t);
            if !t.is_route() {
                let k = shift % t.word.len();
                let rotated: Vec<_> = t.word[k..].iter().chain(&t.word[..k]).copied().collect();
                prop_assert_eq!(&canonicalize_trail(&c, &rotated).unwrap(), &t);
            }
        }
    }

    #[test]
    fn compatibility_is_symmetric_and_label_free(seed in any::<u64>()) {
        let c = chart(seed);
        let s = swap_classes(&c);
        let ts = elementary_trails(&c);
        prop_assert_eq!(elementary_trails(&s), ts.clone());
        for p in &ts {
            for q in &ts {
                let v = compatible(&c, p, q);
                prop_assert_eq!(v, compatible(&c, q, p));
                prop_assert_eq!(v, compatible(&s, p, q));
            }
        }
    }

    #[test]
    fn directability_ignores_the_framing(seed in any::<u64>(), shuffle in any::<u64>()) {
        let c = chart(seed);
        let d = classify_chart(&c);
        prop_assert_eq!(classify_chart(&reframe(&c, shuffle)).directable, d.directable);
        prop_assert_eq!(classify_chart(&c.reversed_framing()).directable, d.directable);
        prop_assert_eq!(classify_chart(&swap_classes(&c)).directable, d.directable);
    }

    #[test]
    fn envelope_moves_invert(seed in any::<u64>()) {
        let c = chart(seed);
        let env = gentle_envelope(&c);
        prop_assert!(classify_chart(&env.envelope).gentle);
        prop_assert!(verify_envelope_roundtrip(&c, &env).passed());
        prop_assert!(charts_isomorphic(&undo_envelope(&env).unwrap(), &c).is_some());
    }

    #[test]
    fn degree_reduction_inverts(seed in any::<u64>(), a in 1usize..4) {
        let c = chart(seed);
        for v in c.internal_vertices() {
            let id = c.vertex_id(v).to_string();
            if let Ok((big, mv)) = degree_reduce(&c, &id, a) {
                let turbulence::envelope::Move::DegreeReduce { delta_edge, .. } = mv else { unreachable!() };
                let back = contract_idle_edge(&big, &delta_edge).unwrap();
                prop_assert!(charts_isomorphic(&back, &c).is_some());
            }
        }
    }
}

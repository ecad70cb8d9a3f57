mod common;

use std::collections::BTreeSet;

use common::{fixture, CHARTS};
use turbulence::chart::{charts_isomorphic, classify_chart, contract_idle_edge, delete_edges, Chart};
use turbulence::convert::fringed_algebra_of_gentle_chart;
use turbulence::envelope::{
    correct_band, degree_reduce, fill, gentle_envelope, replay, steepen, undo_envelope, verify_envelope_roundtrip,
    EnvelopeError, Move, Placement,
};
use turbulence::trails::parse_word;

fn sub_full(c: &Chart) -> bool {
    c.internal_vertices().all(|v| c.classes(v).unwrap().iter().all(|l| l.len() <= 2))
}

fn full(c: &Chart) -> bool {
    c.internal_vertices().all(|v| c.classes(v).unwrap().iter().all(|l| l.len() == 2))
}

fn non_steep(c: &Chart) -> usize {
    (0..c.num_edges()).filter(|&e| !c.is_steep(e)).count()
}

fn iso(a: &Chart, b: &Chart) -> bool {
    charts_isomorphic(a, b).is_some()
}

/// Every logged move with the chart it was applied to.
fn steps(chart: &Chart) -> Vec<(Chart, Move)> {
    let env = gentle_envelope(chart);
    (0..env.log.len()).map(|i| (replay(chart, &env.log[..i]).unwrap(), env.log[i].clone())).collect()
}

#[test]
fn running_fixture_uses_every_move() {
    let m = fixture("moves");
    let env = gentle_envelope(&m);
    let kinds: BTreeSet<&str> = env
        .log
        .iter()
        .map(|mv| match mv {
            Move::DegreeReduce { .. } => "reduce",
            Move::Steepen { .. } => "steepen",
            Move::FillStep { .. } => "fill",
            Move::BandCorrect { .. } => "band",
            Move::Contract { .. } => "contract",
        })
        .collect();
    assert_eq!(kinds, BTreeSet::from(["reduce", "steepen", "fill", "band"]));
    assert!(classify_chart(&env.envelope).gentle);
    assert!(fringed_algebra_of_gentle_chart(&env.envelope).is_ok());
    assert!(verify_envelope_roundtrip(&m, &env).passed());
}

#[test]
fn degree_reduction_splits_after_the_lowest() {
    let m = fixture("moves");
    let (big, mv) = degree_reduce(&m, "u", 1).unwrap();
    let Move::DegreeReduce { new_vertex, delta_edge, class, .. } = &mv else { panic!() };
    assert_eq!(*class, 0);
    let u = big.vertex_index("u").unwrap();
    let nv = big.vertex_index(new_vertex).unwrap();
    let d = big.edge_index(delta_edge).unwrap();
    // The new vertex keeps the delta edge alone in one class.
    assert!(big.classes(nv).unwrap().iter().any(|l| l.len() == 1 && l[0].edge == d));
    assert!(big.classes(u).unwrap().iter().all(|l| l.len() <= 2));
    assert_eq!(big.num_edges(), m.num_edges() + 1);
    assert!(iso(&contract_idle_edge(&big, delta_edge).unwrap(), &m));

    assert_eq!(degree_reduce(&m, "u", 2), Err(EnvelopeError::BadSplitIndex { a: 2, max: 1 }));
    assert!(matches!(degree_reduce(&fixture("square"), "u", 1), Err(EnvelopeError::NoOversizedClass(_))));
}

#[test]
fn steepening_lowers_the_non_steep_count() {
    let mut seen = 0;
    for name in CHARTS {
        for (pre, mv) in steps(&fixture(name)) {
            let Move::Steepen { edge, delta_edges, .. } = &mv else { continue };
            seen += 1;
            let (post, again) = steepen(&pre, edge).unwrap();
            assert_eq!(&again, &mv);
            assert!(non_steep(&post) < non_steep(&pre) || pre.fringe_ends(pre.edge_index(edge).unwrap()) == 2);
            for d in delta_edges {
                assert!(post.is_steep(post.edge_index(d).unwrap()));
                assert!(iso(&contract_idle_edge(&post, d).unwrap(), &pre), "{name}: {edge} via {d}");
            }
        }
    }
    assert!(seen > 0);
    let m = fixture("moves");
    assert_eq!(steepen(&m, "a"), Err(EnvelopeError::NotSubFull));
    let k = fixture("kron-h");
    assert!(matches!(steepen(&k, "e2"), Err(EnvelopeError::EdgeAlreadySteep(_))));
}

#[test]
fn filling_completes_the_chart() {
    for name in CHARTS {
        for (pre, mv) in steps(&fixture(name)) {
            if !matches!(mv, Move::FillStep { .. }) {
                continue;
            }
            let (post, records) = fill(&pre).unwrap();
            assert!(full(&post) && non_steep(&post) == 0, "{name}");
            assert!(!records.is_empty());
            let (same, none) = fill(&post).unwrap();
            assert_eq!((same, none.len()), (post, 0));
            break;
        }
    }
    let k = fixture("kron-h");
    assert_eq!(fill(&k).unwrap(), (k.clone(), vec![]));
    assert!(matches!(fill(&fixture("moves")), Err(EnvelopeError::NotSubFull)));
}

#[test]
fn band_correction_is_undone_by_any_two_contractions() {
    let m = fixture("moves");
    let (pre, mv) = steps(&m).into_iter().find(|(_, mv)| matches!(mv, Move::BandCorrect { .. })).unwrap();
    let Move::BandCorrect { band, new_edges, fill_sublog, .. } = &mv else { unreachable!() };
    let word = parse_word(&pre, band).unwrap();
    let (post, again) = correct_band(&pre, &word).unwrap();
    assert_eq!(&again, &mv);
    // The replacement for the band is no longer steep.
    assert!(classify_chart(&post).gentle || post.num_edges() > pre.num_edges());
    let placements: Vec<Placement> = fill_sublog
        .iter()
        .map(|s| match s {
            Move::FillStep { placement, .. } => *placement,
            _ => panic!(),
        })
        .collect();
    assert_eq!(placements, [Placement::Below, Placement::Below, Placement::Above, Placement::Above]);

    let fills: Vec<String> = fill_sublog
        .iter()
        .map(|s| match s {
            Move::FillStep { new_edge, .. } => new_edge.clone(),
            _ => unreachable!(),
        })
        .collect();
    let bare = delete_edges(&post, &fills.iter().map(String::as_str).collect::<Vec<_>>()).unwrap();
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let once = contract_idle_edge(&bare, &new_edges[i]).unwrap();
        let twice = contract_idle_edge(&once, &new_edges[j]).unwrap();
        assert!(iso(&twice, &pre), "contracting {} and {}", new_edges[i], new_edges[j]);
    }

    // A band whose edges do not all ascend is refused.
    let bowtie_like = parse_word(&pre, &band.iter().rev().cloned().collect::<Vec<_>>());
    if let Ok(w) = bowtie_like {
        let mixed: Vec<_> = w.iter().take(1).copied().collect();
        assert!(correct_band(&pre, &mixed).is_err());
    }
    assert_eq!(correct_band(&fixture("square"), &[]).map(|_| ()), Err(EnvelopeError::BandNotSteep));
    assert_eq!(correct_band(&m, &[]).map(|_| ()), Err(EnvelopeError::NotFull));
}

#[test]
fn gentle_inputs_are_fixed_points() {
    for name in ["kron-h", "square"] {
        let c = fixture(name);
        let env = gentle_envelope(&c);
        assert_eq!(env.envelope, c);
        assert!(env.w.is_empty() && env.log.is_empty());
        assert!(verify_envelope_roundtrip(&c, &env).passed());
    }
}

#[test]
fn every_fixture_round_trips() {
    for name in CHARTS {
        let c = fixture(name);
        let env = gentle_envelope(&c);
        let r = verify_envelope_roundtrip(&c, &env);
        assert!(r.passed(), "{name}: {:?}", r.failures);
        assert!(iso(&undo_envelope(&env).unwrap(), &c));
        assert_eq!(replay(&c, &env.log).unwrap(), env.envelope, "{name}");
    }
}

#[test]
fn tampered_w_fails() {
    let c = fixture("bowtie");
    let mut env = gentle_envelope(&c);
    let first = env.w.iter().next().unwrap().clone();
    env.w.remove(&first);
    let r = verify_envelope_roundtrip(&c, &env);
    assert!(!r.passed());
    assert!(!r.isomorphic);
}

#[test]
fn pipeline_is_deterministic() {
    for name in CHARTS {
        let c = fixture(name);
        let a = serde_json::to_string(&gentle_envelope(&c)).unwrap();
        let b = serde_json::to_string(&gentle_envelope(&c)).unwrap();
        assert_eq!(a, b, "{name}");
    }
}

#[test]
fn moves_preserve_directability() {
    for name in CHARTS {
        let c = fixture(name);
        if !classify_chart(&c).directable {
            continue;
        }
        let env = gentle_envelope(&c);
        for i in 0..=env.log.len() {
            assert!(classify_chart(&replay(&c, &env.log[..i]).unwrap()).directable, "{name} after {i} moves");
        }
    }
}

#[test]
fn intermediate_charts_stay_valid_and_sub_full_after_reduction() {
    for name in CHARTS {
        let c = fixture(name);
        for (pre, mv) in steps(&c) {
            if !matches!(mv, Move::DegreeReduce { .. }) {
                assert!(sub_full(&pre), "{name}");
            }
        }
    }
}

mod common;

use common::{fixture, CHARTS};
use turbulence::chart::{
    charts_isomorphic, classify_chart, contract_idle_edge, delete_edges, validate_chart, ChartDesc, ChartError,
    VertexKind,
};
use turbulence::envelope::degree_reduce;
use turbulence::io::{chart_to_json, parse_chart};

fn desc(name: &str) -> ChartDesc {
    fixture(name).to_desc()
}

#[test]
fn square_fixture_shape() {
    let sq = fixture("square");
    assert_eq!(sq.internal_vertices().count(), 1);
    assert_eq!(sq.fringe_vertices().count(), 4);
    assert_eq!(sq.num_edges(), 4);
}

#[test]
fn emptied_class_is_a_bad_partition() {
    let mut d = desc("bowtie");
    let moved = std::mem::take(&mut d.classes.get_mut("v").unwrap()[0]);
    d.classes.get_mut("v").unwrap()[1].extend(moved);
    assert!(matches!(validate_chart(&d), Err(ChartError::BadPartition { .. })));
}

#[test]
fn isolated_vertex_is_rejected() {
    let mut d = desc("square");
    d.vertices.push(turbulence::chart::VertexDesc { id: "zz".into(), kind: VertexKind::Internal });
    assert!(matches!(validate_chart(&d), Err(ChartError::IsolatedVertex(v)) if v == "zz"));
}

#[test]
fn duplicate_and_dangling_ids_are_rejected() {
    let mut d = desc("square");
    let e = d.edges[0].clone();
    d.edges.push(e);
    assert!(matches!(validate_chart(&d), Err(ChartError::DuplicateId(_))));

    let mut d = desc("square");
    d.classes.get_mut("u").unwrap()[0][0].1 ^= 1;
    assert!(matches!(validate_chart(&d), Err(ChartError::DanglingHalfEdge { .. })));
}

#[test]
fn fringe_vertex_with_classes_is_rejected() {
    let mut d = desc("square");
    let f = d.vertices.iter().find(|v| v.kind == VertexKind::Fringe).unwrap().id.clone();
    let u = d.classes["u"].clone();
    d.classes.insert(f, u);
    assert!(validate_chart(&d).is_err());
}

#[test]
fn classification_of_named_fixtures() {
    let k = classify_chart(&fixture("kron-h"));
    assert!(k.directable && !k.acyclic && k.gentle);
    let t = classify_chart(&fixture("trapezoid-a"));
    assert!(!t.directable && t.acyclic && !t.gentle);
    let b = classify_chart(&fixture("bowtie"));
    assert!(!b.directable && !b.acyclic && !b.gentle);
    assert!(b.band_word.is_some());
}

#[test]
fn directability_and_acyclicity_ignore_the_framing() {
    for name in CHARTS {
        let c = fixture(name);
        let a = classify_chart(&c);
        let b = classify_chart(&c.reversed_framing());
        assert_eq!((a.directable, a.acyclic), (b.directable, b.acyclic), "{name}");
    }
}

#[test]
fn gentle_charts_reach_the_fringe() {
    for name in CHARTS {
        let c = fixture(name);
        if classify_chart(&c).gentle {
            assert!((0..c.num_edges()).any(|e| c.fringe_ends(e) > 0), "{name}");
        }
    }
}

#[test]
fn contraction_matches_the_reconstructed_figure() {
    let left = fixture("contract-left");
    let right = fixture("contract-right");
    let merged = contract_idle_edge(&left, "alpha").unwrap();
    assert!(charts_isomorphic(&merged, &right).is_some());
    assert_eq!(merged.num_edges(), left.num_edges() - 1);
}

#[test]
fn contraction_undoes_degree_reduction() {
    for name in CHARTS {
        let c = fixture(name);
        for v in c.internal_vertices() {
            let id = c.vertex_id(v).to_string();
            let Ok((big, rec)) = degree_reduce(&c, &id, 1) else { continue };
            let turbulence::envelope::Move::DegreeReduce { delta_edge, .. } = rec else { panic!() };
            let back = contract_idle_edge(&big, &delta_edge).unwrap();
            assert!(charts_isomorphic(&back, &c).is_some(), "{name} at {id}");
        }
    }
}

#[test]
fn loops_are_not_idle() {
    let t = fixture("trapezoid-a");
    assert!(matches!(contract_idle_edge(&t, "l"), Err(ChartError::NotIdle(_))));
}

#[test]
fn deleting_edges_gives_the_kronecker_face() {
    let face = delete_edges(&fixture("kron-h"), &["e1", "f1"]).unwrap();
    assert!(charts_isomorphic(&face, &fixture("kron-face")).is_some());
}

#[test]
fn deleting_nothing_is_the_identity() {
    for name in CHARTS {
        let c = fixture(name);
        assert_eq!(delete_edges(&c, &[]).unwrap(), c);
    }
}

#[test]
fn deleting_a_whole_vertex_stays_valid() {
    let c = fixture("moves");
    let gone = delete_edges(&c, &["b", "c"]).unwrap();
    assert!(gone.vertex_index("v").is_none());
    validate_chart(&gone.to_desc()).unwrap();
    assert!(matches!(delete_edges(&c, &["nope"]), Err(ChartError::UnknownEdge(_))));
}

#[test]
fn isomorphism_tracks_framings() {
    let a = fixture("trapezoid-a");
    assert!(charts_isomorphic(&a, &fixture("trapezoid-b")).is_none());
    assert!(charts_isomorphic(&fixture("square"), &fixture("bowtie")).is_none());

    let mut d = a.to_desc();
    let rename = |s: &str| format!("{s}_x");
    for v in &mut d.vertices {
        v.id = rename(&v.id);
    }
    for e in &mut d.edges {
        e.id = rename(&e.id);
        e.ends = [rename(&e.ends[0]), rename(&e.ends[1])];
    }
    d.classes = d
        .classes
        .into_iter()
        .map(|(v, l)| (rename(&v), l.into_iter().map(|list| list.into_iter().map(|(e, k)| (rename(&e), k)).collect()).collect()))
        .collect();
    assert!(charts_isomorphic(&a, &validate_chart(&d).unwrap()).is_some());
}

#[test]
fn same_class_loop_is_a_warning() {
    let mut d = desc("trapezoid-a");
    let cls = d.classes.get_mut("v").unwrap();
    cls[1].retain(|(e, _)| e != "l");
    cls[0].push(("l".into(), 0));
    cls[0].push(("l".into(), 1));
    let c = validate_chart(&d).unwrap();
    let r = classify_chart(&c);
    assert!(r.violations.iter().any(|v| v.warning));
}

#[test]
fn fixtures_are_canonically_serialized() {
    for name in CHARTS {
        let bytes = std::fs::read(common::fixture_path(name)).unwrap();
        let c = parse_chart(&bytes).unwrap();
        let again = chart_to_json(&c);
        assert_eq!(parse_chart(again.as_bytes()).unwrap(), c, "{name}");
        assert_eq!(chart_to_json(&parse_chart(again.as_bytes()).unwrap()), again, "{name}");
    }
}

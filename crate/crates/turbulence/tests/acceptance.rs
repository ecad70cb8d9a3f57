//! One PASS/FAIL line per acceptance criterion. Exact arithmetic throughout,
//! so the only pinned tolerances are wall-clock budgets.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::{fixture, CHARTS};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use turbulence::chart::{charts_isomorphic, classify_chart, contract_idle_edge, validate_chart, Chart};
use turbulence::compat::{compatible, enumerate_maximal_bundles_capped, enumerate_maximal_cliques, Bundle};
use turbulence::convert::{
    chart_of_framed_digraph, chart_of_fringed_algebra, chart_of_signed_graph, fringed_algebra_of_gentle_chart,
    signed_graph_of_acyclic_chart, FramedDigraph,
};
use turbulence::envelope::{degree_reduce, gentle_envelope, undo_envelope, verify_envelope_roundtrip, Move};
use turbulence::gen::{random_chart, reframe, GenParams};
use turbulence::io::parse_json;
use turbulence::linalg::Q;
use turbulence::polyhedron::{
    coefficients_in, decompose_flow, integer_points, oracle_presentation, trail_presentation,
    verify_subdivision_capped, verify_triangulation, Flow, OracleMode,
};
use turbulence::trails::{canonicalize_trail, capped_trails, elementary_trails, inverse, Trail};

const RANDOM_CHARTS: u64 = 200;
const SWEEP_BUDGET: Duration = Duration::from_secs(60);
const ENVELOPE_BUDGET: Duration = Duration::from_secs(120);
const ITEM_BUDGET: Duration = Duration::from_secs(10);

type Check = Result<String, String>;

fn ensure(ok: bool, why: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(why())
    }
}

fn random_charts() -> Vec<Chart> {
    (0..RANDOM_CHARTS).map(|s| random_chart(s, GenParams::default())).collect()
}

fn fixtures() -> Vec<Chart> {
    CHARTS.iter().map(|n| fixture(n)).collect()
}

fn iso(a: &Chart, b: &Chart) -> bool {
    charts_isomorphic(a, b).is_some()
}

fn q(k: i64) -> Q {
    Q::from_integer(k.into())
}

fn indicator_set(c: &Chart, b: &Bundle) -> BTreeSet<Vec<i64>> {
    b.trails().map(|t| t.indicator(c.num_edges())).collect()
}

fn trail_presentation_sweep() -> Check {
    let t = Instant::now();
    for c in fixtures().iter().chain(&random_charts()) {
        let o = oracle_presentation(c, OracleMode::Unit).map_err(|e| format!("{}: {e}", c.name()))?;
        ensure(trail_presentation(c) == o, || format!("{} differs", c.name()))?;
    }
    let took = t.elapsed();
    ensure(took <= SWEEP_BUDGET, || format!("took {took:?}"))?;
    Ok(format!("{} fixtures and {RANDOM_CHARTS} random charts agree in {took:.1?}", CHARTS.len()))
}

fn bowtie() -> Check {
    let b = fixture("bowtie");
    let o = oracle_presentation(&b, OracleMode::Unit).map_err(|e| e.to_string())?;
    let verts: BTreeSet<Vec<i64>> = [[1, 0, 0, 1], [2, 1, 0, 0], [0, 0, 1, 2]].iter().map(|v| v.to_vec()).collect();
    let got: BTreeSet<Vec<i64>> =
        o.vertices.iter().map(|v| v.iter().map(|x| x.to_integer().try_into().unwrap()).collect()).collect();
    ensure(got == verts, || format!("vertices {got:?}"))?;
    ensure(o.rays.len() == 1 && o.rays.contains(&vec![q(0), q(1), q(1), q(0)]), || format!("rays {:?}", o.rays))?;

    let cap = 3i64;
    let b_ = |a: i64| vec![1, a, a, 1];
    let e_ = |a: i64| vec![2, a + 1, a, 0];
    let h_ = |a: i64| vec![0, a, a + 1, 2];
    let want: BTreeSet<Vec<i64>> = (0..=cap).flat_map(|a| [b_(a), e_(a), h_(a)]).collect();
    // The box admits every family member up to `cap`; the index of a point
    // is its smaller loop coordinate.
    let scanned: BTreeSet<Vec<i64>> =
        integer_points(&b, &[2, cap + 1, cap + 1, 2], None).into_iter().filter(|p| p[1].min(p[2]) <= cap).collect();
    ensure(scanned == want, || format!("scan {scanned:?}"))?;

    let mut bundles: Vec<BTreeSet<Vec<i64>>> =
        enumerate_maximal_bundles_capped(&b, 3).iter().map(|x| indicator_set(&b, x)).collect();
    bundles.sort();
    let eh = b_(0);
    let mut listed = vec![[eh.clone(), vec![0, 1, 1, 0]].into_iter().collect::<BTreeSet<_>>()];
    for a in 0..2 {
        listed.push([eh.clone(), e_(a), e_(a + 1)].into_iter().collect());
        listed.push([eh.clone(), h_(a), h_(a + 1)].into_iter().collect());
    }
    listed.sort();
    ensure(bundles == listed, || format!("bundles {bundles:?}"))?;
    Ok(format!("3 vertices, 1 ray, {} scanned flows, {} bundles at cap 3", scanned.len(), bundles.len()))
}

fn kronecker() -> Check {
    let k = fixture("kron-h");
    let el = elementary_trails(&k);
    let routes: BTreeSet<Vec<i64>> = el.iter().filter(|t| t.is_route()).map(|t| t.indicator(6)).collect();
    // Edge order e1 e2 e3 f1 f2 f3: p_e, p_f, l_0, r_0.
    let want: BTreeSet<Vec<i64>> =
        [[1, 1, 1, 0, 0, 0], [0, 0, 0, 1, 1, 1], [1, 0, 0, 1, 0, 0], [0, 0, 1, 0, 0, 1]].iter().map(|v| v.to_vec()).collect();
    ensure(routes == want, || format!("kron-h routes {routes:?}"))?;
    ensure(el.iter().filter(|t| !t.is_route()).count() == 1, || "kron-h band count".into())?;

    let alt = enumerate_maximal_bundles_capped(&fixture("kron-alt"), 2).len();
    ensure(alt == 2, || format!("kron-alt has {alt} bundles"))?;

    let nb = fixture("kron-nb");
    let ts = capped_trails(&nb, 4);
    let bands: Vec<&Trail> = ts.iter().filter(|t| !t.is_route()).collect();
    ensure(bands.len() == 1, || format!("kron-nb has {} bands", bands.len()))?;
    ensure(ts.iter().filter(|t| t.is_route()).all(|r| !compatible(&nb, r, bands[0])), || "kron-nb band is compatible".into())?;
    let s = verify_subdivision_capped(&nb, 4, 64, 11);
    ensure(s.pass, || "kron-nb subdivision fails".into())?;
    ensure(s.cells.iter().all(|c| c.full_dimensional && c.unimodular && c.bands == 0), || "kron-nb cell shape".into())?;
    Ok(format!("4 elementary routes and 1 band; kron-alt 2 bundles; kron-nb {} unimodular cells", s.cells.len()))
}

fn triangulation() -> Check {
    let mut out = Vec::new();
    for (name, simplices) in [("square", 2), ("trapezoid-a", 3), ("trapezoid-b", 3)] {
        let r = verify_triangulation(&fixture(name)).map_err(|e| format!("{name}: {e}"))?;
        ensure(r.pass && r.simplices == simplices && r.all_unimodular && r.all_full_dimensional, || format!("{name}: {r:?}"))?;
        ensure(Some(&r.volume_sum) == r.oracle_volume.as_ref(), || format!("{name}: volume {r:?}"))?;
        ensure(r.strong_intersection_failures.is_empty(), || format!("{name}: intersections"))?;
        out.push(format!("{name} {} simplices volume {}", r.simplices, r.volume_sum));
    }
    ensure(out[0].ends_with("volume 2"), || out[0].clone())?;
    Ok(out.join(", "))
}

fn acyclicity() -> Check {
    let mut n = 0;
    for c in fixtures().iter().chain(&random_charts()) {
        let o = oracle_presentation(c, OracleMode::Unit).map_err(|e| e.to_string())?;
        ensure(classify_chart(c).acyclic == o.rays.is_empty(), || format!("{} disagrees", c.name()))?;
        n += 1;
    }
    Ok(format!("{n} charts, 0 exceptions"))
}

fn decomposition() -> Check {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let acyclic: Vec<Chart> = fixtures().into_iter().filter(|c| classify_chart(c).acyclic).collect();
    let cells: Vec<(usize, Vec<Bundle>)> =
        acyclic.iter().enumerate().map(|(i, c)| (i, enumerate_maximal_cliques(c).unwrap())).collect();
    for i in 0..500 {
        let (ci, cliques) = &cells[i % cells.len()];
        let c = &acyclic[*ci];
        let n = c.num_edges();
        let k = rng.gen_range(0..cliques.len());
        let clique = &cliques[k];
        let w: Vec<i64> = clique.routes.iter().map(|_| rng.gen_range(1..=9)).collect();
        let total: i64 = w.iter().sum();
        let mut x = vec![q(0); n];
        for (r, wi) in clique.routes.iter().zip(&w) {
            for (xi, v) in x.iter_mut().zip(r.indicator(n)) {
                *xi += Q::new((v * wi).into(), total.into());
            }
        }
        let flow = Flow(x.clone());
        let comb = decompose_flow(c, &flow, 1).map_err(|e| format!("{}: {e}", c.name()))?;
        ensure(comb.recompose(n) == x, || format!("{}: recomposition", c.name()))?;
        let expect: Vec<(Trail, Q)> =
            clique.routes.iter().cloned().zip(w.iter().map(|&wi| Q::new(wi.into(), total.into()))).collect();
        ensure(comb.coefficients == expect, || format!("{}: coefficients", c.name()))?;
        // An interior point of one cell lies in no other.
        let others = cliques.iter().enumerate().filter(|(j, b)| *j != k && coefficients_in(c, &flow, b).is_some()).count();
        ensure(others == 0, || format!("{}: point in {others} other cells", c.name()))?;
    }
    for i in 0..100 {
        let c = &acyclic[i % acyclic.len()];
        let n = c.num_edges();
        let routes: Vec<Trail> = elementary_trails(c).into_iter().filter(Trail::is_route).collect();
        let mut x = vec![0i64; n];
        for _ in 0..rng.gen_range(1..=4) {
            let r = &routes[rng.gen_range(0..routes.len())];
            for (xi, v) in x.iter_mut().zip(r.indicator(n)) {
                *xi += v;
            }
        }
        let comb = decompose_flow(c, &Flow::from_ints(&x), 1).map_err(|e| format!("{}: {e}", c.name()))?;
        ensure(comb.coefficients.iter().all(|(_, w)| w.is_integer()), || format!("{}: {x:?}", c.name()))?;
        ensure(comb.recompose(n) == Flow::from_ints(&x).0, || format!("{}: recomposition", c.name()))?;
    }
    let took = t.elapsed();
    ensure(took <= ITEM_BUDGET, || format!("took {took:?}"))?;
    Ok(format!("500 interior points and 100 integer flows in {took:.1?}"))
}

fn envelopes() -> Check {
    let t = Instant::now();
    let random = (0..100).map(|s| random_chart(1000 + s, GenParams::default()));
    let mut n = 0;
    for c in fixtures().into_iter().chain(random) {
        let env = gentle_envelope(&c);
        ensure(classify_chart(&env.envelope).gentle, || format!("{} envelope not gentle", c.name()))?;
        let r = verify_envelope_roundtrip(&c, &env);
        ensure(r.passed(), || format!("{}: {:?}", c.name(), r.failures))?;
        n += 1;
    }
    let took = t.elapsed();
    ensure(took <= ENVELOPE_BUDGET, || format!("took {took:?}"))?;
    Ok(format!("{n} charts round trip in {took:.1?}"))
}

fn conversions() -> Check {
    let mut gentle = 0;
    for c in fixtures().iter().filter(|c| classify_chart(c).gentle) {
        let alg = fringed_algebra_of_gentle_chart(c).map_err(|e| e.to_string())?;
        let back = chart_of_fringed_algebra(&alg).map_err(|e| e.to_string())?;
        ensure(iso(&back, c), || format!("{} algebra round trip", c.name()))?;
        ensure(fringed_algebra_of_gentle_chart(&back).as_ref() == Ok(&alg), || format!("{} algebra drift", c.name()))?;
        gentle += 1;
    }
    let bytes = std::fs::read(common::fixture_path("dag-square")).map_err(|e| e.to_string())?;
    let dg: FramedDigraph = parse_json(&bytes).map_err(|e| e.to_string())?;
    let sq = chart_of_framed_digraph(&dg).map_err(|e| e.to_string())?;
    ensure(iso(&sq, &fixture("square")), || "dag-square is not the square".into())?;
    let tri = verify_triangulation(&sq).map_err(|e| e.to_string())?;
    ensure(tri.pass && tri.simplices == 2 && tri.volume_sum == "2", || format!("dag-square {tri:?}"))?;

    let params = GenParams { max_internal: 5, max_edges: 10, ..GenParams::default() };
    let random: Vec<Chart> = (0..).map(|s| random_chart(s, params)).filter(|c| classify_chart(c).acyclic).take(50).collect();
    let mut signed = 0;
    for c in ["trapezoid-a", "trapezoid-b"].map(fixture).iter().chain(&random) {
        let (sg, _) = signed_graph_of_acyclic_chart(c).map_err(|e| format!("{}: {e}", c.name()))?;
        let want = oracle_presentation(c, OracleMode::Unit).map_err(|e| e.to_string())?;
        ensure(sg.flow_presentation().as_ref() == Ok(&want), || format!("{} signed polytope", c.name()))?;
        let back = chart_of_signed_graph(&sg).map_err(|e| e.to_string())?;
        ensure(oracle_presentation(&back, OracleMode::Unit).as_ref() == Ok(&want), || format!("{} signed chart", c.name()))?;
        signed += 1;
    }
    Ok(format!("{gentle} gentle fixtures, dag-square triangulation, {signed} signed charts"))
}

fn swap_classes(c: &Chart) -> Chart {
    let mut desc = c.to_desc();
    for lists in desc.classes.values_mut() {
        lists.swap(0, 1);
    }
    validate_chart(&desc).unwrap()
}

fn properties() -> Check {
    let cases = 200u64;
    let params = GenParams { max_internal: 4, max_edges: 8, ..GenParams::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..cases {
        let seed: u64 = rng.gen();
        let c = random_chart(seed, params);
        let ts = elementary_trails(&c);
        for t in &ts {
            ensure(canonicalize_trail(&c, &inverse(&t.word)).as_ref() == Ok(t), || format!("seed {seed}: inversion"))?;
            if !t.is_route() {
                let k = rng.gen_range(0..t.word.len());
                let rot: Vec<_> = t.word[k..].iter().chain(&t.word[..k]).copied().collect();
                ensure(canonicalize_trail(&c, &rot).as_ref() == Ok(t), || format!("seed {seed}: rotation"))?;
            }
        }
        let s = swap_classes(&c);
        for p in &ts {
            for r in &ts {
                let v = compatible(&c, p, r);
                ensure(v == compatible(&c, r, p) && v == compatible(&s, p, r), || format!("seed {seed}: compatibility"))?;
            }
        }
        let d = classify_chart(&c).directable;
        ensure(
            classify_chart(&reframe(&c, rng.gen())).directable == d && classify_chart(&c.reversed_framing()).directable == d,
            || format!("seed {seed}: directability"),
        )?;
        let env = gentle_envelope(&c);
        ensure(iso(&undo_envelope(&env).map_err(|e| e.to_string())?, &c), || format!("seed {seed}: envelope undo"))?;
        for v in c.internal_vertices() {
            if let Ok((big, Move::DegreeReduce { delta_edge, .. })) = degree_reduce(&c, c.vertex_id(v), 1) {
                let back = contract_idle_edge(&big, &delta_edge).map_err(|e| e.to_string())?;
                ensure(iso(&back, &c), || format!("seed {seed}: reduction at {}", c.vertex_id(v)))?;
            }
        }
    }
    Ok(format!("{cases} cases per property, 0 failures"))
}

fn loop_families() -> Check {
    let b = fixture("bowtie");
    // The loop families carry E_a = (2,a+1,a,0) and H_a = (0,a,a+1,2); the
    // flows B_a = (1,a,a,1) with a >= 1 are not vertices.
    let bundles: Vec<BTreeSet<Vec<i64>>> =
        enumerate_maximal_bundles_capped(&b, 3).iter().map(|x| indicator_set(&b, x)).collect();
    let has = |s: &[Vec<i64>]| bundles.iter().any(|x| s.iter().all(|v| x.contains(v)));
    let eh = vec![1, 0, 0, 1];
    ensure(has(&[eh.clone(), vec![0, 0, 1, 2], vec![0, 1, 2, 2]]), || "H bundle missing".into())?;
    ensure(!has(&[eh.clone(), vec![1, 1, 1, 1]]), || "B_1 appears in a bundle".into())?;
    let o = oracle_presentation(&b, OracleMode::Unit).map_err(|e| e.to_string())?;
    ensure(!o.vertices.contains(&vec![q(1), q(1), q(1), q(1)]), || "B_1 is a vertex".into())?;
    Ok("H_a bundles hold and B_a with a >= 1 is no vertex".into())
}

fn main() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("trail presentation", trail_presentation_sweep),
        ("bowtie", bowtie),
        ("kronecker examples", kronecker),
        ("triangulation verifier", triangulation),
        ("acyclic iff bounded", acyclicity),
        ("bundle decomposition", decomposition),
        ("gentle envelope", envelopes),
        ("conversion round trips", conversions),
        ("property suites", properties),
        ("bowtie loop families", loop_families),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}

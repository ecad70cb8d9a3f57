use std::io::{Read, Write};
use std::path::Path;
use std::time::Instant;

use serde_json::{json, Value};
use turbulence::chart::{classify_chart, Chart};
use turbulence::compat::{enumerate_maximal_bundles_capped, enumerate_maximal_cliques, Bundle};
use turbulence::convert::{
    chart_of_framed_digraph, chart_of_fringed_algebra, chart_of_signed_graph, fringed_algebra_of_gentle_chart,
    signed_graph_of_acyclic_chart, ConvertError, FramedDigraph, FringedAlgebra, SignedGraph,
};
use turbulence::envelope::{gentle_envelope, verify_envelope_roundtrip};
use turbulence::io::{
    bundle_json, chart_to_json, flow_json, parse_chart, parse_flow, parse_json, presentation_json, q_string,
    to_pretty, trail_json,
};
use turbulence::linalg::Q;
use turbulence::polyhedron::{
    decompose_flow, oracle_presentation, trail_presentation, verify_subdivision_capped, verify_triangulation,
    DecomposeError, OracleMode, ORACLE_LIMIT,
};
use turbulence::render::{render_projection, Cell, RenderError};
use turbulence::trails::elementary_trails;

use crate::report::{digest, Report};
use crate::{Cli, Command, Format, Kind};

const OK: u8 = 0;
const FAILED: u8 = 1;
const USAGE: u8 = 2;

/// A usage or input error: reported on stderr with exit status 2.
struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Usage {
        Usage(e.to_string())
    }
}

/// What a command produced: its results, whether its checks passed, and an
/// optional artifact destined for `--out`.
struct Outcome {
    pass: bool,
    results: Value,
    artifact: Option<String>,
}

impl Outcome {
    fn new(pass: bool, results: Value) -> Outcome {
        Outcome { pass, results, artifact: None }
    }
}

fn read_input(path: &Path) -> Result<Vec<u8>, Usage> {
    if path == Path::new("-") {
        let mut buf = Vec::new();
        std::io::stdin().read_to_end(&mut buf).map_err(|e| Usage(format!("stdin: {e}")))?;
        Ok(buf)
    } else {
        std::fs::read(path).map_err(|e| Usage(format!("{}: {e}", path.display())))
    }
}

fn input_of(cmd: &Command) -> &Path {
    match cmd {
        Command::Validate { input }
        | Command::Classify { input }
        | Command::Present { input }
        | Command::Triangulate { input }
        | Command::Subdivide { input }
        | Command::Decompose { input, .. }
        | Command::Envelope { input }
        | Command::Convert { input, .. }
        | Command::Render { input } => input,
    }
}

fn name_of(cmd: &Command) -> &'static str {
    match cmd {
        Command::Validate { .. } => "validate",
        Command::Classify { .. } => "classify",
        Command::Present { .. } => "present",
        Command::Triangulate { .. } => "triangulate",
        Command::Subdivide { .. } => "subdivide",
        Command::Decompose { .. } => "decompose",
        Command::Envelope { .. } => "envelope",
        Command::Convert { .. } => "convert",
        Command::Render { .. } => "render",
    }
}

pub fn run(cli: &Cli) -> u8 {
    let path = input_of(&cli.command);
    let bytes = match read_input(path) {
        Ok(b) => b,
        Err(Usage(m)) => return usage(&m),
    };
    let start = Instant::now();
    let outcome = match dispatch(cli, &bytes) {
        Ok(o) => o,
        Err(Usage(m)) => return usage(&format!("{}: {m}", path.display())),
    };
    let elapsed = start.elapsed();
    let report = Report {
        command: name_of(&cli.command),
        input: path.display().to_string(),
        digest: digest(&bytes),
        seed: cli.seed,
        cap: cli.cap,
        pass: outcome.pass,
        results: outcome.results,
        timings: cli.timings.then(|| json!({ "total_ms": elapsed.as_secs_f64() * 1e3 })),
    };
    let text = match cli.format {
        Format::Json => to_pretty(&report.to_json()),
        Format::Text => report.to_text(),
    };
    let written = match (&cli.out, outcome.artifact) {
        (Some(out), Some(artifact)) => {
            std::fs::write(out, artifact).and_then(|()| std::io::stdout().write_all(text.as_bytes()))
        }
        (Some(out), None) => std::fs::write(out, text),
        (None, Some(artifact)) if matches!(cli.command, Command::Render { .. }) => {
            std::io::stdout().write_all(artifact.as_bytes())
        }
        (None, _) => std::io::stdout().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        return usage(&format!("cannot write output: {e}"));
    }
    if report.pass {
        OK
    } else {
        FAILED
    }
}

fn usage(message: &str) -> u8 {
    eprintln!("turb: {message}");
    USAGE
}

fn dispatch(cli: &Cli, bytes: &[u8]) -> Result<Outcome, Usage> {
    if let Command::Convert { from, to, .. } = &cli.command {
        return convert(bytes, *from, *to);
    }
    let chart = parse_chart(bytes)?;
    let guard = || {
        if chart.num_edges() > ORACLE_LIMIT {
            Err(Usage(format!("{} edges exceeds the oracle limit of {ORACLE_LIMIT}", chart.num_edges())))
        } else {
            Ok(())
        }
    };
    match &cli.command {
        Command::Validate { .. } => Ok(Outcome::new(
            true,
            json!({
                "name": chart.name(),
                "vertices": chart.num_vertices(),
                "edges": chart.num_edges(),
                "canonical": chart_to_json(&chart).as_bytes() == bytes,
            }),
        )),
        Command::Classify { .. } => Ok(Outcome::new(true, serde_json::to_value(classify_chart(&chart))?)),
        Command::Present { .. } => present(cli, &chart, guard),
        Command::Triangulate { .. } => {
            guard()?;
            Ok(match verify_triangulation(&chart) {
                Ok(r) => Outcome::new(r.pass, serde_json::to_value(r)?),
                Err(e) => Outcome::new(false, json!({ "error": e.to_string() })),
            })
        }
        Command::Subdivide { .. } => {
            guard()?;
            let r = verify_subdivision_capped(&chart, cli.cap, cli.samples, cli.seed);
            Ok(Outcome::new(r.pass, serde_json::to_value(r)?))
        }
        Command::Decompose { flow, .. } => decompose(cli, &chart, flow),
        Command::Envelope { .. } => {
            guard()?;
            let env = gentle_envelope(&chart);
            if env.envelope.num_edges() > ORACLE_LIMIT {
                return Err(Usage(format!("the envelope has more than {ORACLE_LIMIT} edges")));
            }
            let check = verify_envelope_roundtrip(&chart, &env);
            let pass = check.passed();
            Ok(Outcome::new(pass, json!({ "envelope": env, "roundtrip": check })))
        }
        Command::Render { .. } => render(cli, &chart),
        Command::Convert { .. } => unreachable!("handled above"),
    }
}

fn present(cli: &Cli, chart: &Chart, guard: impl Fn() -> Result<(), Usage>) -> Result<Outcome, Usage> {
    let p = trail_presentation(chart);
    let trails: Vec<Value> = elementary_trails(chart).iter().map(|t| trail_json(chart, t)).collect();
    let mut results = json!({
        "vertex_count": p.vertices.len(),
        "ray_count": p.rays.len(),
        "presentation": presentation_json(chart, &p),
        "elementary_trails": trails,
    });
    let mut pass = true;
    if cli.oracle {
        guard()?;
        let o = oracle_presentation(chart, OracleMode::Unit)?;
        pass = o == p;
        results["oracle_matches"] = json!(pass);
        if !pass {
            results["oracle"] = presentation_json(chart, &o);
        }
    }
    Ok(Outcome::new(pass, results))
}

fn decompose(cli: &Cli, chart: &Chart, spec: &str) -> Result<Outcome, Usage> {
    let flow = parse_flow(chart, spec)?;
    match decompose_flow(chart, &flow, cli.cap) {
        Ok(comb) => {
            let coefficients: serde_json::Map<String, Value> =
                comb.coefficients.iter().map(|(t, c)| (chart.word_label(&t.word), json!(q_string(c)))).collect();
            let exact = comb.recompose(chart.num_edges()) == flow.0;
            let integral = flow.integral() && comb.coefficients.iter().all(|(_, c)| c.is_integer());
            Ok(Outcome::new(
                exact,
                json!({
                    "flow": flow_json(chart, &flow.0),
                    "bundle": bundle_json(chart, &comb.bundle),
                    "coefficients": coefficients,
                    "recomposes": exact,
                    "integral": integral,
                }),
            ))
        }
        Err(DecomposeError::NotCovered) => Ok(Outcome::new(
            false,
            json!({ "flow": flow_json(chart, &flow.0), "error": DecomposeError::NotCovered.to_string() }),
        )),
        Err(e) => Err(e.into()),
    }
}

fn indicator(t: &turbulence::trails::Trail, n: usize) -> Vec<Q> {
    t.indicator(n).into_iter().map(|k| Q::from_integer(k.into())).collect()
}

fn cells(chart: &Chart, cap: usize) -> Vec<Bundle> {
    if classify_chart(chart).acyclic {
        enumerate_maximal_cliques(chart).expect("acyclic")
    } else {
        enumerate_maximal_bundles_capped(chart, cap)
    }
}

fn render(cli: &Cli, chart: &Chart) -> Result<Outcome, Usage> {
    let n = chart.num_edges();
    let p = trail_presentation(chart);
    let bundles = cells(chart, cli.cap);
    let cells: Vec<Cell> = bundles
        .iter()
        .enumerate()
        .map(|(i, b)| Cell {
            id: format!("cell{i}"),
            points: b.routes.iter().map(|t| indicator(t, n)).collect(),
            rays: b.bands.iter().map(|t| indicator(t, n)).collect(),
        })
        .collect();
    let bundle_list: Vec<Value> = bundles.iter().map(|b| bundle_json(chart, b)).collect();
    match render_projection(&p, &cells) {
        Ok(r) => {
            let format = if matches!(r, turbulence::render::Rendering::Svg(_)) { "svg" } else { "obj" };
            let results = json!({ "format": format, "cells": bundle_list, "drawing": r.text() });
            Ok(Outcome { pass: true, results, artifact: Some(r.text().to_string()) })
        }
        Err(e @ (RenderError::DimensionTooHigh(_) | RenderError::Empty)) => {
            Ok(Outcome::new(false, json!({ "error": e.to_string() })))
        }
    }
}

fn convert(bytes: &[u8], from: Kind, to: Kind) -> Result<Outcome, Usage> {
    // Every conversion passes through a chart.
    let chart = match from {
        Kind::Chart => parse_chart(bytes)?,
        Kind::Digraph => chart_of_framed_digraph(&parse_json::<FramedDigraph>(bytes)?)?,
        Kind::Algebra => match chart_of_fringed_algebra(&parse_json::<FringedAlgebra>(bytes)?) {
            Err(ConvertError::NotGentle) => return Ok(refused(ConvertError::NotGentle)),
            other => other?,
        },
        Kind::Signed => chart_of_signed_graph(&parse_json::<SignedGraph>(bytes)?)?,
    };
    if chart.num_edges() > ORACLE_LIMIT {
        return Err(Usage(format!("{} edges exceeds the oracle limit of {ORACLE_LIMIT}", chart.num_edges())));
    }
    let oracle = oracle_presentation(&chart, OracleMode::Unit)?;
    let mut checks = serde_json::Map::new();
    match from {
        Kind::Digraph => {
            let dg: FramedDigraph = parse_json(bytes)?;
            checks.insert("flow_polytope_matches".into(), json!(dg.flow_presentation() == oracle));
        }
        Kind::Signed => {
            let sg: SignedGraph = parse_json(bytes)?;
            checks.insert("flow_polytope_matches".into(), json!(sg.flow_presentation()? == oracle));
        }
        Kind::Chart | Kind::Algebra => {}
    }
    let mut certificate = None;
    let output = match to {
        Kind::Chart => serde_json::to_value(chart.to_desc())?,
        Kind::Algebra => match fringed_algebra_of_gentle_chart(&chart) {
            Ok(alg) => {
                let back = chart_of_fringed_algebra(&alg)?;
                checks.insert(
                    "round_trip_isomorphic".into(),
                    json!(turbulence::chart::charts_isomorphic(&back, &chart).is_some()),
                );
                serde_json::to_value(alg)?
            }
            Err(e @ ConvertError::NotGentle) => return Ok(refused(e)),
            Err(e) => return Err(e.into()),
        },
        Kind::Signed => match signed_graph_of_acyclic_chart(&chart) {
            Ok((sg, cert)) => {
                checks.insert("flow_polytope_matches".into(), json!(sg.flow_presentation()? == oracle));
                certificate = Some(cert);
                serde_json::to_value(sg)?
            }
            Err(e @ ConvertError::NotAcyclic) => return Ok(refused(e)),
            Err(e) => return Err(e.into()),
        },
        Kind::Digraph => return Err(Usage("conversion to a framed digraph is not supported".into())),
    };
    let pass = checks.values().all(|v| v.as_bool() == Some(true));
    let artifact = to_pretty(&output);
    Ok(Outcome { pass, results: json!({ "output": output, "checks": checks, "certificate": certificate }), artifact: Some(artifact) })
}

fn refused(e: ConvertError) -> Outcome {
    Outcome::new(false, json!({ "error": e.to_string() }))
}

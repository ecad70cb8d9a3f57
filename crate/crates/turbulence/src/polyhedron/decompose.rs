use num_traits::{Signed, Zero};
use thiserror::Error;

use super::Flow;
use crate::chart::{classify_chart, Chart};
use crate::compat::{enumerate_maximal_bundles_capped, enumerate_maximal_cliques, Bundle};
use crate::linalg::{self, q, Q};
use crate::trails::Trail;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecomposeError {
    #[error("flow has {got} coordinates, chart has {want} edges")]
    WrongLength { got: usize, want: usize },
    #[error("flow violates conservation")]
    NotConserved,
    #[error("flow has a negative coordinate")]
    Negative,
    #[error("no enumerated bundle covers the flow")]
    NotCovered,
}

/// A flow written as a positive combination of the trails of one bundle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BundleCombination {
    pub bundle: Bundle,
    pub coefficients: Vec<(Trail, Q)>,
}

impl BundleCombination {
    pub fn recompose(&self, num_edges: usize) -> Vec<Q> {
        let mut x = vec![Q::zero(); num_edges];
        for (t, c) in &self.coefficients {
            for (xi, k) in x.iter_mut().zip(t.indicator(num_edges)) {
                *xi += c * q(k);
            }
        }
        x
    }
}

/// Coefficients of `flow` over the generators of `bundle`, if it lies in its
/// simplihedron. Generators are independent, so the solution is unique.
pub fn coefficients_in(chart: &Chart, flow: &Flow, bundle: &Bundle) -> Option<Vec<Q>> {
    let n = chart.num_edges();
    let trails: Vec<&Trail> = bundle.trails().collect();
    let mut a: Vec<Vec<Q>> = vec![Vec::with_capacity(trails.len()); n + 1];
    for t in &trails {
        for (row, k) in a.iter_mut().zip(t.indicator(n)) {
            row.push(q(k));
        }
        a[n].push(if t.is_route() { q(1) } else { q(0) });
    }
    let mut b = flow.0.clone();
    b.push(flow.strength(chart));
    let x = linalg::solve_any(&a, &b, trails.len())?;
    x.iter().all(|c| !c.is_negative()).then_some(x)
}

pub fn decompose_in(chart: &Chart, flow: &Flow, bundles: &[Bundle]) -> Result<BundleCombination, DecomposeError> {
    let n = chart.num_edges();
    if flow.0.len() != n {
        return Err(DecomposeError::WrongLength { got: flow.0.len(), want: n });
    }
    if !flow.conserved(chart) {
        return Err(DecomposeError::NotConserved);
    }
    if !flow.nonnegative() {
        return Err(DecomposeError::Negative);
    }
    for bundle in bundles {
        if let Some(x) = coefficients_in(chart, flow, bundle) {
            let coefficients: Vec<(Trail, Q)> = bundle
                .trails()
                .cloned()
                .zip(x)
                .filter(|(_, c)| c.is_positive())
                .collect();
            let (routes, bands) =
                coefficients.iter().map(|(t, _)| t.clone()).partition(|t: &Trail| t.is_route());
            return Ok(BundleCombination {
                bundle: Bundle { routes, bands, maximal: false, cap: bundle.cap },
                coefficients,
            });
        }
    }
    Err(DecomposeError::NotCovered)
}

/// Finds the bundle whose simplihedron contains `flow` and its coefficients.
/// On charts with bands only trails within `cap` are searched.
pub fn decompose_flow(chart: &Chart, flow: &Flow, cap: usize) -> Result<BundleCombination, DecomposeError> {
    let bundles = if classify_chart(chart).acyclic {
        enumerate_maximal_cliques(chart).expect("acyclic")
    } else {
        enumerate_maximal_bundles_capped(chart, cap)
    };
    decompose_in(chart, flow, &bundles)
}

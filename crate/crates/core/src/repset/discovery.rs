//! Greedy and beam discovery of a representative dataset subset, plus the
//! random / lowest-mean / highest-mean baseline orders.

use std::collections::HashSet;
use std::fmt;

use rand::seq::SliceRandom;

use crate::benchio::Benchmark;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::seeded_rng;
use crate::simmeasure::SimilarityMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SelectionMethod {
    Greedy,
    Beam(usize),
    Random(u64),
    GreedyMin,
    GreedyMax,
}

impl fmt::Display for SelectionMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SelectionMethod::Greedy => f.write_str("greedy"),
            SelectionMethod::Beam(w) => write!(f, "beam({w})"),
            SelectionMethod::Random(seed) => write!(f, "random({seed})"),
            SelectionMethod::GreedyMin => f.write_str("greedy_min"),
            SelectionMethod::GreedyMax => f.write_str("greedy_max"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineKind {
    Random,
    GreedyMin,
    GreedyMax,
}

/// Ordered selection of dataset indices.
///
/// `deltas[k]` is the proxy coverage of the first `k + 1` picks. Baseline
/// orders carry no deltas until [`SelectionTrace::with_deltas`] is called.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionTrace<T> {
    pub order: Vec<usize>,
    pub deltas: Vec<T>,
    pub method: SelectionMethod,
}

impl<T: Scalar> SelectionTrace<T> {
    /// Recomputes per-prefix proxy coverage of this order under `sim`.
    pub fn with_deltas(mut self, sim: &SimilarityMatrix<T>) -> Self {
        let mut state = CoverState::new(sim.dim());
        self.deltas = self
            .order
            .iter()
            .map(|&i| {
                state.insert(sim, i);
                state.delta()
            })
            .collect();
        self
    }

    /// Smallest prefix whose proxy coverage reaches `gamma` (the whole
    /// order when none does).
    pub fn prefix_reaching(&self, gamma: T) -> &[usize] {
        let k = self
            .deltas
            .iter()
            .position(|&d| d >= gamma)
            .map_or(self.order.len(), |p| p + 1);
        &self.order[..k]
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

/// Per-dataset best similarity to the chosen set, maintained incrementally.
#[derive(Debug, Clone)]
struct CoverState<T> {
    lambdas: Vec<Option<T>>,
    members: Vec<bool>,
    order: Vec<usize>,
}

impl<T: Scalar> CoverState<T> {
    fn new(d: usize) -> Self {
        Self {
            lambdas: vec![None; d],
            members: vec![false; d],
            order: Vec::new(),
        }
    }

    fn lambda_after(&self, sim: &SimilarityMatrix<T>, k: usize, added: usize) -> T {
        if self.members[k] || k == added {
            T::one()
        } else {
            let c = sim.get(k, added);
            self.lambdas[k].map_or(c, |l| l.max(c))
        }
    }

    /// Proxy coverage of the current set plus `added`, without mutating.
    fn delta_with(&self, sim: &SimilarityMatrix<T>, added: usize) -> T {
        let d = self.lambdas.len();
        let total: T = (0..d).map(|k| self.lambda_after(sim, k, added)).sum();
        total / T::from_count(d)
    }

    fn insert(&mut self, sim: &SimilarityMatrix<T>, added: usize) {
        if self.members[added] {
            return;
        }
        for k in 0..self.lambdas.len() {
            self.lambdas[k] = Some(self.lambda_after(sim, k, added));
        }
        self.members[added] = true;
        self.order.push(added);
    }

    fn delta(&self) -> T {
        let d = self.lambdas.len();
        if self.order.is_empty() || d == 0 {
            return T::zero();
        }
        let total: T = self.lambdas.iter().map(|l| l.unwrap_or_else(T::zero)).sum();
        total / T::from_count(d)
    }

    fn key(&self) -> Vec<u64> {
        let mut bits = vec![0u64; self.members.len().div_ceil(64)];
        for (i, &m) in self.members.iter().enumerate() {
            if m {
                bits[i / 64] |= 1 << (i % 64);
            }
        }
        bits
    }
}

fn state_for<T: Scalar>(sim: &SimilarityMatrix<T>, subset: &[usize]) -> Result<CoverState<T>> {
    let mut state = CoverState::new(sim.dim());
    for &i in subset {
        if i >= sim.dim() {
            return Err(Error::Shape(format!(
                "dataset index {i} is out of range for {} datasets",
                sim.dim()
            )));
        }
        state.insert(sim, i);
    }
    Ok(state)
}

/// Mean over datasets of each dataset's coverage: 1 for members of
/// `subset`, otherwise its largest similarity to any member. The empty set
/// has coverage 0.
pub fn proxy_coverage<T: Scalar>(subset: &[usize], sim: &SimilarityMatrix<T>) -> Result<T> {
    Ok(state_for(sim, subset)?.delta())
}

/// Increase in proxy coverage from adding `candidate` to `subset`; zero
/// when it is already a member.
pub fn coverage_gain<T: Scalar>(
    subset: &[usize],
    candidate: usize,
    sim: &SimilarityMatrix<T>,
) -> Result<T> {
    let state = state_for(sim, subset)?;
    if candidate >= sim.dim() {
        return Err(Error::Shape(format!("dataset index {candidate} is out of range")));
    }
    if state.members[candidate] {
        return Ok(T::zero());
    }
    Ok(state.delta_with(sim, candidate) - state.delta())
}

fn validate_gamma<T: Scalar>(gamma: T) -> Result<()> {
    if gamma > T::zero() && gamma <= T::one() {
        Ok(())
    } else {
        Err(Error::Config(format!("coverage threshold gamma = {gamma} is outside (0, 1]")))
    }
}

fn reached<T: Scalar>(delta: T, gamma: T) -> bool {
    // gamma = 1 always runs to the full set
    gamma < T::one() && delta >= gamma
}

fn greedy<T: Scalar>(sim: &SimilarityMatrix<T>, gamma: T) -> SelectionTrace<T> {
    let d = sim.dim();
    let mut state = CoverState::new(d);
    let mut deltas = Vec::with_capacity(d);
    while state.order.len() < d && !reached(state.delta(), gamma) {
        let mut best: Option<(usize, T)> = None;
        for i in (0..d).filter(|&i| !state.members[i]) {
            let delta = state.delta_with(sim, i);
            if best.is_none_or(|(_, b)| delta > b) {
                best = Some((i, delta));
            }
        }
        let (pick, _) = best.expect("at least one candidate remains");
        state.insert(sim, pick);
        deltas.push(state.delta());
    }
    SelectionTrace {
        order: state.order,
        deltas,
        method: SelectionMethod::Greedy,
    }
}

struct BeamEntry<T> {
    state: CoverState<T>,
    deltas: Vec<T>,
}

fn beam<T: Scalar>(sim: &SimilarityMatrix<T>, gamma: T, width: usize) -> SelectionTrace<T> {
    let d = sim.dim();
    let mut beam = vec![BeamEntry {
        state: CoverState::new(d),
        deltas: Vec::new(),
    }];
    for _ in 0..d {
        if reached(beam[0].state.delta(), gamma) {
            break;
        }
        // (delta, parent rank, candidate)
        let mut expansions: Vec<(T, usize, usize)> = Vec::new();
        for (rank, entry) in beam.iter().enumerate() {
            for i in (0..d).filter(|&i| !entry.state.members[i]) {
                expansions.push((entry.state.delta_with(sim, i), rank, i));
            }
        }
        expansions.sort_by(|a, b| {
            b.0.partial_cmp(&a.0)
                .expect("finite coverage")
                .then(a.1.cmp(&b.1))
                .then(a.2.cmp(&b.2))
        });
        let mut seen = HashSet::new();
        let mut next = Vec::with_capacity(width);
        for (_, rank, i) in expansions {
            let mut state = beam[rank].state.clone();
            state.insert(sim, i);
            if !seen.insert(state.key()) {
                continue;
            }
            let mut deltas = beam[rank].deltas.clone();
            deltas.push(state.delta());
            next.push(BeamEntry { state, deltas });
            if next.len() == width {
                break;
            }
        }
        beam = next;
    }
    let best = beam.swap_remove(0);
    SelectionTrace {
        order: best.state.order,
        deltas: best.deltas,
        method: SelectionMethod::Beam(width),
    }
}

/// Builds a representative subset by repeatedly adding the dataset with
/// the largest coverage gain (lowest index on ties) until proxy coverage
/// reaches `gamma`. With `gamma = 1` every dataset is added, giving a full
/// ordering. `beam_width > 1` keeps that many distinct partial sets per
/// step, ranked by proxy coverage, and returns the best one.
pub fn discover_representative<T: Scalar>(
    sim: &SimilarityMatrix<T>,
    gamma: T,
    beam_width: usize,
) -> Result<SelectionTrace<T>> {
    validate_gamma(gamma)?;
    match beam_width {
        0 => Err(Error::Config("beam width must be at least 1".into())),
        1 => Ok(greedy(sim, gamma)),
        w => Ok(beam(sim, gamma, w)),
    }
}

/// Data-only orderings: seeded shuffle, or datasets by ascending /
/// descending column mean (stable, lower index first on ties).
pub fn baseline_order<T: Scalar>(
    bench: &Benchmark<T>,
    kind: BaselineKind,
    seed: u64,
) -> SelectionTrace<T> {
    let d = bench.n_datasets();
    let mut order: Vec<usize> = (0..d).collect();
    let method = match kind {
        BaselineKind::Random => {
            order.shuffle(&mut seeded_rng(seed));
            SelectionMethod::Random(seed)
        }
        BaselineKind::GreedyMin | BaselineKind::GreedyMax => {
            let means: Vec<T> = (0..d).map(|j| bench.column_mean(j)).collect();
            let descending = kind == BaselineKind::GreedyMax;
            order.sort_by(|&a, &b| {
                let ord = means[a].partial_cmp(&means[b]).expect("finite means");
                if descending {
                    ord.reverse()
                } else {
                    ord
                }
            });
            if descending {
                SelectionMethod::GreedyMax
            } else {
                SelectionMethod::GreedyMin
            }
        }
    };
    SelectionTrace {
        order,
        deltas: Vec::new(),
        method,
    }
}

//! Independent oracles and random generators shared by the integration tests.
//!
//! Nothing here calls the library's component, parity or nondegeneracy code:
//! components are found by a local graph search, parities by multiplying raw
//! edge indices, and determinants by Leibniz expansion.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use stablegc::chart::{ChartFrame, EllipticForm};
use stablegc::divisor::{DivisorGraph, EdgeId, Topology, VertexId};
use stablegc::scalar::{self, Rational};
use stablegc::surgery::{self, ManifoldState, SumPairing};
use stablegc::Sign;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rand_rational(rng: &mut ChaCha8Rng) -> Rational {
    scalar::rational(rng.gen_range(-9..=9), rng.gen_range(1..=5))
}

pub fn rand_nonzero_pair(rng: &mut ChaCha8Rng) -> (Rational, Rational) {
    loop {
        let pair = (rand_rational(rng), rand_rational(rng));
        if !(pair.0.is_zero() && pair.1.is_zero()) {
            return pair;
        }
    }
}

pub type Matrix4 = [[Rational; 4]; 4];

/// Random antisymmetric matrix; about half are decomposable (`u ^ v`, rank 2)
/// so both verdicts are well represented.
#[allow(clippy::needless_range_loop)]
pub fn random_antisymmetric(rng: &mut ChaCha8Rng) -> Matrix4 {
    let mut m: Matrix4 = Default::default();
    match rng.gen_range(0..4) {
        0 | 1 => {
            for i in 0..4 {
                for j in i + 1..4 {
                    // sparse entries make accidental degeneracy common
                    let v = if rng.gen_bool(0.3) { Rational::zero() } else { rand_rational(rng) };
                    m[i][j] = v.clone();
                    m[j][i] = -v;
                }
            }
        }
        _ => {
            let u: Vec<Rational> = (0..4).map(|_| rand_rational(rng)).collect();
            let v: Vec<Rational> = (0..4).map(|_| rand_rational(rng)).collect();
            for i in 0..4 {
                for j in 0..4 {
                    m[i][j] = &u[i] * &v[j] - &u[j] * &v[i];
                }
            }
        }
    }
    m
}

/// Leibniz expansion over all 24 permutations.
pub fn det4(m: &Matrix4) -> Rational {
    let mut total = Rational::zero();
    let mut perm = [0usize, 1, 2, 3];
    permutations(&mut perm, 0, &mut |p| {
        let inversions = (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
        let mut term = Rational::one();
        for (i, &pi) in p.iter().enumerate() {
            term *= &m[i][pi];
        }
        if inversions % 2 == 1 {
            term = -term;
        }
        total += term;
    });
    total
}

fn permutations(p: &mut [usize; 4], k: usize, visit: &mut dyn FnMut(&[usize; 4])) {
    if k == p.len() {
        visit(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permutations(p, k + 1, visit);
        p.swap(k, i);
    }
}

/// The 2-form `sum_{i<j} m_ij g_i ^ g_j` on the crossing chart, generators in
/// canonical order `L1, T1, L2, T2`.
pub fn form_from_matrix(m: &Matrix4) -> EllipticForm {
    let frame = ChartFrame::crossing();
    let terms = (0..4)
        .flat_map(|i| (i + 1..4).map(move |j| (i, j)))
        .map(|(i, j)| (vec![frame.generator(i), frame.generator(j)], scalar::real(m[i][j].clone())));
    EllipticForm::from_terms(frame, 2, terms).unwrap()
}

/// One component as the oracle sees it.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Census {
    pub vertices: usize,
    pub edges: usize,
    /// Product of raw edge indices; `None` when any index is missing.
    pub parity: Option<i8>,
    pub tori: usize,
}

impl Census {
    /// Parity with a non-co-orientable surface counted as `-1`.
    pub fn holonomy(&self) -> i8 {
        self.parity.unwrap_or(-1)
    }
}

/// Components found by depth-first search over raw vertex and edge lists.
pub fn census(graph: &DivisorGraph) -> Vec<Census> {
    let ids: Vec<VertexId> = graph.vertices().iter().map(|v| v.id).collect();
    let mut adjacency: BTreeMap<VertexId, Vec<VertexId>> = ids.iter().map(|&v| (v, Vec::new())).collect();
    for e in graph.edges() {
        adjacency.get_mut(&e.endpoints[0]).unwrap().push(e.endpoints[1]);
        adjacency.get_mut(&e.endpoints[1]).unwrap().push(e.endpoints[0]);
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for &start in &ids {
        if !seen.insert(start) {
            continue;
        }
        let mut stack = vec![start];
        let mut members = BTreeSet::from([start]);
        while let Some(v) = stack.pop() {
            for &w in &adjacency[&v] {
                if seen.insert(w) {
                    members.insert(w);
                    stack.push(w);
                }
            }
        }
        let edges: Vec<_> = graph.edges().iter().filter(|e| members.contains(&e.endpoints[0])).collect();
        let undefined = edges.iter().any(|e| e.index.is_none())
            || graph.vertices().iter().any(|v| members.contains(&v.id) && v.co_orientation.is_none());
        let parity = if undefined {
            None
        } else {
            Some(edges.iter().map(|e| e.index.unwrap().to_i8()).product())
        };
        let tori =
            graph.vertices().iter().filter(|v| members.contains(&v.id) && v.topology == Topology::Torus).count();
        out.push(Census { vertices: members.len(), edges: edges.len(), parity, tori });
    }
    out.sort();
    out
}

/// The component census entry containing edge `e`.
pub fn census_of_edge(graph: &DivisorGraph, e: EdgeId) -> Census {
    let edge = graph.edges().iter().find(|x| x.id == e).unwrap();
    census_of_vertex(graph, edge.endpoints[0])
}

pub fn census_of_vertex(graph: &DivisorGraph, v: VertexId) -> Census {
    let mut members = BTreeSet::from([v]);
    loop {
        let before = members.len();
        for e in graph.edges() {
            if members.contains(&e.endpoints[0]) || members.contains(&e.endpoints[1]) {
                members.insert(e.endpoints[0]);
                members.insert(e.endpoints[1]);
            }
        }
        if members.len() == before {
            break;
        }
    }
    let sub = DivisorGraph::from_parts(
        graph.vertices().iter().filter(|x| members.contains(&x.id)).cloned().collect(),
        graph.edges().iter().filter(|x| members.contains(&x.endpoints[0])).cloned().collect(),
    );
    census(&sub).pop().unwrap()
}

/// `after - before` as multisets, or `None` if `before` is not contained.
pub fn multiset_difference(after: &[Census], before: &[Census]) -> Option<Vec<Census>> {
    let mut rest = after.to_vec();
    for item in before {
        let at = rest.iter().position(|x| x == item)?;
        rest.remove(at);
    }
    Some(rest)
}

pub fn random_block(rng: &mut ChaCha8Rng) -> ManifoldState {
    match rng.gen_range(0..4) {
        0 => surgery::block_cp2(),
        1 => surgery::block_cp2bar(),
        2 => surgery::block_s2xs2(),
        _ => surgery::block_s4(),
    }
}

pub fn random_edge(rng: &mut ChaCha8Rng, state: &ManifoldState) -> EdgeId {
    state.graph.edges().choose(rng).unwrap().id
}

pub fn random_pairing(rng: &mut ChaCha8Rng) -> SumPairing {
    if rng.gen_bool(0.5) {
        SumPairing::Straight
    } else {
        SumPairing::Swapped
    }
}

/// Flips a random strand of a co-orientable component, if there is one.
pub fn random_flip(rng: &mut ChaCha8Rng, state: &ManifoldState) -> ManifoldState {
    let candidates: Vec<VertexId> =
        state.graph.vertices().iter().filter(|v| v.co_orientation.is_some()).map(|v| v.id).collect();
    match candidates.choose(rng) {
        Some(&v) => state.flip(v).unwrap(),
        None => state.clone(),
    }
}

/// A chain of `blocks` random blocks joined by straight sums at random
/// crossings, with random re-gauging.
pub fn random_chain(rng: &mut ChaCha8Rng, blocks: usize) -> ManifoldState {
    let mut state = random_block(rng);
    for _ in 1..blocks {
        let block = random_block(rng);
        let other = random_flip(rng, &block);
        let p = random_edge(rng, &state);
        let q = random_edge(rng, &other);
        state = surgery::connected_sum(&state, p, &other, q, SumPairing::Straight).unwrap();
        if rng.gen_bool(0.5) {
            state = random_flip(rng, &state);
        }
    }
    state
}

/// A random construction of up to `steps` sums, self-sums (any pairing) and
/// flips. Self-sums may split necklaces or close up tori and Klein bottles.
pub fn random_state(rng: &mut ChaCha8Rng, steps: usize) -> ManifoldState {
    let mut state = random_block(rng);
    for _ in 0..steps {
        match rng.gen_range(0..4) {
            0 if state.graph.crossing_count() > 0 => {
                let other = random_block(rng);
                let (p, q) = (random_edge(rng, &state), random_edge(rng, &other));
                state = surgery::connected_sum(&state, p, &other, q, random_pairing(rng)).unwrap();
            }
            1 if state.graph.crossing_count() >= 2 => {
                let mut pick = state.graph.edges().to_vec();
                pick.shuffle(rng);
                state = surgery::self_connected_sum(&state, pick[0].id, pick[1].id, random_pairing(rng)).unwrap();
            }
            2 => state = random_flip(rng, &state),
            _ => {
                let other = random_block(rng);
                if state.graph.crossing_count() > 0 {
                    let (p, q) = (random_edge(rng, &state), random_edge(rng, &other));
                    state = surgery::connected_sum(&state, p, &other, q, SumPairing::Straight).unwrap();
                }
            }
        }
    }
    state
}

pub fn sign_i8(sign: Option<Sign>) -> Option<i8> {
    sign.map(Sign::to_i8)
}

/// Necklace on `n` spheres with the given index bits (bit `i` set = negative).
pub fn necklace_from_bits(n: usize, bits: u32) -> DivisorGraph {
    let indices: Vec<Sign> =
        (0..n).map(|i| if (bits >> i) & 1 == 1 { Sign::Minus } else { Sign::Plus }).collect();
    DivisorGraph::necklace(&indices, &Rational::one(), true)
}

/// Brute force over all `2^n` gauges of a single-component graph: is there one
/// making every index positive?
pub fn brute_force_positive(graph: &DivisorGraph) -> bool {
    let ids: Vec<VertexId> = graph.vertices().iter().map(|v| v.id).collect();
    let n = ids.len();
    (0u32..1 << n).any(|mask| {
        let flipped = |v: VertexId| {
            let i = ids.iter().position(|&x| x == v).unwrap();
            (mask >> i) & 1 == 1
        };
        graph.edges().iter().all(|e| {
            let mut sign = e.index.unwrap().to_i8();
            if e.endpoints[0] != e.endpoints[1] {
                if flipped(e.endpoints[0]) {
                    sign = -sign;
                }
                if flipped(e.endpoints[1]) {
                    sign = -sign;
                }
            }
            sign == 1
        })
    })
}

/// A random chain cut into two necklaces by a self-sum whose pairing splits
/// it, when such a pair of crossings is found.
pub fn random_split_state(rng: &mut ChaCha8Rng) -> ManifoldState {
    let blocks = rng.gen_range(2..5);
    let chain = random_chain(rng, blocks);
    for _ in 0..20 {
        let mut pick = chain.graph.edges().to_vec();
        pick.shuffle(rng);
        for pairing in [SumPairing::Straight, SumPairing::Swapped] {
            let out = surgery::self_connected_sum(&chain, pick[0].id, pick[1].id, pairing).unwrap();
            if census(&out.graph).iter().filter(|c| c.edges > 0).count() >= 2 {
                return out;
            }
        }
    }
    chain
}

//! Shared test support: seeded random matrix and graph generators plus the
//! independent oracles (Taylor-series exponential, brute-force reachability,
//! multiset spectrum matching) that the property and acceptance suites check
//! the implementation against.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use lapflow::netmodel::ComplexGraph;
use lapflow::numkernel::{c, frobenius_norm, identity, one_norm, CMatrix, CVector, Scalar};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_scalar(rng: &mut ChaCha8Rng) -> Scalar {
    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_shape_fn((rows, cols), |_| random_scalar(rng))
}

/// Rank-deficient matrix built as a product of an `n×k` and a `k×n` factor.
pub fn random_low_rank(rng: &mut ChaCha8Rng, n: usize, rank: usize) -> CMatrix {
    let left = random_matrix(rng, n, rank);
    let right = random_matrix(rng, rank, n);
    left.dot(&right)
}

pub fn random_state(rng: &mut ChaCha8Rng, n: usize) -> CVector {
    CVector::from_shape_fn(n, |_| random_scalar(rng))
}

fn random_tree_pairs(rng: &mut ChaCha8Rng, n: usize) -> BTreeSet<(usize, usize)> {
    let mut pairs = BTreeSet::new();
    for v in 1..n {
        let parent = rng.gen_range(0..v);
        pairs.insert((parent, v));
    }
    pairs
}

fn random_undirected_topology(rng: &mut ChaCha8Rng, n: usize) -> Vec<(usize, usize)> {
    let mut pairs = random_tree_pairs(rng, n);
    for _ in 0..rng.gen_range(0..=n) {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a != b {
            pairs.insert((a.min(b), a.max(b)));
        }
    }
    pairs.into_iter().collect()
}

/// Connected undirected graph with weights in the unsigned cone
/// (`Re ∈ [0.2, 2]`, `Im ∈ [0, 1.5]`).
pub fn random_unsigned_undirected(rng: &mut ChaCha8Rng, n_min: usize, n_max: usize) -> ComplexGraph {
    let n = rng.gen_range(n_min..=n_max);
    let edges: Vec<(usize, usize, Scalar)> = random_undirected_topology(rng, n)
        .into_iter()
        .map(|(a, b)| {
            (
                a,
                b,
                c(rng.gen_range(0.2..2.0), rng.gen_range(0.0..1.5)),
            )
        })
        .collect();
    ComplexGraph::new(n, false, &edges, None).expect("generator invariant")
}

/// Connected signed undirected graph (complex-symmetric Laplacian). At
/// least one weight carries a negative imaginary part; when
/// `with_negative_real` is set, one weight also gets a decisively negative
/// real part, which typically pushes the Laplacian out of the psd class.
pub fn random_signed_undirected(
    rng: &mut ChaCha8Rng,
    n_min: usize,
    n_max: usize,
    with_negative_real: bool,
) -> ComplexGraph {
    let n = rng.gen_range(n_min..=n_max);
    let topology = random_undirected_topology(rng, n);
    let mut edges: Vec<(usize, usize, Scalar)> = topology
        .into_iter()
        .map(|(a, b)| {
            (
                a,
                b,
                c(rng.gen_range(0.2..2.0), rng.gen_range(-1.5..1.5)),
            )
        })
        .collect();
    let first = &mut edges[0].2;
    first.im = -first.im.abs().max(0.1);
    if with_negative_real {
        let last = edges.len() - 1;
        edges[last].2.re = rng.gen_range(-2.0..-0.5);
    }
    ComplexGraph::new(n, false, &edges, None).expect("generator invariant")
}

/// Strongly connected weight-balanced unsigned digraph, built as a sum of
/// directed cycles (a Hamiltonian base cycle plus a few random ones).
/// Cycle weights keep a small argument (`Im ≤ 0.15·Re`) so that every
/// nonzero Laplacian eigenvalue provably stays in the open right
/// half-plane.
pub fn random_balanced_unsigned_digraph(
    rng: &mut ChaCha8Rng,
    n_min: usize,
    n_max: usize,
) -> ComplexGraph {
    let n = rng.gen_range(n_min.max(3)..=n_max.max(3));
    let mut acc: BTreeMap<(usize, usize), Scalar> = BTreeMap::new();
    let mut add_cycle = |nodes: &[usize], w: Scalar, acc: &mut BTreeMap<(usize, usize), Scalar>| {
        for k in 0..nodes.len() {
            let from = nodes[k];
            let to = nodes[(k + 1) % nodes.len()];
            *acc.entry((from, to)).or_insert(c(0.0, 0.0)) += w;
        }
    };
    let cycle_weight = |rng: &mut ChaCha8Rng| {
        let re = rng.gen_range(0.5..2.0);
        c(re, rng.gen_range(0.0..0.15) * re)
    };
    let all: Vec<usize> = (0..n).collect();
    let w = cycle_weight(rng);
    add_cycle(&all, w, &mut acc);
    for _ in 0..rng.gen_range(1..=3) {
        let m = rng.gen_range(2..=n);
        let mut nodes = all.clone();
        nodes.shuffle(rng);
        let w = cycle_weight(rng);
        add_cycle(&nodes[..m], w, &mut acc);
    }
    let edges: Vec<(usize, usize, Scalar)> = acc
        .into_iter()
        .map(|((a, b), w)| (a, b, w))
        .collect();
    ComplexGraph::new(n, true, &edges, None).expect("generator invariant")
}

/// Independent matrix-exponential oracle: truncated Taylor series at
/// `‖M‖₁ ≤ 1` combined with repeated squaring.
pub fn expm_taylor(m: &CMatrix) -> CMatrix {
    let n = m.nrows();
    let norm = one_norm(m);
    let squarings = if norm > 1.0 {
        norm.log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let a = m.mapv(|z| z * 0.5f64.powi(squarings));
    let mut sum = identity(n);
    let mut term = identity(n);
    for k in 1..=60 {
        term = term.dot(&a).mapv(|z| z / k as f64);
        sum = sum + &term;
        if frobenius_norm(&term) <= 1e-18 * frobenius_norm(&sum) {
            break;
        }
    }
    let mut f = sum;
    for _ in 0..squarings {
        f = f.dot(&f);
    }
    f
}

/// Brute-force strong connectivity via transitive closure.
pub fn strongly_connected_bruteforce(n: usize, arcs: &[(usize, usize)]) -> bool {
    let mut reach = vec![vec![false; n]; n];
    for (i, row) in reach.iter_mut().enumerate() {
        row[i] = true;
    }
    for &(a, b) in arcs {
        reach[a][b] = true;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if reach[i][k] && reach[k][j] {
                    reach[i][j] = true;
                }
            }
        }
    }
    (0..n).all(|i| (0..n).all(|j| reach[i][j]))
}

/// Greedy multiset match: every `expected` value must pair with a distinct
/// `got` value within `tol`.
pub fn multiset_close(expected: &[Scalar], got: &[Scalar], tol: f64) -> bool {
    if expected.len() != got.len() {
        return false;
    }
    let mut used = vec![false; got.len()];
    for want in expected {
        let best = got
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .map(|(i, z)| (i, (z - want).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match best {
            Some((i, d)) if d <= tol => used[i] = true,
            _ => return false,
        }
    }
    true
}

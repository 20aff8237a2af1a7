//! Edge counts between vertex sets, the mixing inequality for normal
//! out-regular digraphs, and the decomposition lower bound together with
//! the counting harness that feeds it.

use std::collections::{BTreeSet, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{Elem, Point};
use crate::bipoly::BiPoly;
use crate::cayley::{level_lambdas, CayleyDigraph};
use crate::error::{ensure_cap, Error, Result};
use crate::experiments::{image_set, sumset};
use crate::par;

/// Absolute slack on every inequality checked here.
pub const MIXING_TOLERANCE: f64 = 1e-6;
/// Cap on `|A|^4` in [`decomposition_count`].
pub const MAX_DECOMPOSITION_WORK: u64 = 100_000_000;

/// Membership mask over the vertices of `g`.
fn mask(g: &CayleyDigraph, set: &[usize]) -> Vec<bool> {
    let mut m = vec![false; g.n()];
    for &v in set {
        m[v] = true;
    }
    m
}

/// `|N_C(v)|` for each `v` in `b`.
fn neighbourhood_counts(g: &CayleyDigraph, b: &[usize], c_mask: &[bool]) -> Vec<usize> {
    let ctx = g.ctx();
    par::map_slice(b, |&v| {
        let x = g.point(v);
        g.generators()
            .iter()
            .filter(|s| c_mask[g.index((ctx.add(x.0, s.0), ctx.add(x.1, s.1)))])
            .count()
    })
}

/// Number of directed edges from `b` to `c`, i.e. pairs `(x, s)` with
/// `x` in `b`, `s` in `S` and `x + s` in `c`. Vertex sets are given as
/// vertex indices and must not repeat entries.
pub fn count_edges(g: &CayleyDigraph, b: &[usize], c: &[usize]) -> u64 {
    let c_mask = mask(g, c);
    neighbourhood_counts(g, b, &c_mask).into_iter().map(|k| k as u64).sum()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MixingReport {
    pub e_bc: u64,
    /// `d |B| |C| / n`.
    pub expected: f64,
    pub defect: f64,
    /// `lambda sqrt(|B| |C|)`.
    pub bound: f64,
    pub holds: bool,
    /// `sum_{v in B} (|N_C(v)| - c d)^2` with `c = |C| / n`.
    pub second_moment: f64,
    /// `lambda^2 |C|`.
    pub second_moment_bound: f64,
    pub second_moment_holds: bool,
}

/// Compare `e(B, C)` with `d |B| |C| / n` against `lambda sqrt(|B||C|)`,
/// and check the intermediate second-moment inequality
/// `sum_{v in B} (|N_C(v)| - c d)^2 <= lambda^2 |C|` behind it.
pub fn mixing_check(g: &CayleyDigraph, lambda: f64, b: &[usize], c: &[usize]) -> MixingReport {
    let n = g.n() as f64;
    let d = g.degree() as f64;
    let c_mask = mask(g, c);
    let counts = neighbourhood_counts(g, b, &c_mask);
    let e_bc: u64 = counts.iter().map(|&k| k as u64).sum();
    let (nb, nc) = (b.len() as f64, c.len() as f64);
    let expected = d * nb * nc / n;
    let defect = (e_bc as f64 - expected).abs();
    let bound = lambda * (nb * nc).sqrt();
    let cd = nc / n * d;
    let second_moment: f64 = counts.iter().map(|&k| (k as f64 - cd).powi(2)).sum();
    let second_moment_bound = lambda * lambda * nc;
    MixingReport {
        e_bc,
        expected,
        defect,
        bound,
        holds: defect <= bound + MIXING_TOLERANCE,
        second_moment,
        second_moment_bound,
        second_moment_holds: second_moment <= second_moment_bound + MIXING_TOLERANCE,
    }
}

/// Aggregate of many [`mixing_check`] calls.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MixingSummary {
    pub lambda: f64,
    pub pairs: u64,
    pub failures: u64,
    /// Largest `defect / bound` over pairs with a positive bound.
    pub max_ratio: f64,
    /// The pair attaining `max_ratio`.
    pub worst: Option<MixingReport>,
}

/// Run [`mixing_check`] on `trials` random pairs of vertex sets, each set
/// drawn with a random density, plus every pair of singletons when
/// `singletons` is set. Reproducible from `seed`.
pub fn mixing_trials(g: &CayleyDigraph, lambda: f64, trials: usize, singletons: bool, seed: u64) -> MixingSummary {
    let n = g.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs: Vec<(Vec<usize>, Vec<usize>)> = (0..trials)
        .map(|_| {
            let (pb, pc): (f64, f64) = (rng.gen(), rng.gen());
            let b = (0..n).filter(|_| rng.gen_bool(pb)).collect();
            let c = (0..n).filter(|_| rng.gen_bool(pc)).collect();
            (b, c)
        })
        .collect();
    if singletons {
        pairs.extend((0..n * n).map(|i| (vec![i / n], vec![i % n])));
    }
    let reports = par::map_slice(&pairs, |(b, c)| mixing_check(g, lambda, b, c));
    let ratio = |r: &MixingReport| if r.bound > 0.0 { r.defect / r.bound } else { 0.0 };
    let worst = reports
        .iter()
        .max_by(|x, y| ratio(x).total_cmp(&ratio(y)))
        .cloned();
    MixingSummary {
        lambda,
        pairs: reports.len() as u64,
        failures: reports.iter().filter(|r| !r.holds).count() as u64,
        max_ratio: worst.as_ref().map_or(0.0, ratio),
        worst,
    }
}

/// The decomposition bound
/// `min{ (L - |B| d') / (2 lambda sqrt(|B||C|)), (L - |B| d') n / (2 d |B| |C|) }`.
/// A nonpositive numerator gives a nonpositive (vacuous) value.
pub fn decomposition_lower_bound(
    l_edges: f64,
    size_b: f64,
    size_c: f64,
    d: f64,
    dprime: f64,
    lambda: f64,
    n: f64,
) -> Result<f64> {
    if lambda == 0.0 {
        return Err(Error::DivisionByZero("lambda"));
    }
    if d == 0.0 {
        return Err(Error::DivisionByZero("d"));
    }
    if size_b == 0.0 || size_c == 0.0 {
        return Err(Error::DivisionByZero("|B| |C|"));
    }
    let numerator = l_edges - size_b * dprime;
    let spectral = numerator / (2.0 * lambda * (size_b * size_c).sqrt());
    let density = numerator * n / (2.0 * d * size_b * size_c);
    Ok(spectral.min(density))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecompositionReport {
    pub set_size: usize,
    pub size_b: usize,
    pub size_c: usize,
    /// Edges of `K` from `B` to `C`.
    pub l_edges: u64,
    /// Out-degree of `H_0`, the union of the bad `G_a`.
    pub dprime: usize,
    /// Largest out-degree among the good `G_a`.
    pub d: usize,
    /// Largest `lambda(G_a)` among the good `a`.
    pub lambda: f64,
    pub bad_levels: Vec<Elem>,
    pub lower_bound: f64,
    /// Good `a` such that `G_a` carries an edge of `K` from `B` to `C`.
    pub touched_good: usize,
    /// Good `a` carried by edges whose difference lies in `A x A`.
    pub touched_good_forward: usize,
    /// `|P(A)|` and `|P(A)|` without bad values.
    pub image_size: usize,
    pub image_good: usize,
    /// Good values of `P` on `A x A` union `(-A) x (-A)`.
    pub reachable_good: usize,
    pub edges_at_least_a4: bool,
    pub bound_holds: bool,
    pub forward_matches_image: bool,
}

/// Count the edges of the sum-set digraph `K` from `B = A x A` to
/// `C = (A+A) x (A+A)` and sort them into the level graphs `G_a`.
///
/// `K` joins `x -> x'` when `x' - x` or `x - x'` lies in `A x A`. Each edge
/// belongs to exactly one `G_a`, namely `a = P(x' - x)`; edges whose
/// difference lies in both `A x A` and `(-A) x (-A)` are counted once.
pub fn decomposition_count(p: &BiPoly, a_set: &[Elem]) -> Result<DecompositionReport> {
    let ctx = p.ctx();
    let k = a_set.len() as u64;
    ensure_cap("|A|^4", k.saturating_pow(4), MAX_DECOMPOSITION_WORK)?;
    let bad_levels = p.bad_set()?;
    let bad: HashSet<Elem> = bad_levels.iter().copied().collect();
    let q = ctx.order() as usize;

    // Differences of K: A x A union (-A) x (-A), deduplicated; forward first.
    let forward: Vec<Point> = a_set.iter().flat_map(|&x| a_set.iter().map(move |&y| (x, y))).collect();
    let forward_set: HashSet<Point> = forward.iter().copied().collect();
    let mut deltas: Vec<(Point, bool)> = forward.iter().map(|&d| (d, true)).collect();
    for &(x, y) in &forward {
        let neg = (ctx.neg(x), ctx.neg(y));
        if !forward_set.contains(&neg) {
            deltas.push((neg, false));
        }
    }
    let delta_levels: Vec<Elem> = deltas.iter().map(|&(d, _)| p.eval(d)).collect();

    let sums = sumset(ctx, a_set)?;
    let mut in_sums = vec![false; q];
    for s in &sums {
        in_sums[s.0 as usize] = true;
    }
    let b_points = forward.clone();

    // Per B-point: number of edges into C and the levels they use.
    struct Partial {
        edges: u64,
        levels: Vec<bool>,
        forward_levels: Vec<bool>,
    }
    let identity = || Partial { edges: 0, levels: vec![false; q], forward_levels: vec![false; q] };
    let totals = par::fold_range(
        b_points.len(),
        identity,
        |mut acc, bi| {
            let b = b_points[bi];
            for (j, &(delta, is_forward)) in deltas.iter().enumerate() {
                let t = (ctx.add(b.0, delta.0), ctx.add(b.1, delta.1));
                if in_sums[t.0.0 as usize] && in_sums[t.1.0 as usize] {
                    acc.edges += 1;
                    let a = delta_levels[j].0 as usize;
                    acc.levels[a] = true;
                    if is_forward {
                        acc.forward_levels[a] = true;
                    }
                }
            }
            acc
        },
        |mut x, y| {
            x.edges += y.edges;
            for (l, r) in x.levels.iter_mut().zip(&y.levels) {
                *l |= r;
            }
            for (l, r) in x.forward_levels.iter_mut().zip(&y.forward_levels) {
                *l |= r;
            }
            x
        },
    );

    let good_count = |mask: &[bool]| {
        mask.iter().enumerate().filter(|&(a, &hit)| hit && !bad.contains(&Elem(a as u32))).count()
    };
    let touched_good = good_count(&totals.levels);
    let touched_good_forward = good_count(&totals.forward_levels);

    let image = image_set(p, a_set)?;
    let image_good = image.iter().filter(|a| !bad.contains(a)).count();
    let reachable: BTreeSet<Elem> = delta_levels.iter().copied().filter(|a| !bad.contains(a)).collect();

    // Degrees and lambda of the parts of the decomposition of the complete digraph.
    let table = p.value_table()?;
    let mut level_sizes = vec![0usize; q];
    for v in &table {
        level_sizes[v.0 as usize] += 1;
    }
    let dprime: usize = bad_levels.iter().map(|a| level_sizes[a.0 as usize]).sum();
    let good_levels: Vec<Elem> = ctx.elements().filter(|a| !bad.contains(a)).collect();
    let d = good_levels.iter().map(|a| level_sizes[a.0 as usize]).max().unwrap_or(0);
    let lambda = level_lambdas(p, &good_levels)?
        .into_iter()
        .map(|(_, _, l)| l)
        .fold(0.0, f64::max);

    let size_b = b_points.len();
    let size_c = sums.len() * sums.len();
    let n = (q * q) as f64;
    let lower_bound = match decomposition_lower_bound(
        totals.edges as f64,
        size_b as f64,
        size_c as f64,
        d as f64,
        dprime as f64,
        lambda,
        n,
    ) {
        Ok(v) => v,
        // lambda = 0: each good part carries at most d |B||C| / n edges.
        Err(Error::DivisionByZero("lambda")) if d > 0 => {
            (totals.edges as f64 - (size_b * dprime) as f64) * n / (2.0 * d as f64 * (size_b * size_c) as f64)
        }
        Err(e) => return Err(e),
    };

    let report = DecompositionReport {
        set_size: a_set.len(),
        size_b,
        size_c,
        l_edges: totals.edges,
        dprime,
        d,
        lambda,
        bad_levels,
        lower_bound,
        touched_good,
        touched_good_forward,
        image_size: image.len(),
        image_good,
        reachable_good: reachable.len(),
        edges_at_least_a4: totals.edges >= k.pow(4),
        bound_holds: lower_bound <= 0.0 || touched_good as f64 >= lower_bound.ceil() - MIXING_TOLERANCE,
        forward_matches_image: touched_good_forward == image_good,
    };
    if report.touched_good > report.reachable_good {
        return Err(Error::InvariantViolated(format!(
            "{} touched good levels exceed the {} reachable ones",
            report.touched_good, report.reachable_good
        )));
    }
    Ok(report)
}
